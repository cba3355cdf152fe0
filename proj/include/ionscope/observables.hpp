#pragma once

#include <string>
#include <vector>

#include "ionscope/hilbert.hpp"

namespace ionscope {

/// Measurement basis over the truncated phonon space H_{N+1}: eigenvalues
/// a_0 < ... < a_N with orthonormal eigenstates in the Fock basis.
struct ObservableBasis {
    int N = 0;
    std::vector<double> eigenvalues;
    std::vector<StateVector> eigenstates;

    int dim() const { return N + 1; }
};

/// Pegg-Barnett phase basis: |phi_k> = sum_n e^{i phi_k n}|n>/sqrt(N+1) on
/// the grid phi_k = 2 pi k/(N+1).
ObservableBasis phase_basis(int N);

/// Eigenbasis of the truncated position operator x_N = a_N + a_N†, by direct
/// symmetric tridiagonal diagonalization. Eigenvalues are the zeros of the
/// Hermite polynomial H_{N+1} scaled by sqrt(2), spaced ~2 pi/sqrt(4N)
/// centrally for large N.
ObservableBasis position_basis(int N);

/// Coherent-state coefficients c_n ∝ alpha^n/sqrt(n!) over 0..N, renormalized.
/// Rejects truncations losing more than 1e-6 of the untruncated weight.
std::vector<Complex> coherent_coeffs(Complex alpha, int N);

/// Normalized |alpha> + |-alpha> superposition; odd coefficients vanish for
/// real alpha.
std::vector<Complex> cat_coeffs(Complex alpha, int N);

/// Phase state at arbitrary phi (not restricted to the phi_k grid).
std::vector<Complex> phase_state_coeffs(int N, double phi);

/// P_k = |<psi_k|state>|².
std::vector<double> born_distribution(const StateVector& state,
                                      const ObservableBasis& basis);

struct StateRecipe {
    enum class Kind { coefficients, phase_state, coherent, cat };
    Kind kind = Kind::phase_state;
    int N = 8;
    double phi = 0.0;        // phase_state
    Complex alpha = 0.0;     // coherent / cat
    std::vector<Complex> coefficients;

    std::string label() const;
};

std::vector<Complex> realize(const StateRecipe& recipe);

/// Basis export: eigenvalues plus eigenstate coefficient arrays as JSON.
std::string basis_to_json(const ObservableBasis& basis, const std::string& name);

} // namespace ionscope
