#pragma once

#include <string>

#include "ionscope/hilbert.hpp"

namespace ionscope {

/// Trap frequency nu sets the time unit (nu = 1 by convention throughout);
/// eta is the Lamb-Dicke parameter.
struct TrapParams {
    double nu = 1.0;
    double eta = 0.5;

    void validate() const;
};

enum class Wave { travelling, standing_antinode, standing_node };
enum class PulseKind { vertical, diagonal };

std::string to_string(Wave w);
std::string to_string(PulseKind k);

/// One laser pulse. kind/delta are redundant by construction:
/// vertical means resonant (delta = 0), diagonal means first red sideband
/// (delta = -nu). Standing-wave pulses sit at an antinode (vertical) or a
/// node (diagonal).
struct LaserPulse {
    double omega = 0.0;    // laser Rabi frequency
    double delta = 0.0;    // detuning
    double phi = 0.0;      // laser phase
    double duration = 0.0;
    Wave wave = Wave::travelling;
    PulseKind kind = PulseKind::vertical;

    void validate(const TrapParams& trap) const;
};

LaserPulse make_vertical_pulse(double omega, double phi, double duration,
                               Wave wave = Wave::travelling);
LaserPulse make_diagonal_pulse(double omega, double phi, double duration,
                               const TrapParams& trap,
                               Wave wave = Wave::travelling);

/// <n| exp(-i eta (a + a†)) |m>, evaluated in closed form via associated
/// Laguerre polynomials. Exact for all eta, not a Lamb-Dicke expansion.
Complex displacement_element(int n, int m, double eta);

/// Effective Rabi frequency of the resonant pulse on the |g,n> <-> |e,n>
/// system, as the finite binomial sum. Equals
/// omega * displacement_element(n, n, eta) = omega e^{-eta²/2} L_n(eta²).
Complex effective_rabi_vertical(double omega, double eta, int n);

/// Effective Rabi frequency of the red-sideband pulse on |g,n+1> <-> |e,n>,
/// as the finite binomial sum. Equals omega * displacement_element(n, n+1, eta)
/// = -i omega eta e^{-eta²/2} L¹_n(eta²)/sqrt(n+1).
Complex effective_rabi_diagonal(double omega, double eta, int n);

/// Effective two-level coupling for the given wave configuration. For the
/// standing wave the exponential is replaced by cos (antinode) or sin (node)
/// of the position quadrature; magnitudes match the travelling case.
Complex effective_coupling(PulseKind kind, Wave wave, double omega, double eta,
                           int n);

/// Phonon-space matrix of exp(-i eta x), cos(eta x) or sin(eta x) with
/// x = a + a†, computed by eigendecomposition of the truncated quadrature.
OperatorMatrix wave_operator(Wave wave, double eta, int phonon_dim);

/// Interaction-picture Hamiltonian at time t:
///   H(t) = (omega/2) [ sigma+ W(t) e^{-i phi - i delta t} + h.c. ],
/// with W(t) the wave operator of eta (a e^{-i nu t} + a† e^{i nu t}).
/// Phase convention: the laser phase enters as e^{-i phi} on sigma+, matching
/// the per-pulse two-level Hamiltonians below (a sign-audit test pins this).
OperatorMatrix full_hamiltonian(double t, const LaserPulse& pulse,
                                const TrapParams& trap, const JointSpace& space);

/// Time-independent rotating-frame Hamiltonian of the pulse: block-diagonal
/// over isolated two-level systems, coupling Omega_n e^{-i phi}/2 between
/// |g,n>,|e,n> (vertical) or Omega'_n e^{-i phi}/2 between |g,n+1>,|e,n>
/// (diagonal). The top phonon level couples to nothing above the truncation.
OperatorMatrix approx_hamiltonian(const LaserPulse& pulse,
                                  const TrapParams& trap,
                                  const JointSpace& space);

} // namespace ionscope
