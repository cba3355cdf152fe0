#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace ionscope {

using Complex = std::complex<double>;

/// Dense complex state vector over a finite Hilbert space. All amplitudes are
/// dimensionless; dimension is the vector length.
using StateVector = Eigen::VectorXcd;

/// Dense complex operator. Entries carry angular frequency for Hamiltonians,
/// no units for unitaries and projectors.
using OperatorMatrix = Eigen::MatrixXcd;

enum class Level { g, e };

struct JointIndex {
    Level level;
    int phonons;

    bool operator==(const JointIndex&) const = default;
};

/// Joint space of one two-level ion and a phonon mode truncated at n_max.
/// Layout: |g,0..n_max| then |e,0..n_max|.
struct JointSpace {
    int n_max = 0;

    int dim() const { return 2 * (n_max + 1); }
    int phonon_dim() const { return n_max + 1; }

    int flatten(Level level, int n) const {
        return n + (level == Level::e ? n_max + 1 : 0);
    }
    int flatten(const JointIndex& idx) const {
        return flatten(idx.level, idx.phonons);
    }
    JointIndex unflatten(int flat) const {
        const int p = n_max + 1;
        return flat < p ? JointIndex{Level::g, flat}
                        : JointIndex{Level::e, flat - p};
    }
};

JointSpace make_joint_space(int n_max);

/// Phonon annihilation operator truncated to dim levels.
OperatorMatrix annihilation(int dim);

/// Position quadrature a + a†, truncated to dim levels. Real symmetric
/// tridiagonal with off-diagonal sqrt(n+1).
OperatorMatrix position_quadrature(int dim);

/// <a|b>, conjugate-linear in the first argument.
Complex inner_product(const StateVector& a, const StateVector& b);

StateVector apply(const OperatorMatrix& m, const StateVector& v);

void normalize(StateVector& v);

inline constexpr double kEmptyBranchTol = 1e-14;

struct ProjectionResult {
    double prob = 0.0;
    /// Absent when prob < kEmptyBranchTol (empty branch).
    std::optional<StateVector> post;
};

/// Projective measurement branch: prob = <v|P|v>, post = Pv normalized.
/// P must be an orthogonal projector; this is not re-verified here.
ProjectionResult project_and_normalize(const StateVector& v,
                                       const OperatorMatrix& p);

/// Target state embedded in the ground manifold of a joint space:
/// sum_n c_n |g,n>. Coefficient list may be shorter than the phonon cutoff.
StateVector embed_ground(const Eigen::VectorXcd& coeffs, const JointSpace& space);

} // namespace ionscope
