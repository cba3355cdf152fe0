#pragma once

#include "ionscope/hamiltonians.hpp"
#include "ionscope/hilbert.hpp"

namespace ionscope {

/// Frame the time stepper integrates in. Results are mapped back to the
/// interaction picture, so the choice only affects the integration path.
enum class Frame { lab, rfv, rfd };

/// Propagation method for the full Hamiltonian.
///  - exact: conjugate into the frame where the pulse Hamiltonian is time
///    independent and apply one eigendecomposition-based matrix exponential.
///    No time-step error; the frame option is irrelevant here.
///  - rk4: fixed-step 4th-order Runge-Kutta with step
///    h = step_scale / (coupling norm bound + nu (n_max + 1) + |delta|),
///    followed by one Richardson halving check against rtol. Kept as the
///    serial reference path; the halved-step result is returned.
enum class Method { exact, rk4 };

struct IntegratorConfig {
    double step_scale = 0.05;
    double rtol = 1e-9; // set to infinity to skip the Richardson check
    Frame frame = Frame::lab;
    Method method = Method::exact;

    void validate() const;
};

struct EvolveDiagnostics {
    double norm_drift = 0.0;       // | ||out|| - ||in|| |
    double richardson_error = 0.0; // rk4 only
    long steps = 0;                // rk4 only (coarse pass)
};

/// Time-ordered evolution of `state` under the full interaction-picture
/// Hamiltonian of `pulse`, over [t_start, t_start + duration].
StateVector evolve_full(const StateVector& state, const LaserPulse& pulse,
                        const TrapParams& trap,
                        const IntegratorConfig& cfg = {}, double t_start = 0.0,
                        EvolveDiagnostics* diag = nullptr);

/// Exact evolution under the block-diagonal approximate Hamiltonian: each
/// two-level system rotated analytically by |coupling| * duration / 2.
StateVector evolve_ideal(const StateVector& state, const LaserPulse& pulse,
                         const TrapParams& trap);

/// Precomputed exact propagator for one pulse shape (kind, wave, omega, eta,
/// n_max). The laser phase and duration stay free parameters, so one
/// factorization serves every pulse of a schedule that shares a laser.
class PulseKernel {
  public:
    PulseKernel(PulseKind kind, Wave wave, double omega, const TrapParams& trap,
                const JointSpace& space);

    /// Exact |psi(t_start + duration)> from |psi(t_start)>.
    StateVector apply(const StateVector& psi, double phi, double duration,
                      double t_start = 0.0) const;

    const JointSpace& space() const { return space_; }

  private:
    JointSpace space_;
    Eigen::VectorXd frame_gen_;   // diagonal of S = nu n - (delta/2) sigma_z
    Eigen::VectorXd sigma_half_;  // diagonal of sigma_z / 2
    Eigen::MatrixXcd vecs_;       // eigenvectors of S + H0(phi = 0)
    Eigen::VectorXd vals_;
};

} // namespace ionscope
