#pragma once

#include <string>
#include <vector>

#include "ionscope/propagator.hpp"

namespace ionscope {

/// Wave configuration of a whole schedule. Standing maps to antinode for
/// vertical pulses and node for diagonal ones.
enum class WaveConfig { travelling, standing };

std::string to_string(WaveConfig w);
Wave step_wave(WaveConfig cfg, PulseKind kind);

/// Two-level rotation
///   U = [[cos θ, -e^{iχ} sin θ], [e^{-iχ} sin θ, cos θ]]
/// in the (|e>, |g>) basis, θ in [0, π/2] after canonicalization.
struct Rotation {
    double theta = 0.0;
    double chi = 0.0;
};

struct RotationResult {
    Rotation rot;
    double psi_f = 0.0; // phase of the finally populated amplitude
};

/// Rotation sending r_g e^{iψg}|g> + r_e e^{iψe}|e> to
/// sqrt(r_g²+r_e²) e^{iψf}|g>: tan θ = r_e/r_g, χ = ψe - ψg.
RotationResult rotation_to_ground(double r_g, double psi_g, double r_e,
                                  double psi_e);

/// Same with the excited target: tan θ = r_g/r_e, χ = ψe - ψg + π.
RotationResult rotation_to_excited(double r_g, double psi_g, double r_e,
                                   double psi_e);

/// Laser Rabi frequency from the quality factor:
/// Omega/2 = q 4 nu / [(N+1) eta]²  (vertical),
/// Omega/2 = q nu eta / N           (diagonal).
double rabi_from_quality(double q, const TrapParams& trap, int top_level,
                         PulseKind kind);

struct PulseStep {
    PulseKind kind = PulseKind::vertical;
    Wave wave = Wave::travelling;
    double omega = 0.0;
    double phi = 0.0;
    double duration = 0.0;

    LaserPulse to_pulse(const TrapParams& trap) const;
};

enum class Direction { synthesis, inverse };

struct Schedule {
    std::vector<PulseStep> steps;
    int target_N = 0;
    double q = 0.0;
    Direction direction = Direction::synthesis;

    double total_duration() const;
};

/// Compile the target superposition sum c_n |g,n> into a pulse schedule whose
/// ideal evolution maps |g,0> to the target (up to global phase). Works by
/// simulating the coalescing direction with exact ideal rotations -- diagonal
/// pulse emptying |g,n> into |e,n-1>, vertical pulse emptying |e,n-1> into
/// |g,n-1>, from the top level down -- then inverting the emitted list.
/// Zero-angle pulses are omitted.
Schedule compile(const std::vector<Complex>& target, const TrapParams& trap,
                 double q, WaveConfig wave);

/// Reversed step order with every laser phase shifted by π: the schedule of
/// the inverse unitary.
Schedule invert(const Schedule& s);

/// F = |<a|b>|² for normalized states.
double fidelity(const StateVector& a, const StateVector& b);

StateVector evolve_ideal(const StateVector& state, const Schedule& s,
                         const TrapParams& trap);

struct ScheduleEvolveReport {
    StateVector state;
    double max_norm_drift = 0.0;
    /// Largest population seen in the top two phonon levels after any pulse;
    /// proxy for probability lost above the truncation.
    double leakage = 0.0;
    double end_time = 0.0;
};

/// Full-Hamiltonian evolution over a schedule. The clock runs continuously:
/// pulse j starts where pulse j-1 ended, beginning at t_start.
ScheduleEvolveReport evolve_full(const StateVector& state, const Schedule& s,
                                 const TrapParams& trap,
                                 const IntegratorConfig& cfg = {},
                                 double t_start = 0.0);

/// JSON array of steps with fields {kind, wave, omega, phi, duration};
/// numbers printed with 17 significant digits so reloading is bit exact.
std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

} // namespace ionscope
