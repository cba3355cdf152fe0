#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ionscope/observables.hpp"
#include "ionscope/pulse_compiler.hpp"
#include "ionscope/rng.hpp"

namespace ionscope {

struct ProtocolMode {
    enum class Kind { ideal, full };
    Kind kind = Kind::ideal;
    // full mode only:
    double q = 0.1;
    WaveConfig wave = WaveConfig::travelling;
    IntegratorConfig integrator{};
    /// Probability that a true ground-state detection is actually seen.
    /// 1.0 models the perfect-efficiency filter; kept as a knob for
    /// robustness experiments.
    double detector_efficiency = 1.0;
};

struct MeasurementRecord {
    int outcome_k = 0;
    double eigenvalue = 0.0;
    int steps_taken = 0;
    double final_fidelity = 0.0;
    std::uint64_t seed = 0;
    /// Set when no filter fired and the outcome was assigned to the last
    /// step (accumulated float residue).
    bool forced = false;
};

struct FilterResult {
    double p_yes = 0.0;
    StateVector yes_state; // |g,0>
    double p_no = 0.0;
    std::optional<StateVector> no_state; // absent when the branch is empty
};

/// Binary filter distinguishing |g,0> from its complement, as an ideal
/// unit-efficiency projective measurement. Returns both branches.
FilterResult filter_ground(const StateVector& state, const JointSpace& space);

/// Step-by-step conditional firing probabilities of the sequential protocol,
/// evaluated by explicit projection with no sampling. Telescopes to the Born
/// distribution; serves as the brute-force oracle for it.
std::vector<double> exact_protocol_distribution(const StateVector& state,
                                                const ObservableBasis& basis);

/// Sequential filtering measurement in one basis. Immutable after
/// construction; safe to share across trial workers. Full mode compiles a
/// synthesis schedule per eigenstate and caches exact pulse propagators.
class MeasurementProtocol {
  public:
    MeasurementProtocol(ObservableBasis basis, TrapParams trap,
                        ProtocolMode mode);

    const ObservableBasis& basis() const { return basis_; }
    const ProtocolMode& mode() const { return mode_; }
    const Schedule& schedule(int k) const;

    /// State the protocol starts from, built from phonon coefficients
    /// (padded joint state in full mode, the coefficient vector in ideal
    /// mode). Coefficient list may be shorter than the basis dimension.
    StateVector initial_state(const std::vector<Complex>& coeffs) const;

    struct StepResult {
        bool fired = false;
        double fire_prob = 0.0;
        bool degenerate = false; // no-branch below the empty-branch tolerance
    };

    /// One protocol step: transform by U_k†, filter on |g,0>, transform back
    /// (ideal mode collapses this to a projection onto |psi_k>). Mutates
    /// `state` into the post-step state. `clock`, when given, carries the
    /// continuous pulse time across steps in full mode.
    StepResult step(StateVector& state, int k, SplitMix64& rng,
                    double* clock = nullptr) const;

    MeasurementRecord run_single(const StateVector& initial,
                                 std::uint64_t seed) const;

  private:
    double overlap_sq_with_eigenstate(const StateVector& state, int k) const;

    ObservableBasis basis_;
    TrapParams trap_;
    ProtocolMode mode_;
    JointSpace space_; // full mode
    std::vector<Schedule> synthesis_;
    std::vector<Schedule> inverse_;
    std::vector<StateVector> embedded_; // eigenstates in the padded space
    struct KernelEntry;
    std::vector<std::shared_ptr<const KernelEntry>> kernels_;

    StateVector apply_schedule(const StateVector& state, const Schedule& s,
                               double& clock) const;
};

struct TrialsResult {
    std::vector<std::uint64_t> counts; // per outcome k
    std::vector<MeasurementRecord> records;
    std::uint64_t forced_count = 0;
};

/// Monte Carlo trials. Per-trial seeds derive from (seed, trial index), and
/// records are stored by trial index, so the result is identical for any
/// worker count.
TrialsResult run_trials(const MeasurementProtocol& protocol,
                        const std::vector<Complex>& initial_coeffs, int trials,
                        std::uint64_t seed, int jobs = 1);

/// Plain-loop reference implementation used to validate the parallel path.
TrialsResult run_trials_serial(const MeasurementProtocol& protocol,
                               const std::vector<Complex>& initial_coeffs,
                               int trials, std::uint64_t seed);

} // namespace ionscope
