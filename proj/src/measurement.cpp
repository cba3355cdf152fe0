#include "ionscope/measurement.hpp"

#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ionscope/errors.hpp"

namespace ionscope {

FilterResult filter_ground(const StateVector& state, const JointSpace& space) {
    if (state.size() != space.dim())
        throw ValidationError("filter_ground: dimension mismatch");
    const int ig0 = space.flatten(Level::g, 0);
    FilterResult r;
    r.p_yes = std::norm(state(ig0));
    r.yes_state = StateVector::Zero(space.dim());
    r.yes_state(ig0) = 1.0;
    StateVector no = state;
    no(ig0) = 0.0;
    r.p_no = no.squaredNorm();
    if (r.p_no >= kEmptyBranchTol) {
        no /= std::sqrt(r.p_no);
        r.no_state = std::move(no);
    }
    return r;
}

std::vector<double> exact_protocol_distribution(const StateVector& state,
                                                const ObservableBasis& basis) {
    if (state.size() != basis.dim())
        throw ValidationError("exact_protocol_distribution: dimension mismatch");
    std::vector<double> p(basis.dim(), 0.0);
    StateVector cur = state;
    double survival = 1.0;
    for (int k = 0; k < basis.dim(); ++k) {
        const Complex ov = inner_product(basis.eigenstates[k], cur);
        const double cond = std::norm(ov);
        p[k] = survival * cond;
        StateVector next = cur - ov * basis.eigenstates[k];
        const double n2 = next.squaredNorm();
        survival *= std::max(0.0, 1.0 - cond);
        if (n2 < kEmptyBranchTol)
            break; // branch exhausted; remaining probabilities are zero
        cur = next / std::sqrt(n2);
    }
    return p;
}

struct MeasurementProtocol::KernelEntry {
    PulseKind kind;
    Wave wave;
    double omega;
    PulseKernel kernel;
};

MeasurementProtocol::MeasurementProtocol(ObservableBasis basis,
                                         TrapParams trap, ProtocolMode mode)
    : basis_(std::move(basis)), trap_(trap), mode_(mode) {
    trap_.validate();
    if (mode_.detector_efficiency <= 0.0 || mode_.detector_efficiency > 1.0)
        throw ValidationError("detector_efficiency must lie in (0, 1]");
    if (mode_.kind != ProtocolMode::Kind::full)
        return;

    mode_.integrator.validate();
    if (!(mode_.q > 0.0))
        throw ValidationError("full mode requires q > 0");
    space_ = make_joint_space(basis_.N + 8);
    synthesis_.reserve(basis_.dim());
    inverse_.reserve(basis_.dim());
    embedded_.reserve(basis_.dim());
    for (int k = 0; k < basis_.dim(); ++k) {
        const StateVector& psi_k = basis_.eigenstates[k];
        std::vector<Complex> coeffs(psi_k.data(), psi_k.data() + psi_k.size());
        synthesis_.push_back(compile(coeffs, trap_, mode_.q, mode_.wave));
        inverse_.push_back(invert(synthesis_.back()));
        embedded_.push_back(embed_ground(psi_k, space_));
    }
    if (mode_.integrator.method == Method::exact) {
        for (const Schedule& s : synthesis_) {
            for (const PulseStep& step : s.steps) {
                bool found = false;
                for (const auto& e : kernels_)
                    if (e->kind == step.kind && e->wave == step.wave &&
                        e->omega == step.omega)
                        found = true;
                if (!found)
                    kernels_.push_back(std::make_shared<const KernelEntry>(
                        KernelEntry{step.kind, step.wave, step.omega,
                                    PulseKernel(step.kind, step.wave,
                                                step.omega, trap_, space_)}));
            }
        }
    }
}

const Schedule& MeasurementProtocol::schedule(int k) const {
    if (mode_.kind != ProtocolMode::Kind::full)
        throw ValidationError("schedule(): protocol runs in ideal mode");
    if (k < 0 || k >= static_cast<int>(synthesis_.size()))
        throw ValidationError("schedule(): index out of range");
    return synthesis_[k];
}

StateVector MeasurementProtocol::initial_state(
    const std::vector<Complex>& coeffs) const {
    if (static_cast<int>(coeffs.size()) > basis_.dim())
        throw ValidationError("initial state has more levels than the basis");
    const Eigen::Map<const Eigen::VectorXcd> c(coeffs.data(), coeffs.size());
    if (std::abs(c.norm() - 1.0) > 1e-10)
        throw ValidationError("initial state is not normalized");
    if (mode_.kind == ProtocolMode::Kind::ideal) {
        StateVector v = StateVector::Zero(basis_.dim());
        v.head(c.size()) = c;
        return v;
    }
    return embed_ground(c, space_);
}

StateVector MeasurementProtocol::apply_schedule(const StateVector& state,
                                                const Schedule& s,
                                                double& clock) const {
    StateVector psi = state;
    if (mode_.integrator.method == Method::exact) {
        for (const PulseStep& step : s.steps) {
            const KernelEntry* entry = nullptr;
            for (const auto& e : kernels_)
                if (e->kind == step.kind && e->wave == step.wave &&
                    e->omega == step.omega) {
                    entry = e.get();
                    break;
                }
            psi = entry ? entry->kernel.apply(psi, step.phi, step.duration,
                                              clock)
                        : PulseKernel(step.kind, step.wave, step.omega, trap_,
                                      space_)
                              .apply(psi, step.phi, step.duration, clock);
            clock += step.duration;
        }
        return psi;
    }
    const ScheduleEvolveReport report =
        evolve_full(psi, s, trap_, mode_.integrator, clock);
    clock = report.end_time;
    return report.state;
}

double MeasurementProtocol::overlap_sq_with_eigenstate(const StateVector& state,
                                                       int k) const {
    const StateVector& ref = mode_.kind == ProtocolMode::Kind::ideal
                                 ? basis_.eigenstates[k]
                                 : embedded_[k];
    return std::norm(inner_product(ref, state));
}

MeasurementProtocol::StepResult MeasurementProtocol::step(StateVector& state,
                                                          int k,
                                                          SplitMix64& rng,
                                                          double* clock) const {
    if (k < 0 || k >= basis_.dim())
        throw ValidationError("protocol step index out of range");
    StepResult res;
    const double u = rng.uniform();
    double local_clock = 0.0;
    double& now = clock ? *clock : local_clock;

    if (mode_.kind == ProtocolMode::Kind::ideal) {
        const StateVector& psi_k = basis_.eigenstates[k];
        const Complex ov = inner_product(psi_k, state);
        res.fire_prob = std::norm(ov);
        if (u < res.fire_prob * mode_.detector_efficiency) {
            state = psi_k;
            res.fired = true;
            return res;
        }
        if (u < res.fire_prob) {
            // filter projected onto |g,0> but the detection was missed
            state = psi_k;
            return res;
        }
        StateVector next = state - ov * psi_k;
        const double n2 = next.squaredNorm();
        if (n2 < kEmptyBranchTol) {
            state = psi_k;
            res.fired = true;
            res.degenerate = true;
            return res;
        }
        state = next / std::sqrt(n2);
        return res;
    }

    StateVector transformed = apply_schedule(state, inverse_[k], now);
    const FilterResult f = filter_ground(transformed, space_);
    res.fire_prob = f.p_yes;
    if (u < f.p_yes * mode_.detector_efficiency) {
        state = apply_schedule(f.yes_state, synthesis_[k], now);
        res.fired = true;
        return res;
    }
    if (u < f.p_yes) {
        state = apply_schedule(f.yes_state, synthesis_[k], now);
        return res;
    }
    if (!f.no_state) {
        state = apply_schedule(f.yes_state, synthesis_[k], now);
        res.fired = true;
        res.degenerate = true;
        return res;
    }
    state = apply_schedule(*f.no_state, synthesis_[k], now);
    return res;
}

MeasurementRecord MeasurementProtocol::run_single(const StateVector& initial,
                                                  std::uint64_t seed) const {
    SplitMix64 rng(seed);
    StateVector state = initial;
    MeasurementRecord rec;
    rec.seed = seed;
    double clock = 0.0;
    for (int k = 0; k < basis_.dim(); ++k) {
        const StepResult res = step(state, k, rng, &clock);
        if (res.fired) {
            rec.outcome_k = k;
            rec.eigenvalue = basis_.eigenvalues[k];
            rec.steps_taken = k + 1;
            rec.final_fidelity = overlap_sq_with_eigenstate(state, k);
            rec.forced = res.degenerate;
            return rec;
        }
    }
    // accumulated float residue: no filter fired, assign the last step
    const int last = basis_.N;
    rec.outcome_k = last;
    rec.eigenvalue = basis_.eigenvalues[last];
    rec.steps_taken = basis_.dim();
    rec.final_fidelity = overlap_sq_with_eigenstate(state, last);
    rec.forced = true;
    return rec;
}

namespace {

TrialsResult collect(const MeasurementProtocol& protocol,
                     std::vector<MeasurementRecord> records) {
    TrialsResult out;
    out.counts.assign(protocol.basis().dim(), 0);
    for (const MeasurementRecord& r : records) {
        ++out.counts[r.outcome_k];
        if (r.forced)
            ++out.forced_count;
    }
    out.records = std::move(records);
    return out;
}

} // namespace

TrialsResult run_trials(const MeasurementProtocol& protocol,
                        const std::vector<Complex>& initial_coeffs, int trials,
                        std::uint64_t seed, int jobs) {
    if (trials < 1)
        throw ValidationError("run_trials: trials must be >= 1");
    if (jobs < 1)
        throw ValidationError("run_trials: jobs must be >= 1");
    const StateVector initial = protocol.initial_state(initial_coeffs);
    std::vector<MeasurementRecord> records(trials);
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(jobs)
#endif
    for (int i = 0; i < trials; ++i) {
        try {
            records[i] =
                protocol.run_single(initial, SplitMix64::derive_seed(seed, i));
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure)
                failure = std::current_exception();
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return collect(protocol, std::move(records));
}

TrialsResult run_trials_serial(const MeasurementProtocol& protocol,
                               const std::vector<Complex>& initial_coeffs,
                               int trials, std::uint64_t seed) {
    if (trials < 1)
        throw ValidationError("run_trials_serial: trials must be >= 1");
    const StateVector initial = protocol.initial_state(initial_coeffs);
    std::vector<MeasurementRecord> records(trials);
    for (int i = 0; i < trials; ++i)
        records[i] =
            protocol.run_single(initial, SplitMix64::derive_seed(seed, i));
    return collect(protocol, std::move(records));
}

} // namespace ionscope
