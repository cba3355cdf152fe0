// Compares the OpenMP trial runner against the serial reference, and the
// exact pulse propagator against the RK4 time stepper, on the N=8 phase
// state workload.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ionscope/harness.hpp"

using namespace ionscope;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::steady_clock::now() -
                                                t0)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    int trials = 200000;
    int jobs = 0;
    if (argc > 1)
        trials = std::atoi(argv[1]);
    if (argc > 2)
        jobs = std::atoi(argv[2]);
#ifdef _OPENMP
    if (jobs <= 0)
        jobs = omp_get_max_threads();
#else
    if (jobs <= 0)
        jobs = 1;
#endif

    const TrapParams trap{1.0, 0.5};
    const std::vector<Complex> state = phase_state_coeffs(8, 2.0);
    const ObservableBasis basis = phase_basis(8);

    std::printf("== Monte Carlo trials (ideal mode, N=8 phase state, %d trials) ==\n",
                trials);
    const MeasurementProtocol ideal(basis, trap, ProtocolMode{});
    auto t0 = chrono::steady_clock::now();
    const TrialsResult serial = run_trials_serial(ideal, state, trials, 7);
    const double t_serial = ms_since(t0);
    t0 = chrono::steady_clock::now();
    const TrialsResult parallel = run_trials(ideal, state, trials, 7, jobs);
    const double t_parallel = ms_since(t0);
    const bool same = serial.counts == parallel.counts;
    std::printf("serial reference : %8.1f ms\n", t_serial);
    std::printf("openmp (%d jobs)  : %8.1f ms   speedup %.2fx   identical: %s\n",
                jobs, t_parallel, t_serial / t_parallel, same ? "yes" : "NO");

    std::printf("\n== Pulse propagator (one vertical pulse of the N=8, q=0.1 schedule) ==\n");
    const Schedule sched = compile(state, trap, 0.1, WaveConfig::travelling);
    const PulseStep step = sched.steps.back();
    const JointSpace space = make_joint_space(16);
    StateVector psi0 = StateVector::Zero(space.dim());
    psi0(space.flatten(Level::g, 0)) = 1.0;

    IntegratorConfig exact_cfg;
    t0 = chrono::steady_clock::now();
    StateVector exact;
    const int reps = 200;
    for (int i = 0; i < reps; ++i)
        exact = evolve_full(psi0, step.to_pulse(trap), trap, exact_cfg);
    const double t_exact = ms_since(t0) / reps;

    IntegratorConfig rk4_cfg;
    rk4_cfg.method = Method::rk4;
    rk4_cfg.step_scale = 0.02;
    rk4_cfg.rtol = std::numeric_limits<double>::infinity();
    t0 = chrono::steady_clock::now();
    const StateVector stepped =
        evolve_full(psi0, step.to_pulse(trap), trap, rk4_cfg);
    const double t_rk4 = ms_since(t0);

    std::printf("exact kernel     : %8.3f ms/pulse\n", t_exact);
    std::printf("rk4 reference    : %8.1f ms/pulse   max |diff| %.2e\n", t_rk4,
                (exact - stepped).cwiseAbs().maxCoeff());
    return 0;
}
