#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ionscope/errors.hpp"
#include "ionscope/harness.hpp"
#include "ionscope/observables.hpp"
#include "ionscope/pulse_compiler.hpp"
#include "oracles.hpp"

using namespace ionscope;

namespace {

StateVector ground_start(const JointSpace& space) {
    StateVector v = StateVector::Zero(space.dim());
    v(space.flatten(Level::g, 0)) = 1.0;
    return v;
}

double synthesis_fidelity_ideal(const std::vector<Complex>& target,
                                const Schedule& sched, const TrapParams& trap) {
    const JointSpace space = make_joint_space(sched.target_N);
    const StateVector out = evolve_ideal(ground_start(space), sched, trap);
    const StateVector want = embed_ground(
        Eigen::Map<const Eigen::VectorXcd>(target.data(),
                                           std::min<std::size_t>(
                                               target.size(),
                                               space.phonon_dim())),
        space);
    return fidelity(want, out);
}

} // namespace

TEST_SUITE("pulse_compiler") {

TEST_CASE("rotation to ground") {
    auto r0 = rotation_to_ground(1.0, 0.2, 0.0, 0.0);
    CHECK(r0.rot.theta == 0.0);

    auto req = rotation_to_ground(0.5, 0.9, 0.5, 0.9);
    CHECK(req.rot.theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(req.rot.chi == doctest::Approx(0.0));

    for (std::uint64_t s = 0; s < 40; ++s) {
        StateVector amp = oracles::random_state(2, 500 + s);
        const Complex a_e = amp(0), a_g = amp(1);
        const auto rr = rotation_to_ground(std::abs(a_g), std::arg(a_g),
                                           std::abs(a_e), std::arg(a_e));
        const auto [ue, ug] =
            oracles::apply_rotation(rr.rot.theta, rr.rot.chi, a_e, a_g);
        CHECK(std::abs(ue) < 1e-14);
        CHECK(std::abs(ug - std::abs(amp.norm()) *
                                std::exp(Complex(0.0, rr.psi_f))) < 1e-13);
        CHECK(rr.rot.theta >= 0.0);
        CHECK(rr.rot.theta <= std::numbers::pi / 2);
    }
    CHECK_THROWS_AS(rotation_to_ground(0.0, 0.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("rotation to excited") {
    auto r0 = rotation_to_excited(0.0, 0.0, 1.0, 0.4);
    CHECK(r0.rot.theta == 0.0);

    auto req = rotation_to_excited(0.5, 1.1, 0.5, 1.1);
    CHECK(req.rot.theta == doctest::Approx(std::numbers::pi / 4));
    CHECK(std::abs(std::exp(Complex(0.0, req.rot.chi)) -
                   std::exp(Complex(0.0, std::numbers::pi))) < 1e-14);

    for (std::uint64_t s = 0; s < 40; ++s) {
        StateVector amp = oracles::random_state(2, 700 + s);
        const Complex a_e = amp(0), a_g = amp(1);
        const auto rr = rotation_to_excited(std::abs(a_g), std::arg(a_g),
                                            std::abs(a_e), std::arg(a_e));
        const auto [ue, ug] =
            oracles::apply_rotation(rr.rot.theta, rr.rot.chi, a_e, a_g);
        CHECK(std::abs(ug) < 1e-14);
        CHECK(std::abs(ue - std::exp(Complex(0.0, rr.psi_f))) < 1e-13);
    }
    CHECK_THROWS_AS(rotation_to_excited(0.0, 1.0, 0.0, 2.0), ValidationError);
}

TEST_CASE("rabi from quality factor") {
    const TrapParams trap{1.0, 0.5};
    CHECK(rabi_from_quality(0.01, trap, 8, PulseKind::vertical) ==
          doctest::Approx(2.0 * 0.01 * 4.0 / (9.0 * 0.5 * 9.0 * 0.5))
              .epsilon(1e-15));
    CHECK(rabi_from_quality(0.01, trap, 8, PulseKind::diagonal) ==
          doctest::Approx(0.00125).epsilon(1e-15));
    CHECK(rabi_from_quality(0.02, trap, 8, PulseKind::vertical) ==
          doctest::Approx(2.0 *
                          rabi_from_quality(0.01, trap, 8,
                                            PulseKind::vertical))
              .epsilon(1e-15));
    CHECK_THROWS_AS(rabi_from_quality(0.01, trap, 0, PulseKind::diagonal),
                    ValidationError);
    CHECK_THROWS_AS(rabi_from_quality(-1.0, trap, 8, PulseKind::vertical),
                    ValidationError);
}

TEST_CASE("compile trivial and two-pulse targets") {
    const TrapParams trap{1.0, 0.5};

    const Schedule empty = compile({Complex(1.0)}, trap, 0.05,
                                   WaveConfig::travelling);
    CHECK(empty.steps.empty());
    CHECK(empty.total_duration() == 0.0);

    const std::vector<Complex> one{Complex(0.0), Complex(1.0)};
    const Schedule two = compile(one, trap, 0.05, WaveConfig::travelling);
    CHECK(two.steps.size() == 2);
    CHECK(two.steps.front().kind == PulseKind::vertical); // inverted order
    CHECK(two.steps.back().kind == PulseKind::diagonal);
    CHECK(synthesis_fidelity_ideal(one, two, trap) > 1.0 - 1e-12);

    std::vector<Complex> unnorm{Complex(1.0), Complex(0.5)};
    CHECK_THROWS_AS(compile(unnorm, trap, 0.05, WaveConfig::travelling),
                    ValidationError);
}

TEST_CASE("compile the N=8 phase state") {
    const TrapParams trap{1.0, 0.5};
    const auto target = phase_state_coeffs(8, 2.0);
    const Schedule sched = compile(target, trap, 0.01, WaveConfig::travelling);
    CHECK(sched.steps.size() == 16);
    CHECK(sched.target_N == 8);
    CHECK(synthesis_fidelity_ideal(target, sched, trap) > 1.0 - 1e-10);
    CHECK(static_cast<int>(sched.steps.size()) <= 2 * sched.target_N + 1);

    double sum = 0.0;
    for (const auto& s : sched.steps) {
        CHECK(s.duration >= 0.0);
        sum += s.duration;
    }
    CHECK(sched.total_duration() == doctest::Approx(sum).epsilon(1e-15));
}

TEST_CASE("ideal channel reaches random targets") {
    const TrapParams trap{1.0, 0.5};
    for (std::uint64_t s = 0; s < 30; ++s) {
        const int n = 1 + static_cast<int>(s % 12);
        const StateVector t = oracles::random_state(n + 1, 900 + s);
        std::vector<Complex> target(t.data(), t.data() + t.size());
        const Schedule sched = compile(target, trap, 0.05,
                                       s % 2 ? WaveConfig::standing
                                             : WaveConfig::travelling);
        CHECK(synthesis_fidelity_ideal(target, sched, trap) > 1.0 - 1e-9);
    }
}

TEST_CASE("inversion") {
    const TrapParams trap{1.0, 0.5};
    const Schedule empty = compile({Complex(1.0)}, trap, 0.05,
                                   WaveConfig::travelling);
    CHECK(invert(empty).steps.empty());

    const auto target = phase_state_coeffs(8, 2.0);
    const Schedule sched = compile(target, trap, 0.01, WaveConfig::standing);
    const Schedule twice = invert(invert(sched));
    REQUIRE(twice.steps.size() == sched.steps.size());
    for (std::size_t i = 0; i < sched.steps.size(); ++i) {
        CHECK(twice.steps[i].kind == sched.steps[i].kind);
        CHECK(twice.steps[i].duration == sched.steps[i].duration);
        CHECK(std::abs(std::remainder(
                  twice.steps[i].phi - sched.steps[i].phi,
                  2.0 * std::numbers::pi)) < 1e-12);
    }

    // inverse undoes the synthesis on the ideal channel
    const JointSpace space = make_joint_space(sched.target_N);
    const StateVector g0 = ground_start(space);
    const StateVector round =
        evolve_ideal(evolve_ideal(g0, sched, trap), invert(sched), trap);
    CHECK(fidelity(g0, round) > 1.0 - 1e-10);

    // and the coalescing direction maps the target to |g,0>
    const StateVector from_target = evolve_ideal(
        embed_ground(Eigen::Map<const Eigen::VectorXcd>(target.data(), 9),
                     space),
        invert(sched), trap);
    CHECK(std::abs(std::abs(from_target(space.flatten(Level::g, 0))) - 1.0) <
          1e-10);
}

TEST_CASE("fidelity") {
    StateVector v = oracles::random_state(6, 31);
    CHECK(fidelity(v, v) == doctest::Approx(1.0).epsilon(1e-14));
    StateVector e0 = StateVector::Zero(2), e1 = StateVector::Zero(2);
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(fidelity(e0, e1) == 0.0);
    const StateVector plus = (e0 + e1) / std::sqrt(2.0);
    CHECK(fidelity(plus, e0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(fidelity(v, e0), ValidationError);
}

TEST_CASE("schedule JSON round trip is bit exact") {
    const TrapParams trap{1.0, 0.5};
    const auto target = phase_state_coeffs(5, 0.9);
    const Schedule sched = compile(target, trap, 0.037, WaveConfig::standing);
    const Schedule back = schedule_from_json(schedule_to_json(sched));
    REQUIRE(back.steps.size() == sched.steps.size());
    CHECK(back.target_N == sched.target_N);
    CHECK(back.q == sched.q);
    CHECK(back.direction == sched.direction);
    for (std::size_t i = 0; i < sched.steps.size(); ++i) {
        CHECK(back.steps[i].kind == sched.steps[i].kind);
        CHECK(back.steps[i].wave == sched.steps[i].wave);
        CHECK(back.steps[i].omega == sched.steps[i].omega);
        CHECK(back.steps[i].phi == sched.steps[i].phi);
        CHECK(back.steps[i].duration == sched.steps[i].duration);
    }
    CHECK_THROWS_AS(schedule_from_json("{not json"), ValidationError);
}

TEST_CASE("schedule time scales as 1/q") {
    const TrapParams trap{1.0, 0.5};
    const auto target = phase_state_coeffs(8, 2.0);
    const double t1 =
        compile(target, trap, 0.02, WaveConfig::travelling).total_duration();
    const double t2 =
        compile(target, trap, 0.01, WaveConfig::travelling).total_duration();
    CHECK(t2 / t1 == doctest::Approx(2.0).epsilon(1e-12));
}

} // TEST_SUITE
