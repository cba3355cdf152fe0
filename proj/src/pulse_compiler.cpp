#include "ionscope/pulse_compiler.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ionscope/errors.hpp"

namespace ionscope {

namespace {

constexpr double kZeroAmplitude = 1e-13;
constexpr double kZeroAngle = 1e-13;

double wrap_angle(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::fmod(x + std::numbers::pi, two_pi);
    if (x < 0.0)
        x += two_pi;
    return x - std::numbers::pi;
}

} // namespace

std::string to_string(WaveConfig w) {
    return w == WaveConfig::travelling ? "travelling" : "standing";
}

Wave step_wave(WaveConfig cfg, PulseKind kind) {
    if (cfg == WaveConfig::travelling)
        return Wave::travelling;
    return kind == PulseKind::vertical ? Wave::standing_antinode
                                       : Wave::standing_node;
}

RotationResult rotation_to_ground(double r_g, double psi_g, double r_e,
                                  double psi_e) {
    if (r_g < 0.0 || r_e < 0.0)
        throw ValidationError("rotation_to_ground: negative magnitude");
    if (r_g == 0.0 && r_e == 0.0)
        throw ValidationError("rotation_to_ground: both amplitudes zero");
    RotationResult res;
    res.rot.theta = std::atan2(r_e, r_g); // in [0, pi/2]
    res.rot.chi = wrap_angle(psi_e - psi_g);
    res.psi_f = psi_g;
    return res;
}

RotationResult rotation_to_excited(double r_g, double psi_g, double r_e,
                                   double psi_e) {
    if (r_g < 0.0 || r_e < 0.0)
        throw ValidationError("rotation_to_excited: negative magnitude");
    if (r_g == 0.0 && r_e == 0.0)
        throw ValidationError("rotation_to_excited: both amplitudes zero");
    RotationResult res;
    res.rot.theta = std::atan2(r_g, r_e);
    res.rot.chi = wrap_angle(psi_e - psi_g + std::numbers::pi);
    res.psi_f = psi_e;
    return res;
}

double rabi_from_quality(double q, const TrapParams& trap, int top_level,
                         PulseKind kind) {
    trap.validate();
    if (!(q > 0.0))
        throw ValidationError("rabi_from_quality: q must be positive");
    if (kind == PulseKind::diagonal) {
        if (top_level < 1)
            throw ValidationError(
                "rabi_from_quality: diagonal pulse needs N >= 1");
        return 2.0 * q * trap.nu * trap.eta / top_level;
    }
    if (top_level < 0)
        throw ValidationError("rabi_from_quality: N must be non-negative");
    const double d = (top_level + 1) * trap.eta;
    return 2.0 * q * 4.0 * trap.nu / (d * d);
}

LaserPulse PulseStep::to_pulse(const TrapParams& trap) const {
    return kind == PulseKind::vertical
               ? make_vertical_pulse(omega, phi, duration, wave)
               : make_diagonal_pulse(omega, phi, duration, trap, wave);
}

double Schedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : steps)
        t += s.duration;
    return t;
}

namespace {

// Laser phase realizing the rotation U(theta, chi) on a two-level system
// whose coupling in the pulse Hamiltonian is A e^{-i phi}/2: the unitary at
// theta = |A| t / 2 matches U(theta, chi) exactly when
// arg(A) - phi = chi - pi/2.
double laser_phase_for(Complex coupling, double chi) {
    return wrap_angle(std::arg(coupling) - chi + 0.5 * std::numbers::pi);
}

} // namespace

Schedule compile(const std::vector<Complex>& target, const TrapParams& trap,
                 double q, WaveConfig wave) {
    trap.validate();
    if (target.empty())
        throw ValidationError("compile: empty target");
    double norm2 = 0.0;
    for (const Complex& c : target)
        norm2 += std::norm(c);
    if (std::abs(norm2 - 1.0) > 1e-10)
        throw ValidationError("compile: target coefficients are not normalized");

    int top = -1;
    for (int n = 0; n < static_cast<int>(target.size()); ++n)
        if (std::abs(target[n]) > kZeroAmplitude)
            top = n;
    if (top <= 0) {
        // already |g,0>: nothing to synthesize
        return Schedule{{}, std::max(top, 0), q, Direction::synthesis};
    }

    const double omega_v = rabi_from_quality(q, trap, top, PulseKind::vertical);
    const double omega_d = rabi_from_quality(q, trap, top, PulseKind::diagonal);
    const JointSpace space = make_joint_space(top);
    StateVector psi = embed_ground(
        Eigen::Map<const Eigen::VectorXcd>(target.data(), target.size()), space);

    std::vector<PulseStep> coalescing;
    auto emit = [&](PulseKind kind, int ig, int ie, int coupling_level) {
        const Complex a_g = psi(ig);
        const Complex a_e = psi(ie);
        if (std::abs(a_g) < kZeroAmplitude && std::abs(a_e) < kZeroAmplitude)
            return;
        const RotationResult rr =
            kind == PulseKind::diagonal
                ? rotation_to_excited(std::abs(a_g), std::arg(a_g),
                                      std::abs(a_e), std::arg(a_e))
                : rotation_to_ground(std::abs(a_g), std::arg(a_g),
                                     std::abs(a_e), std::arg(a_e));
        if (rr.rot.theta < kZeroAngle)
            return; // zero-angle pulses are omitted
        const double omega = kind == PulseKind::vertical ? omega_v : omega_d;
        const Complex coupling = effective_coupling(
            kind, step_wave(wave, kind), omega, trap.eta, coupling_level);
        const double mag = std::abs(coupling);
        if (mag == 0.0) {
            std::ostringstream msg;
            msg << "compile: effective " << to_string(kind)
                << " coupling vanishes at eta = " << trap.eta << ", level "
                << coupling_level << "; this eta cannot drive the transition";
            throw ValidationError(msg.str());
        }
        PulseStep step;
        step.kind = kind;
        step.wave = step_wave(wave, kind);
        step.omega = omega;
        step.phi = laser_phase_for(coupling, rr.rot.chi);
        step.duration = 2.0 * rr.rot.theta / mag;
        psi = evolve_ideal(psi, step.to_pulse(trap), trap);
        coalescing.push_back(step);
    };

    for (int n = top; n >= 1; --n) {
        emit(PulseKind::diagonal, space.flatten(Level::g, n),
             space.flatten(Level::e, n - 1), n - 1);
        emit(PulseKind::vertical, space.flatten(Level::g, n - 1),
             space.flatten(Level::e, n - 1), n - 1);
    }

    if (std::abs(std::abs(psi(space.flatten(Level::g, 0))) - 1.0) > 1e-9)
        throw ConvergenceError("compile: coalescing did not reach |g,0>");

    Schedule coal{std::move(coalescing), top, q, Direction::inverse};
    return invert(coal);
}

Schedule invert(const Schedule& s) {
    Schedule out;
    out.target_N = s.target_N;
    out.q = s.q;
    out.direction = s.direction == Direction::synthesis ? Direction::inverse
                                                        : Direction::synthesis;
    out.steps.reserve(s.steps.size());
    for (auto it = s.steps.rbegin(); it != s.steps.rend(); ++it) {
        PulseStep step = *it;
        step.phi = wrap_angle(step.phi + std::numbers::pi);
        out.steps.push_back(step);
    }
    return out;
}

double fidelity(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size())
        throw ValidationError("fidelity: dimension mismatch");
    return std::norm(inner_product(a, b));
}

StateVector evolve_ideal(const StateVector& state, const Schedule& s,
                         const TrapParams& trap) {
    StateVector psi = state;
    for (const PulseStep& step : s.steps)
        psi = evolve_ideal(psi, step.to_pulse(trap), trap);
    return psi;
}

ScheduleEvolveReport evolve_full(const StateVector& state, const Schedule& s,
                                 const TrapParams& trap,
                                 const IntegratorConfig& cfg, double t_start) {
    ScheduleEvolveReport report;
    report.state = state;
    report.end_time = t_start;
    const JointSpace space{static_cast<int>(state.size()) / 2 - 1};
    const int p = space.phonon_dim();

    // One kernel per distinct laser; a schedule only ever carries two.
    struct CacheEntry {
        PulseKind kind;
        Wave wave;
        double omega;
        PulseKernel kernel;
    };
    std::vector<CacheEntry> cache;
    auto kernel_for = [&](const PulseStep& step) -> const PulseKernel& {
        for (const auto& e : cache)
            if (e.kind == step.kind && e.wave == step.wave &&
                e.omega == step.omega)
                return e.kernel;
        cache.push_back({step.kind, step.wave, step.omega,
                         PulseKernel(step.kind, step.wave, step.omega, trap,
                                     space)});
        return cache.back().kernel;
    };

    for (const PulseStep& step : s.steps) {
        const double norm_before = report.state.norm();
        if (cfg.method == Method::exact) {
            report.state = kernel_for(step).apply(report.state, step.phi,
                                                  step.duration,
                                                  report.end_time);
        } else {
            report.state = evolve_full(report.state, step.to_pulse(trap), trap,
                                       cfg, report.end_time);
        }
        report.end_time += step.duration;
        report.max_norm_drift = std::max(
            report.max_norm_drift, std::abs(report.state.norm() - norm_before));
        double top_pop = 0.0;
        for (int n = std::max(0, p - 2); n < p; ++n)
            top_pop += std::norm(report.state(space.flatten(Level::g, n))) +
                       std::norm(report.state(space.flatten(Level::e, n)));
        report.leakage = std::max(report.leakage, top_pop);
    }
    return report;
}

namespace {

PulseKind kind_from_string(const std::string& s) {
    if (s == "vertical") return PulseKind::vertical;
    if (s == "diagonal") return PulseKind::diagonal;
    throw ValidationError("schedule: unknown pulse kind '" + s + "'");
}

Wave wave_from_string(const std::string& s) {
    if (s == "travelling") return Wave::travelling;
    if (s == "standing_antinode") return Wave::standing_antinode;
    if (s == "standing_node") return Wave::standing_node;
    throw ValidationError("schedule: unknown wave '" + s + "'");
}

} // namespace

std::string schedule_to_json(const Schedule& s) {
    nlohmann::json j;
    j["schema"] = "ionscope.schedule/1";
    j["target_N"] = s.target_N;
    j["q"] = s.q;
    j["direction"] =
        s.direction == Direction::synthesis ? "synthesis" : "inverse";
    j["steps"] = nlohmann::json::array();
    for (const PulseStep& step : s.steps) {
        j["steps"].push_back({{"kind", to_string(step.kind)},
                              {"wave", to_string(step.wave)},
                              {"omega", step.omega},
                              {"phi", step.phi},
                              {"duration", step.duration}});
    }
    return j.dump(2);
}

Schedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("schedule: bad JSON: ") + e.what());
    }
    Schedule s;
    s.target_N = j.at("target_N").get<int>();
    s.q = j.at("q").get<double>();
    const std::string dir = j.at("direction").get<std::string>();
    if (dir != "synthesis" && dir != "inverse")
        throw ValidationError("schedule: unknown direction '" + dir + "'");
    s.direction =
        dir == "synthesis" ? Direction::synthesis : Direction::inverse;
    for (const auto& js : j.at("steps")) {
        PulseStep step;
        step.kind = kind_from_string(js.at("kind").get<std::string>());
        step.wave = wave_from_string(js.at("wave").get<std::string>());
        step.omega = js.at("omega").get<double>();
        step.phi = js.at("phi").get<double>();
        step.duration = js.at("duration").get<double>();
        s.steps.push_back(step);
    }
    return s;
}

} // namespace ionscope
