#include "ionscope/harness.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "ionscope/errors.hpp"

namespace ionscope {

using nlohmann::json;

std::string to_string(BasisKind b) {
    return b == BasisKind::phase ? "phase" : "position";
}

ObservableBasis make_basis(BasisKind kind, int N) {
    return kind == BasisKind::phase ? phase_basis(N) : position_basis(N);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ValidationError("cannot open output file: " + path);
    f << content;
    if (!f)
        throw ValidationError("write failed: " + path);
}

void ExperimentConfig::validate() const {
    trap.validate();
    if (!(q > 0.0))
        throw ValidationError("config: q must be positive");
    if (trials < 1)
        throw ValidationError("config: trials must be >= 1");
    if (jobs < 1)
        throw ValidationError("config: jobs must be >= 1");
    if (mode.detector_efficiency <= 0.0 || mode.detector_efficiency > 1.0)
        throw ValidationError("config: detector_efficiency must lie in (0, 1]");
    mode.integrator.validate();
    if (recipe.kind != StateRecipe::Kind::coefficients && recipe.N < 0)
        throw ValidationError("config: recipe N must be >= 0");
    realize(recipe); // surfaces recipe-specific violations
}

namespace {

json complex_to_json(const Complex& c) {
    return json::array({c.real(), c.imag()});
}

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError("config: complex values are [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

json recipe_to_json(const StateRecipe& r) {
    json j;
    switch (r.kind) {
    case StateRecipe::Kind::coefficients: {
        j["type"] = "coefficients";
        auto values = json::array();
        for (const Complex& c : r.coefficients)
            values.push_back(complex_to_json(c));
        j["values"] = std::move(values);
        break;
    }
    case StateRecipe::Kind::phase_state:
        j["type"] = "phase_state";
        j["N"] = r.N;
        j["phi"] = r.phi;
        break;
    case StateRecipe::Kind::coherent:
        j["type"] = "coherent";
        j["N"] = r.N;
        j["alpha"] = complex_to_json(r.alpha);
        break;
    case StateRecipe::Kind::cat:
        j["type"] = "cat";
        j["N"] = r.N;
        j["alpha"] = complex_to_json(r.alpha);
        break;
    }
    return j;
}

StateRecipe recipe_from_json(const json& j) {
    StateRecipe r;
    const std::string type = j.at("type").get<std::string>();
    if (type == "coefficients") {
        r.kind = StateRecipe::Kind::coefficients;
        for (const auto& v : j.at("values"))
            r.coefficients.push_back(complex_from_json(v));
        r.N = static_cast<int>(r.coefficients.size()) - 1;
    } else if (type == "phase_state") {
        r.kind = StateRecipe::Kind::phase_state;
        r.N = j.at("N").get<int>();
        r.phi = j.at("phi").get<double>();
    } else if (type == "coherent" || type == "cat") {
        r.kind = type == "coherent" ? StateRecipe::Kind::coherent
                                    : StateRecipe::Kind::cat;
        r.N = j.at("N").get<int>();
        r.alpha = complex_from_json(j.at("alpha"));
    } else {
        throw ValidationError("config: unknown recipe type '" + type + "'");
    }
    return r;
}

WaveConfig wave_config_from_string(const std::string& s) {
    if (s == "travelling") return WaveConfig::travelling;
    if (s == "standing") return WaveConfig::standing;
    throw ValidationError("config: wave must be 'travelling' or 'standing'");
}

BasisKind basis_from_string(const std::string& s) {
    if (s == "phase") return BasisKind::phase;
    if (s == "position") return BasisKind::position;
    throw ValidationError("config: basis must be 'phase' or 'position'");
}

std::string frame_to_string(Frame f) {
    switch (f) {
    case Frame::lab: return "lab";
    case Frame::rfv: return "rfv";
    case Frame::rfd: return "rfd";
    }
    return "lab";
}

Frame frame_from_string(const std::string& s) {
    if (s == "lab") return Frame::lab;
    if (s == "rfv") return Frame::rfv;
    if (s == "rfd") return Frame::rfd;
    throw ValidationError("config: frame must be lab, rfv or rfd");
}

} // namespace

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = "ionscope.config/1";
    j["recipe"] = recipe_to_json(c.recipe);
    j["basis"] = to_string(c.basis);
    j["mode"] = c.mode.kind == ProtocolMode::Kind::ideal ? "ideal" : "full";
    j["detector_efficiency"] = c.mode.detector_efficiency;
    j["integrator"] = {{"step_scale", c.mode.integrator.step_scale},
                       {"rtol", c.mode.integrator.rtol},
                       {"frame", frame_to_string(c.mode.integrator.frame)},
                       {"method", c.mode.integrator.method == Method::exact
                                      ? "exact"
                                      : "rk4"}};
    j["trap"] = {{"nu", c.trap.nu}, {"eta", c.trap.eta}};
    j["q"] = c.q;
    j["wave"] = to_string(c.wave);
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["out"] = c.out;
    return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        if (j.contains("recipe"))
            c.recipe = recipe_from_json(j.at("recipe"));
        if (j.contains("basis"))
            c.basis = basis_from_string(j.at("basis").get<std::string>());
        if (j.contains("mode")) {
            const std::string m = j.at("mode").get<std::string>();
            if (m != "ideal" && m != "full")
                throw ValidationError("config: mode must be 'ideal' or 'full'");
            c.mode.kind = m == "ideal" ? ProtocolMode::Kind::ideal
                                       : ProtocolMode::Kind::full;
        }
        if (j.contains("detector_efficiency"))
            c.mode.detector_efficiency =
                j.at("detector_efficiency").get<double>();
        if (j.contains("integrator")) {
            const json& ji = j.at("integrator");
            if (ji.contains("step_scale"))
                c.mode.integrator.step_scale = ji.at("step_scale").get<double>();
            if (ji.contains("rtol"))
                c.mode.integrator.rtol = ji.at("rtol").get<double>();
            if (ji.contains("frame"))
                c.mode.integrator.frame =
                    frame_from_string(ji.at("frame").get<std::string>());
            if (ji.contains("method")) {
                const std::string m = ji.at("method").get<std::string>();
                if (m != "exact" && m != "rk4")
                    throw ValidationError(
                        "config: integrator method must be 'exact' or 'rk4'");
                c.mode.integrator.method =
                    m == "exact" ? Method::exact : Method::rk4;
            }
        }
        if (j.contains("trap")) {
            if (j.at("trap").contains("nu"))
                c.trap.nu = j.at("trap").at("nu").get<double>();
            if (j.at("trap").contains("eta"))
                c.trap.eta = j.at("trap").at("eta").get<double>();
        }
        if (j.contains("q")) c.q = j.at("q").get<double>();
        if (j.contains("wave"))
            c.wave = wave_config_from_string(j.at("wave").get<std::string>());
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return c;
}

SweepGrid grid_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("grid: bad JSON: ") + e.what());
    }
    const json& g = j.contains("grid") ? j.at("grid") : j;
    SweepGrid grid;
    try {
        if (g.contains("N"))
            grid.N = g.at("N").get<std::vector<int>>();
        if (g.contains("q"))
            grid.q = g.at("q").get<std::vector<double>>();
        if (g.contains("eta"))
            grid.eta = g.at("eta").get<std::vector<double>>();
        if (g.contains("wave"))
            for (const auto& w : g.at("wave"))
                grid.wave.push_back(
                    wave_config_from_string(w.get<std::string>()));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("grid: ") + e.what());
    }
    return grid;
}

namespace {

ProtocolMode protocol_mode_for(const ExperimentConfig& cfg) {
    ProtocolMode m = cfg.mode;
    m.q = cfg.q;
    m.wave = cfg.wave;
    return m;
}

std::vector<Complex> trimmed(std::vector<Complex> coeffs) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-13)
        coeffs.pop_back();
    return coeffs;
}

} // namespace

SynthesisRow run_synthesis_point(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<Complex> coeffs = trimmed(realize(cfg.recipe));
    const Schedule schedule = compile(coeffs, cfg.trap, cfg.q, cfg.wave);

    SynthesisRow row;
    row.recipe_label = cfg.recipe.label();
    row.N = schedule.target_N;
    row.eta = cfg.trap.eta;
    row.q = cfg.q;
    row.wave = cfg.wave;
    row.pulses = static_cast<int>(schedule.steps.size());
    row.nu_t_over_2pi =
        schedule.total_duration() * cfg.trap.nu / (2.0 * std::numbers::pi);

    const Eigen::Map<const Eigen::VectorXcd> cvec(coeffs.data(),
                                                  coeffs.size());

    const JointSpace ideal_space = make_joint_space(schedule.target_N);
    StateVector g0 = StateVector::Zero(ideal_space.dim());
    g0(ideal_space.flatten(Level::g, 0)) = 1.0;
    const StateVector ideal_final = evolve_ideal(g0, schedule, cfg.trap);
    row.fidelity_ideal =
        fidelity(embed_ground(cvec, ideal_space), ideal_final);

    const JointSpace full_space = make_joint_space(schedule.target_N + 8);
    StateVector g0f = StateVector::Zero(full_space.dim());
    g0f(full_space.flatten(Level::g, 0)) = 1.0;
    const ScheduleEvolveReport report =
        evolve_full(g0f, schedule, cfg.trap, cfg.mode.integrator);
    row.fidelity_full = fidelity(embed_ground(cvec, full_space), report.state);
    row.norm_drift = report.max_norm_drift;
    row.leakage = report.leakage;
    return row;
}

const char* kSynthesisCsvHeader =
    "recipe,N,eta,q,wave,pulses,fidelity_ideal,fidelity_full,nu_t_over_2pi,"
    "norm_drift,leakage";

std::string synthesis_csv(const std::vector<SynthesisRow>& rows) {
    std::ostringstream out;
    out << kSynthesisCsvHeader << "\n";
    for (const SynthesisRow& r : rows) {
        out << r.recipe_label << ',' << r.N << ',' << format_double(r.eta)
            << ',' << format_double(r.q) << ',' << to_string(r.wave) << ','
            << r.pulses << ',' << format_double(r.fidelity_ideal) << ','
            << format_double(r.fidelity_full) << ','
            << format_double(r.nu_t_over_2pi) << ','
            << format_double(r.norm_drift) << ',' << format_double(r.leakage)
            << "\n";
    }
    return out.str();
}

std::vector<SynthesisRow> run_sweep(const ExperimentConfig& base,
                                    const SweepGrid& grid) {
    if (grid.N.empty() && grid.q.empty() && grid.eta.empty() &&
        grid.wave.empty())
        throw ValidationError("sweep: empty grid");
    const std::vector<int> ns = grid.N.empty()
                                    ? std::vector<int>{base.recipe.N}
                                    : grid.N;
    const std::vector<double> qs =
        grid.q.empty() ? std::vector<double>{base.q} : grid.q;
    const std::vector<double> etas =
        grid.eta.empty() ? std::vector<double>{base.trap.eta} : grid.eta;
    const std::vector<WaveConfig> waves =
        grid.wave.empty() ? std::vector<WaveConfig>{base.wave} : grid.wave;
    if (!grid.N.empty() &&
        base.recipe.kind == StateRecipe::Kind::coefficients)
        throw ValidationError("sweep: N grid needs a parametric recipe");

    std::vector<ExperimentConfig> points;
    for (int n : ns)
        for (double q : qs)
            for (double eta : etas)
                for (WaveConfig w : waves) {
                    ExperimentConfig c = base;
                    c.recipe.N = n;
                    c.q = q;
                    c.trap.eta = eta;
                    c.wave = w;
                    points.push_back(std::move(c));
                }

    std::vector<SynthesisRow> rows(points.size());
    std::exception_ptr failure;
    const int npoints = static_cast<int>(points.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(base.jobs)
#endif
    for (int i = 0; i < npoints; ++i) {
        try {
            rows[i] = run_synthesis_point(points[i]);
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
    return rows;
}

const char* kHistogramCsvHeader = "k,a_k,count,exact_P_k";

MeasureOutput run_measure(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<Complex> coeffs = realize(cfg.recipe);
    const int basis_N = static_cast<int>(coeffs.size()) - 1;
    const ObservableBasis basis = make_basis(cfg.basis, basis_N);
    const MeasurementProtocol protocol(basis, cfg.trap,
                                       protocol_mode_for(cfg));

    MeasureOutput out;
    out.result =
        run_trials(protocol, coeffs, cfg.trials, cfg.seed, cfg.jobs);

    StateVector padded = StateVector::Zero(basis.dim());
    for (size_t n = 0; n < coeffs.size(); ++n)
        padded(static_cast<int>(n)) = coeffs[n];
    out.exact = born_distribution(padded, basis);

    std::ostringstream csv;
    csv << kHistogramCsvHeader << "\n";
    for (int k = 0; k < basis.dim(); ++k) {
        csv << k << ',' << format_double(basis.eigenvalues[k]) << ','
            << out.result.counts[k] << ',' << format_double(out.exact[k])
            << "\n";
    }
    out.histogram_csv = csv.str();

    std::ostringstream jsonl;
    for (const MeasurementRecord& r : out.result.records) {
        json j;
        j["outcome_k"] = r.outcome_k;
        j["eigenvalue"] = r.eigenvalue;
        j["steps_taken"] = r.steps_taken;
        j["final_fidelity"] = r.final_fidelity;
        j["seed"] = r.seed;
        jsonl << j.dump() << "\n";
    }
    out.records_jsonl = jsonl.str();
    return out;
}

std::vector<Complex> random_coefficients(int N, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<Complex> c(N + 1);
    double norm2 = 0.0;
    for (int n = 0; n <= N; ++n) {
        // Box-Muller: complex-Gaussian components give a Haar-uniform state
        const double u1 = std::max(rng.uniform(), 1e-300);
        const double u2 = rng.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        c[n] = Complex(r * std::cos(2.0 * std::numbers::pi * u2),
                       r * std::sin(2.0 * std::numbers::pi * u2));
        norm2 += std::norm(c[n]);
    }
    for (Complex& v : c)
        v /= std::sqrt(norm2);
    return c;
}

std::string oracle_rabi_json(int n, double eta, PulseKind kind) {
    json j;
    j["schema"] = "ionscope.oracle.rabi/1";
    j["kind"] = to_string(kind);
    j["n"] = n;
    j["eta"] = eta;
    const Complex sum = kind == PulseKind::vertical
                            ? effective_rabi_vertical(1.0, eta, n)
                            : effective_rabi_diagonal(1.0, eta, n);
    const Complex elem = kind == PulseKind::vertical
                             ? displacement_element(n, n, eta)
                             : displacement_element(n, n + 1, eta);
    j["value"] = complex_to_json(sum);
    j["displacement_route"] = complex_to_json(elem);
    j["max_abs_diff"] = std::abs(sum - elem);
    return j.dump(2);
}

std::string oracle_displacement_json(int n, int m, double eta) {
    json j;
    j["schema"] = "ionscope.oracle.displacement/1";
    j["n"] = n;
    j["m"] = m;
    j["eta"] = eta;
    j["value"] = complex_to_json(displacement_element(n, m, eta));
    return j.dump(2);
}

std::string oracle_position_eigs_json(int N) {
    json j;
    j["schema"] = "ionscope.oracle.position_eigs/1";
    j["N"] = N;
    j["eigenvalues"] = position_basis(N).eigenvalues;
    return j.dump(2);
}

std::string oracle_protocol_json(int N, BasisKind basis_kind,
                                 std::uint64_t seed) {
    const ObservableBasis basis = make_basis(basis_kind, N);
    const std::vector<Complex> coeffs = random_coefficients(N, seed);
    StateVector state(N + 1);
    for (int n = 0; n <= N; ++n)
        state(n) = coeffs[n];

    const std::vector<double> protocol = exact_protocol_distribution(state, basis);
    const std::vector<double> born = born_distribution(state, basis);
    double max_diff = 0.0;
    for (int k = 0; k <= N; ++k)
        max_diff = std::max(max_diff, std::abs(protocol[k] - born[k]));

    json j;
    j["schema"] = "ionscope.oracle.protocol/1";
    j["N"] = N;
    j["basis"] = to_string(basis_kind);
    j["seed"] = seed;
    auto st = json::array();
    for (const Complex& c : coeffs)
        st.push_back(complex_to_json(c));
    j["state"] = std::move(st);
    j["protocol_distribution"] = protocol;
    j["born_distribution"] = born;
    j["max_abs_diff"] = max_diff;
    return j.dump(2);
}

std::string gnuplot_script(const std::string& csv_path, bool histogram) {
    std::ostringstream s;
    s << "set datafile separator ','\n";
    if (histogram) {
        s << "set style fill solid 0.4\n"
          << "set boxwidth 0.8 relative\n"
          << "plot '" << csv_path
          << "' using 1:3 skip 1 with boxes title 'counts', \\\n"
          << "     '' using 1:($4*total) skip 1 with points pt 7 title "
             "'exact (scale by trials)'\n";
    } else {
        s << "set logscale y\n"
          << "plot '" << csv_path
          << "' using 3:7 skip 1 with linespoints title 'F_ideal', \\\n"
          << "     '' using 3:8 skip 1 with linespoints title 'F_full'\n";
    }
    return s.str();
}

} // namespace ionscope
