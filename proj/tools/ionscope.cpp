// Command-line front end: synthesize / sweep / measure / oracle / bases.
// Flag precedence: command line > config file > IONSCOPE_SEED (seed only)
// > built-in defaults. Exit codes: 0 ok, 2 validation error, 3 numerical
// convergence failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionscope/errors.hpp"
#include "ionscope/harness.hpp"

namespace {

using namespace ionscope;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ValidationError("cannot read file: " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty())
        std::cout << content;
    else
        write_file(out_path, content);
}

struct CliOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::optional<std::string> wave;
    std::optional<std::string> basis;
    std::optional<double> eta;
    std::optional<double> q;
    std::optional<int> N;
    std::optional<int> trials;
    std::optional<std::string> recipe;
    std::optional<double> phi;
    std::optional<double> alpha;
};

void add_shared_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file");
    cmd->add_option("--seed", o.seed, "master RNG seed");
    cmd->add_option("--jobs", o.jobs, "parallel workers");
    cmd->add_option("--out", o.out, "output path (default: stdout)");
    cmd->add_option("--mode", o.mode, "protocol mode: ideal|full");
    cmd->add_option("--wave", o.wave, "wave config: travelling|standing");
    cmd->add_option("--basis", o.basis, "observable basis: phase|position");
    cmd->add_option("--eta", o.eta, "Lamb-Dicke parameter");
    cmd->add_option("--q", o.q, "quality factor");
    cmd->add_option("--N", o.N, "top phonon level of the recipe");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    cmd->add_option("--recipe", o.recipe,
                    "recipe type: phase_state|coherent|cat");
    cmd->add_option("--phi", o.phi, "phase-state phi (radians)");
    cmd->add_option("--alpha", o.alpha, "coherent/cat alpha (real)");
}

ExperimentConfig build_config(const CliOptions& o) {
    ExperimentConfig cfg;
    bool config_has_seed = false;
    if (!o.config_path.empty()) {
        const std::string text = read_file(o.config_path);
        cfg = config_from_json(text);
        config_has_seed = nlohmann::json::parse(text).contains("seed");
    }
    if (!o.seed && !config_has_seed) {
        if (const char* env = std::getenv("IONSCOPE_SEED")) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (end == env || *end != '\0')
                throw ValidationError("IONSCOPE_SEED is not an integer");
            cfg.seed = v;
        }
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.jobs) cfg.jobs = *o.jobs;
    if (o.out) cfg.out = *o.out;
    if (o.mode) {
        if (*o.mode != "ideal" && *o.mode != "full")
            throw ValidationError("--mode must be ideal or full");
        cfg.mode.kind = *o.mode == "ideal" ? ProtocolMode::Kind::ideal
                                           : ProtocolMode::Kind::full;
    }
    if (o.wave) {
        if (*o.wave != "travelling" && *o.wave != "standing")
            throw ValidationError("--wave must be travelling or standing");
        cfg.wave = *o.wave == "travelling" ? WaveConfig::travelling
                                           : WaveConfig::standing;
    }
    if (o.basis) {
        if (*o.basis != "phase" && *o.basis != "position")
            throw ValidationError("--basis must be phase or position");
        cfg.basis = *o.basis == "phase" ? BasisKind::phase : BasisKind::position;
    }
    if (o.eta) cfg.trap.eta = *o.eta;
    if (o.q) cfg.q = *o.q;
    if (o.N) cfg.recipe.N = *o.N;
    if (o.trials) cfg.trials = *o.trials;
    if (o.recipe) {
        if (*o.recipe == "phase_state")
            cfg.recipe.kind = StateRecipe::Kind::phase_state;
        else if (*o.recipe == "coherent")
            cfg.recipe.kind = StateRecipe::Kind::coherent;
        else if (*o.recipe == "cat")
            cfg.recipe.kind = StateRecipe::Kind::cat;
        else
            throw ValidationError(
                "--recipe must be phase_state, coherent or cat");
    }
    if (o.phi) cfg.recipe.phi = *o.phi;
    if (o.alpha) cfg.recipe.alpha = Complex(*o.alpha, 0.0);
    return cfg;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoi(item));
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ionscope: trapped-ion motional-state synthesis and "
                 "sequential filtering measurement simulator"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string schedule_out;
    bool gnuplot = false;
    std::string grid_eta, grid_q, grid_N, grid_wave;
    std::string records_out;

    CLI::App* synth = app.add_subcommand(
        "synthesize", "compile a recipe and report synthesis fidelities");
    add_shared_flags(synth, opt);
    synth->add_option("--emit-schedule", schedule_out,
                      "also write the compiled schedule JSON here");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "synthesis fidelity over a parameter grid");
    add_shared_flags(sweep, opt);
    sweep->add_option("--grid-eta", grid_eta, "comma list of eta values");
    sweep->add_option("--grid-q", grid_q, "comma list of q values");
    sweep->add_option("--grid-N", grid_N, "comma list of N values");
    sweep->add_option("--grid-wave", grid_wave,
                      "comma list of wave configs");
    sweep->add_flag("--gnuplot", gnuplot, "emit a companion gnuplot script");

    CLI::App* measure = app.add_subcommand(
        "measure", "Monte Carlo measurement histogram");
    add_shared_flags(measure, opt);
    measure->add_option("--records", records_out,
                        "write per-trial records (JSON lines) here");
    measure->add_flag("--gnuplot", gnuplot, "emit a companion gnuplot script");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "reference-value dumps for fixtures");
    int o_n = 0, o_m = 0, o_N = 8;
    double o_eta = 0.5;
    std::string o_kind = "vertical", o_basis = "phase", o_out;
    std::uint64_t o_seed = 1;
    CLI::App* o_rabi = oracle->add_subcommand("rabi", "effective Rabi frequency");
    o_rabi->add_option("--n", o_n, "Fock level");
    o_rabi->add_option("--eta", o_eta, "Lamb-Dicke parameter");
    o_rabi->add_option("--kind", o_kind, "vertical|diagonal");
    o_rabi->add_option("--out", o_out, "output path");
    CLI::App* o_disp =
        oracle->add_subcommand("displacement", "displacement matrix element");
    o_disp->add_option("--n", o_n, "row Fock level");
    o_disp->add_option("--m", o_m, "column Fock level");
    o_disp->add_option("--eta", o_eta, "Lamb-Dicke parameter");
    o_disp->add_option("--out", o_out, "output path");
    CLI::App* o_pos =
        oracle->add_subcommand("position-eigs", "position eigenvalues");
    o_pos->add_option("--N", o_N, "basis size N");
    o_pos->add_option("--out", o_out, "output path");
    CLI::App* o_proto = oracle->add_subcommand(
        "protocol", "sequential-protocol distribution for a random state");
    o_proto->add_option("--N", o_N, "basis size N");
    o_proto->add_option("--basis", o_basis, "phase|position");
    o_proto->add_option("--seed", o_seed, "random-state seed");
    o_proto->add_option("--out", o_out, "output path");
    oracle->require_subcommand(1);

    CLI::App* bases = app.add_subcommand("bases", "export a measurement basis");
    add_shared_flags(bases, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) {
            ExperimentConfig cfg = build_config(opt);
            const SynthesisRow row = run_synthesis_point(cfg);
            emit(synthesis_csv({row}), cfg.out);
            if (!schedule_out.empty()) {
                const auto coeffs = realize(cfg.recipe);
                write_file(schedule_out, schedule_to_json(compile(
                                             coeffs, cfg.trap, cfg.q, cfg.wave)));
            }
        } else if (sweep->parsed()) {
            ExperimentConfig cfg = build_config(opt);
            SweepGrid grid;
            if (!opt.config_path.empty())
                grid = grid_from_json(read_file(opt.config_path));
            if (!grid_eta.empty()) grid.eta = parse_double_list(grid_eta);
            if (!grid_q.empty()) grid.q = parse_double_list(grid_q);
            if (!grid_N.empty()) grid.N = parse_int_list(grid_N);
            if (!grid_wave.empty()) {
                grid.wave.clear();
                std::stringstream ss(grid_wave);
                std::string w;
                while (std::getline(ss, w, ',')) {
                    if (w != "travelling" && w != "standing")
                        throw ValidationError("--grid-wave entries must be "
                                              "travelling or standing");
                    grid.wave.push_back(w == "travelling"
                                            ? WaveConfig::travelling
                                            : WaveConfig::standing);
                }
            }
            const auto rows = run_sweep(cfg, grid);
            emit(synthesis_csv(rows), cfg.out);
            if (gnuplot && !cfg.out.empty())
                write_file(cfg.out + ".gp", gnuplot_script(cfg.out, false));
        } else if (measure->parsed()) {
            ExperimentConfig cfg = build_config(opt);
            const MeasureOutput out = run_measure(cfg);
            emit(out.histogram_csv, cfg.out);
            if (!records_out.empty())
                write_file(records_out, out.records_jsonl);
            if (gnuplot && !cfg.out.empty())
                write_file(cfg.out + ".gp", gnuplot_script(cfg.out, true));
        } else if (oracle->parsed()) {
            std::string dump;
            if (o_rabi->parsed()) {
                if (o_kind != "vertical" && o_kind != "diagonal")
                    throw ValidationError("--kind must be vertical or diagonal");
                dump = oracle_rabi_json(o_n, o_eta,
                                        o_kind == "vertical"
                                            ? PulseKind::vertical
                                            : PulseKind::diagonal);
            } else if (o_disp->parsed()) {
                dump = oracle_displacement_json(o_n, o_m, o_eta);
            } else if (o_pos->parsed()) {
                dump = oracle_position_eigs_json(o_N);
            } else if (o_proto->parsed()) {
                if (o_basis != "phase" && o_basis != "position")
                    throw ValidationError("--basis must be phase or position");
                dump = oracle_protocol_json(o_N,
                                            o_basis == "phase"
                                                ? BasisKind::phase
                                                : BasisKind::position,
                                            o_seed);
            }
            emit(dump + "\n", o_out);
        } else if (bases->parsed()) {
            ExperimentConfig cfg = build_config(opt);
            const auto coeffs = realize(cfg.recipe);
            const int N = opt.N ? *opt.N
                                : static_cast<int>(coeffs.size()) - 1;
            const ObservableBasis basis = make_basis(cfg.basis, N);
            emit(basis_to_json(basis, to_string(cfg.basis)) + "\n", cfg.out);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
