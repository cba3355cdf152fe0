#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ionscope/measurement.hpp"

namespace ionscope {

enum class BasisKind { phase, position };
std::string to_string(BasisKind b);

/// One experiment: which state, which observable, how the protocol runs.
/// JSON-serializable; parse(serialize(c)) == c.
struct ExperimentConfig {
    StateRecipe recipe;
    BasisKind basis = BasisKind::phase;
    ProtocolMode mode;
    TrapParams trap;
    double q = 0.1;
    WaveConfig wave = WaveConfig::travelling;
    int trials = 1000;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;

    void validate() const;
};

std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

/// Grid for sweep runs; empty axes fall back to the base config value.
struct SweepGrid {
    std::vector<int> N;
    std::vector<double> q;
    std::vector<double> eta;
    std::vector<WaveConfig> wave;
};

SweepGrid grid_from_json(const std::string& text);

/// Synthesis fidelity report for one parameter point: compiles the recipe,
/// evolves |g,0> under the ideal and the full Hamiltonian, reports both
/// fidelities and the dimensionless schedule time nu t / 2 pi.
struct SynthesisRow {
    std::string recipe_label;
    int N = 0;
    double eta = 0.0;
    double q = 0.0;
    WaveConfig wave = WaveConfig::travelling;
    int pulses = 0;
    double fidelity_ideal = 0.0;
    double fidelity_full = 0.0;
    double nu_t_over_2pi = 0.0;
    double norm_drift = 0.0;
    double leakage = 0.0;
};

SynthesisRow run_synthesis_point(const ExperimentConfig& cfg);

extern const char* kSynthesisCsvHeader;
std::string synthesis_csv(const std::vector<SynthesisRow>& rows);

/// Cartesian-product sweep, parallel over points, rows in deterministic
/// grid order (N, q, eta, wave; innermost last).
std::vector<SynthesisRow> run_sweep(const ExperimentConfig& base,
                                    const SweepGrid& grid);

/// Measurement run: histogram rows pair the empirical counts with the exact
/// Born probabilities.
struct MeasureOutput {
    std::string histogram_csv; // k, a_k, count, exact_P_k
    std::string records_jsonl; // one MeasurementRecord per line
    TrialsResult result;
    std::vector<double> exact;
};

extern const char* kHistogramCsvHeader;
MeasureOutput run_measure(const ExperimentConfig& cfg);

/// Haar-uniform random state coefficients (Box-Muller over SplitMix64).
std::vector<Complex> random_coefficients(int N, std::uint64_t seed);

/// Reference-value dumps for test fixtures; versioned JSON.
std::string oracle_rabi_json(int n, double eta, PulseKind kind);
std::string oracle_displacement_json(int n, int m, double eta);
std::string oracle_position_eigs_json(int N);
std::string oracle_protocol_json(int N, BasisKind basis, std::uint64_t seed);

std::string format_double(double v); // 17 significant digits
ObservableBasis make_basis(BasisKind kind, int N);

/// Companion gnuplot script plotting the named CSV.
std::string gnuplot_script(const std::string& csv_path, bool histogram);

void write_file(const std::string& path, const std::string& content);

} // namespace ionscope
