#pragma once

#include <optional>
#include <string>
#include <vector>

#include "akd/config.hpp"
#include "akd/loop.hpp"

namespace akd {

inline constexpr const char* kToolVersion = "0.1.0";

// Builds the train/test pair described by the config. Synthetic data draws
// train and test from the same mixture (shared component means).
std::pair<Dataset, Dataset> make_datasets(const ExperimentConfig& config);

// The standard synthetic benchmark (mirrors configs/benchmark.conf): the
// fixed setup behind the qualitative reproduction checks.
ExperimentConfig standard_benchmark_config();

// Teacher described by the config; validated against the training set.
Teacher make_teacher(const ExperimentConfig& config, const Dataset& train_set);

struct CellOutcome {
    std::string strategy;
    std::string framework;
    std::uint64_t seed = 0;
    std::string csv_path;  // relative to the output dir
    bool ok = false;
    std::string error;
    double elapsed_ms = 0.0;
    ExperimentResult result;  // empty when !ok
};

// Runs the strategy x framework x seed grid in memory (no files); cells that
// throw are reported, the rest continue.
std::vector<CellOutcome> run_grid(const ExperimentConfig& config, int workers);

struct RunOutput {
    std::string manifest_path;
    std::string summary_path;
    std::vector<CellOutcome> cells;
    bool all_ok = true;
};

// Full run: grid + per-cell round-log CSVs + summary CSV + JSON manifest under
// config.output_dir. Round-log bytes depend only on the config; timestamps
// and wall times live in the manifest alone.
RunOutput run(const ExperimentConfig& config);

// Long-format (round, strategy, framework, seed, metric, value) CSV for one
// metric family; values are copied verbatim from the round logs.
std::string export_plotdata(const std::string& manifest_path, const std::string& kind,
                            const std::string& out_dir = "");

// round-log CSV column order, frozen for golden-file comparisons
const std::vector<std::string>& round_csv_columns();

void write_round_csv(const std::string& path, const std::vector<RoundLog>& rounds);
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// mean and 95% normal-approximation CI half-width (n-1 variance)
std::pair<double, double> mean_ci95(const std::vector<double>& values);

}  // namespace akd
