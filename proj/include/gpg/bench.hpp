#pragma once

#include <string>
#include <vector>

#include "gpg/evolution.hpp"
#include "gpg/problems.hpp"
#include "gpg/stats.hpp"
#include "gpg/variation.hpp"

namespace gpg {

// One experiment matrix: every configuration runs every problem with every
// seed under the same budget and checkpoint list.
struct BenchSetup {
    std::vector<VariantConfig> configs;
    std::vector<ProblemSpec> problems;
    std::vector<uint64_t> seeds;
    std::string operators = "T11";
    int depth = 3;
    uint64_t budget = 5'000'000;
    std::vector<uint64_t> checkpoints;
    int base_population = kImsBasePopulation;
    size_t dataset_rows = 10'000;
    double train_fraction = 0.75;
    bool use_constants = true;
    bool arith_bool_constraint = true;
    int jobs = 1;
};

// dataset generation and split are keyed on the problem alone, so every
// configuration and seed sees identical data
std::pair<Dataset, Dataset> problem_data(const ProblemSpec& spec, size_t rows,
                                         double train_fraction);

// operator set for one problem: builtins plus the problem's variables and,
// optionally, the ephemeral constant
OperatorSet opset_for_problem(const std::string& operators, const ProblemSpec& spec,
                              bool use_constants, bool arith_bool_constraint);

RunRecord run_single(const BenchSetup& setup, const VariantConfig& cfg, const ProblemSpec& spec,
                     const Dataset& train, const Dataset& test, uint64_t seed);

// Runs the full matrix, streaming each record to `out_dir` as it completes.
// Existing (config, problem, seed) files are loaded instead of re-run.
std::vector<RunRecord> run_matrix(const BenchSetup& setup, const std::string& out_dir);

std::vector<RunRecord> load_all_records(const std::string& dir);

struct MedianRow {
    std::string config;
    std::string problem;
    uint64_t fe_threshold = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double train_r2 = 0.0;
    double test_r2 = 0.0;
};

// median over seeds per (config, problem, checkpoint), lower-median convention
std::vector<MedianRow> aggregate_median(const std::vector<RunRecord>& records);

struct BenchReport {
    std::vector<std::string> configs;
    std::vector<std::string> problems;
    std::vector<uint64_t> checkpoints;
    std::vector<MedianRow> medians;
    // per config at the final checkpoint: mean of per-problem median test R2
    std::vector<MeanCi> mean_of_medians;
    FriedmanResult friedman; // over test R2 at the final checkpoint
};

BenchReport build_report(const std::vector<RunRecord>& records);

// writes medians.csv, summary.json and cd_diagram.svg
void emit_report(const BenchReport& report, const std::string& out_dir);

} // namespace gpg
