#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gpg {

// Elite metrics captured when the evaluation count crosses a threshold.
struct CheckpointRecord {
    uint64_t fe_threshold = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double train_r2 = 0.0;
    double test_r2 = 0.0;
    std::string expression;
};

// One (configuration, problem, seed) trace.
struct RunRecord {
    std::string config;
    std::string problem;
    std::string operators;
    int depth = 0;
    uint64_t seed = 0;
    uint64_t budget = 0;
    uint64_t total_fes = 0;
    std::vector<int> population_sizes; // IMS populations created, in creation order
    std::vector<CheckpointRecord> checkpoints;
};

std::string run_record_to_json(const RunRecord& rec);
RunRecord run_record_from_json(const std::string& text);

void save_run_record(const RunRecord& rec, const std::string& path);
RunRecord load_run_record(const std::string& path);

} // namespace gpg
