#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gpg/variation.hpp"

namespace gpg {

// Flat key-value configuration shared by the run and bench commands.
struct RunConfig {
    std::string operators = "T11";
    int depth = 3;
    VariantConfig variant;
    std::string problem;
    std::string csv_path;
    std::string combine; // "a,b" of two builtin names
    uint64_t budget = 5'000'000;
    std::vector<uint64_t> checkpoints;
    std::vector<uint64_t> seeds;
    std::string out;
    size_t rows = 10'000;
    int base_population = 64;
    bool use_constants = true;
    bool arith_bool_constraint = true;
    int jobs = 1;
    std::vector<std::string> bench_configs;  // labels, or "all"
    std::vector<std::string> bench_problems; // names or @d3 / @disc3 style groups
};

std::vector<uint64_t> default_checkpoints();

// Parses `path` (empty string for defaults only), then applies overrides in
// order. Unknown keys and malformed values raise errors naming the key.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});

// validation shared by file values and flag overrides; throws on bad input
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);
void validate(const RunConfig& cfg);

std::vector<uint64_t> parse_seed_list(const std::string& text);

} // namespace gpg
