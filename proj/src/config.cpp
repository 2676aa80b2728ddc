#include "gpg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "gpg/symbols.hpp"

namespace gpg {

std::vector<uint64_t> default_checkpoints() {
    return {100, 500, 1'000, 5'000, 10'000, 50'000, 100'000, 500'000, 1'000'000, 5'000'000};
}

namespace {

std::string trim(const std::string& s) {
    size_t a = 0;
    size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

uint64_t parse_u64(const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(trim(text), &used);
        if (used != trim(text).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': expected integer, got '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "on" || t == "1") return true;
    if (t == "false" || t == "off" || t == "0") return false;
    throw std::runtime_error("config key '" + key + "': expected true/false, got '" + text + "'");
}

} // namespace

std::vector<uint64_t> parse_seed_list(const std::string& text) {
    std::vector<uint64_t> seeds;
    for (const auto& part : split_list(text)) {
        const size_t dots = part.find("..");
        if (dots == std::string::npos) {
            seeds.push_back(parse_u64("seeds", part));
        } else {
            const uint64_t lo = parse_u64("seeds", part.substr(0, dots));
            const uint64_t hi = parse_u64("seeds", part.substr(dots + 2));
            if (hi < lo) throw std::runtime_error("config key 'seeds': range " + part + " is empty");
            for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        }
    }
    if (seeds.empty()) throw std::runtime_error("config key 'seeds': no seeds given");
    return seeds;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "operators") {
        operator_set_from_spec(trim(value)); // validates both set names and symbol lists
        cfg.operators = trim(value);
    } else if (key == "depth") {
        cfg.depth = static_cast<int>(parse_u64(key, value));
    } else if (key == "gcs") {
        cfg.variant.gcs = parse_gcs(trim(value));
    } else if (key == "ssi") {
        cfg.variant.ssi_enabled = parse_bool(key, value);
    } else if (key == "problem") {
        cfg.problem = trim(value);
    } else if (key == "csv") {
        cfg.csv_path = trim(value);
    } else if (key == "combine") {
        cfg.combine = trim(value);
    } else if (key == "budget") {
        cfg.budget = parse_u64(key, value);
    } else if (key == "checkpoints") {
        cfg.checkpoints.clear();
        for (const auto& part : split_list(value)) cfg.checkpoints.push_back(parse_u64(key, part));
    } else if (key == "seeds") {
        cfg.seeds = parse_seed_list(value);
    } else if (key == "seed") {
        cfg.seeds = {parse_u64(key, value)};
    } else if (key == "out") {
        cfg.out = trim(value);
    } else if (key == "rows") {
        cfg.rows = parse_u64(key, value);
    } else if (key == "pop") {
        cfg.base_population = static_cast<int>(parse_u64(key, value));
    } else if (key == "constants") {
        cfg.use_constants = parse_bool(key, value);
    } else if (key == "arith_bool_constraint") {
        cfg.arith_bool_constraint = parse_bool(key, value);
    } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_u64(key, value));
    } else if (key == "configs") {
        cfg.bench_configs = split_list(value);
    } else if (key == "problems") {
        cfg.bench_problems = split_list(value);
    } else {
        throw std::runtime_error("unknown config key: '" + key + "'");
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.depth < 1) throw std::runtime_error("config key 'depth': must be >= 1");
    if (cfg.budget == 0) throw std::runtime_error("config key 'budget': must be positive");
    if (cfg.base_population < 1) throw std::runtime_error("config key 'pop': must be >= 1");
    if (cfg.rows < 4) throw std::runtime_error("config key 'rows': must be >= 4");
    if (!std::is_sorted(cfg.checkpoints.begin(), cfg.checkpoints.end()))
        throw std::runtime_error("config key 'checkpoints': must be sorted ascending");
    for (uint64_t c : cfg.checkpoints)
        if (c > cfg.budget)
            throw std::runtime_error("config key 'checkpoints': " + std::to_string(c) +
                                     " exceeds the budget");
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    cfg.seeds = parse_seed_list("0..19");
    bool explicit_checkpoints = false;

    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '#') continue;
            const size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected key = value");
            const std::string key = trim(t.substr(0, eq));
            const std::string value = trim(t.substr(eq + 1));
            apply_key(cfg, key, value);
            if (key == "checkpoints") explicit_checkpoints = true;
        }
    }
    for (const auto& [key, value] : overrides) {
        apply_key(cfg, key, value);
        if (key == "checkpoints") explicit_checkpoints = true;
    }

    if (cfg.checkpoints.empty() && !explicit_checkpoints) {
        // default list clipped to the budget
        for (uint64_t c : default_checkpoints())
            if (c <= cfg.budget) cfg.checkpoints.push_back(c);
        if (cfg.checkpoints.empty() || cfg.checkpoints.back() != cfg.budget)
            cfg.checkpoints.push_back(cfg.budget);
    }
    validate(cfg);
    return cfg;
}

} // namespace gpg
