#include "gpg/records.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gpg {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json checkpoint_to_json(const CheckpointRecord& c) {
    ordered_json j;
    j["fe"] = c.fe_threshold;
    j["train_mse"] = c.train_mse;
    j["test_mse"] = c.test_mse;
    j["train_r2"] = c.train_r2;
    j["test_r2"] = c.test_r2;
    j["expression"] = c.expression;
    return j;
}

CheckpointRecord checkpoint_from_json(const ordered_json& j) {
    CheckpointRecord c;
    c.fe_threshold = j.at("fe").get<uint64_t>();
    c.train_mse = j.at("train_mse").get<double>();
    c.test_mse = j.at("test_mse").get<double>();
    c.train_r2 = j.at("train_r2").get<double>();
    c.test_r2 = j.at("test_r2").get<double>();
    c.expression = j.at("expression").get<std::string>();
    return c;
}

} // namespace

std::string run_record_to_json(const RunRecord& rec) {
    ordered_json j;
    j["config"] = rec.config;
    j["problem"] = rec.problem;
    j["operators"] = rec.operators;
    j["depth"] = rec.depth;
    j["seed"] = rec.seed;
    j["budget"] = rec.budget;
    j["total_fes"] = rec.total_fes;
    j["population_sizes"] = rec.population_sizes;
    j["checkpoints"] = ordered_json::array();
    for (const auto& c : rec.checkpoints) j["checkpoints"].push_back(checkpoint_to_json(c));
    return j.dump(2) + "\n";
}

RunRecord run_record_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    RunRecord rec;
    rec.config = j.at("config").get<std::string>();
    rec.problem = j.at("problem").get<std::string>();
    rec.operators = j.at("operators").get<std::string>();
    rec.depth = j.at("depth").get<int>();
    rec.seed = j.at("seed").get<uint64_t>();
    rec.budget = j.at("budget").get<uint64_t>();
    rec.total_fes = j.at("total_fes").get<uint64_t>();
    rec.population_sizes = j.at("population_sizes").get<std::vector<int>>();
    for (const auto& cj : j.at("checkpoints")) rec.checkpoints.push_back(checkpoint_from_json(cj));
    return rec;
}

void save_run_record(const RunRecord& rec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write record file: " + path);
    out << run_record_to_json(rec);
    if (!out) throw std::runtime_error("write failed: " + path);
}

RunRecord load_run_record(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read record file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return run_record_from_json(text);
    } catch (const std::exception& e) {
        throw std::runtime_error("malformed record file " + path + ": " + e.what());
    }
}

} // namespace gpg
