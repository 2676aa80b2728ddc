#include "gpg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace fs = std::filesystem;

namespace gpg {

std::pair<Dataset, Dataset> problem_data(const ProblemSpec& spec, size_t rows,
                                         double train_fraction) {
    Rng data_rng(Rng::derive_seed(stable_hash(spec.name), 1));
    const Dataset full = generate(spec, rows, data_rng);
    Rng split_rng(Rng::derive_seed(stable_hash(spec.name), 2));
    return split(full, train_fraction, split_rng);
}

OperatorSet opset_for_problem(const std::string& operators, const ProblemSpec& spec,
                              bool use_constants, bool arith_bool_constraint) {
    OperatorSet opset = operator_set_from_spec(operators);
    for (int v = 0; v < spec.n_vars; ++v)
        opset.add_variable(v, spec.var_types[static_cast<size_t>(v)]);
    if (use_constants) opset.add_constant();
    opset.arithmetic_boolean_constraint_enabled = arith_bool_constraint;
    return opset;
}

RunRecord run_single(const BenchSetup& setup, const VariantConfig& cfg, const ProblemSpec& spec,
                     const Dataset& train, const Dataset& test, uint64_t seed) {
    const OperatorSet opset = opset_for_problem(setup.operators, spec, setup.use_constants,
                                                setup.arith_bool_constraint);
    const TreeTemplate tmpl(setup.depth, opset.branching_factor());
    EvalBudget budget(setup.budget, setup.checkpoints);
    RunRecord rec = run_ims(cfg, tmpl, opset, train, test, budget, seed, setup.base_population);
    rec.operators = setup.operators;
    return rec;
}

namespace {

std::string record_filename(const std::string& config, const std::string& problem,
                            uint64_t seed) {
    return config + "__" + problem + "__s" + std::to_string(seed) + ".json";
}

struct Task {
    size_t config_index;
    size_t problem_index;
    uint64_t seed;
};

} // namespace

std::vector<RunRecord> run_matrix(const BenchSetup& setup, const std::string& out_dir) {
    if (setup.configs.empty() || setup.problems.empty() || setup.seeds.empty())
        throw std::invalid_argument("run_matrix: configs, problems and seeds must be non-empty");
    fs::create_directories(out_dir);

    // one dataset per problem, shared by all configurations and seeds
    std::vector<std::pair<Dataset, Dataset>> data;
    data.reserve(setup.problems.size());
    for (const auto& spec : setup.problems)
        data.push_back(problem_data(spec, setup.dataset_rows, setup.train_fraction));

    std::vector<Task> tasks;
    for (size_t c = 0; c < setup.configs.size(); ++c)
        for (size_t p = 0; p < setup.problems.size(); ++p)
            for (uint64_t seed : setup.seeds) tasks.push_back({c, p, seed});

    std::vector<RunRecord> records(tasks.size());
    std::atomic<size_t> next{0};
    std::mutex io_mutex;
    std::string failure;

    auto worker = [&] {
        for (;;) {
            const size_t t = next.fetch_add(1);
            if (t >= tasks.size()) return;
            const Task& task = tasks[t];
            const VariantConfig& cfg = setup.configs[task.config_index];
            const ProblemSpec& spec = setup.problems[task.problem_index];
            const fs::path path =
                fs::path(out_dir) / record_filename(cfg.label(), spec.name, task.seed);
            try {
                if (fs::exists(path)) {
                    records[t] = load_run_record(path.string());
                    continue;
                }
                RunRecord rec = run_single(setup, cfg, spec, data[task.problem_index].first,
                                           data[task.problem_index].second, task.seed);
                {
                    std::lock_guard<std::mutex> lock(io_mutex);
                    save_run_record(rec, path.string());
                }
                records[t] = std::move(rec);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                if (failure.empty())
                    failure = "triple (" + cfg.label() + ", " + spec.name + ", seed " +
                              std::to_string(task.seed) + ") failed: " + e.what();
                next.store(tasks.size()); // stop handing out work
                return;
            }
        }
    };

    const int jobs = std::max(1, setup.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!failure.empty()) throw std::runtime_error(failure);
    return records;
}

std::vector<RunRecord> load_all_records(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        if (entry.path().filename() == "summary.json") continue; // report, not a record
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> out;
    out.reserve(files.size());
    for (const auto& f : files) out.push_back(load_run_record(f.string()));
    return out;
}

std::vector<MedianRow> aggregate_median(const std::vector<RunRecord>& records) {
    std::map<std::tuple<std::string, std::string, uint64_t>, std::vector<const CheckpointRecord*>>
        groups;
    for (const auto& rec : records)
        for (const auto& c : rec.checkpoints)
            groups[{rec.config, rec.problem, c.fe_threshold}].push_back(&c);

    std::vector<MedianRow> out;
    out.reserve(groups.size());
    for (const auto& [key, cps] : groups) {
        MedianRow row;
        row.config = std::get<0>(key);
        row.problem = std::get<1>(key);
        row.fe_threshold = std::get<2>(key);
        auto med = [&](auto getter) {
            std::vector<double> vals;
            vals.reserve(cps.size());
            for (const auto* c : cps) vals.push_back(getter(*c));
            return median_lower(std::move(vals));
        };
        row.train_mse = med([](const CheckpointRecord& c) { return c.train_mse; });
        row.test_mse = med([](const CheckpointRecord& c) { return c.test_mse; });
        row.train_r2 = med([](const CheckpointRecord& c) { return c.train_r2; });
        row.test_r2 = med([](const CheckpointRecord& c) { return c.test_r2; });
        out.push_back(std::move(row));
    }
    return out;
}

namespace {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

} // namespace

BenchReport build_report(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("build_report: no records");
    BenchReport rep;
    {
        std::vector<std::string> configs;
        std::vector<std::string> problems;
        std::vector<uint64_t> checkpoints;
        for (const auto& r : records) {
            configs.push_back(r.config);
            problems.push_back(r.problem);
            for (const auto& c : r.checkpoints) checkpoints.push_back(c.fe_threshold);
        }
        rep.configs = sorted_unique(std::move(configs));
        rep.problems = sorted_unique(std::move(problems));
        rep.checkpoints = sorted_unique(std::move(checkpoints));
    }
    rep.medians = aggregate_median(records);

    const uint64_t final_fe = rep.checkpoints.back();
    auto median_at = [&](const std::string& config, const std::string& problem) {
        for (const auto& row : rep.medians)
            if (row.config == config && row.problem == problem && row.fe_threshold == final_fe)
                return row.test_r2;
        throw std::runtime_error("missing median for " + config + " on " + problem);
    };

    // problems x configs table of final-checkpoint test R2
    std::vector<std::vector<double>> table;
    for (const auto& problem : rep.problems) {
        std::vector<double> row;
        for (const auto& config : rep.configs) row.push_back(median_at(config, problem));
        table.push_back(std::move(row));
    }
    for (const auto& config : rep.configs) {
        std::vector<double> vals;
        for (const auto& problem : rep.problems) vals.push_back(median_at(config, problem));
        rep.mean_of_medians.push_back(mean_with_ci95(vals));
    }
    if (rep.configs.size() >= 2 && rep.problems.size() >= 2)
        rep.friedman = friedman_nemenyi(table, /*higher_is_better=*/true);
    return rep;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_medians_csv(const BenchReport& rep, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "config,problem,fe,train_mse,test_mse,train_r2,test_r2\n";
    for (const auto& row : rep.medians) {
        out << row.config << "," << row.problem << "," << row.fe_threshold << ","
            << fmt(row.train_mse) << "," << fmt(row.test_mse) << "," << fmt(row.train_r2) << ","
            << fmt(row.test_r2) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_summary_json(const BenchReport& rep, const fs::path& path) {
    nlohmann::ordered_json j;
    j["configs"] = rep.configs;
    j["problems"] = rep.problems;
    j["checkpoints"] = rep.checkpoints;
    j["metric"] = "test_r2";
    j["metric_checkpoint"] = rep.checkpoints.back();
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : rep.medians) {
        nlohmann::ordered_json rj;
        rj["config"] = row.config;
        rj["problem"] = row.problem;
        rj["fe"] = row.fe_threshold;
        rj["train_mse"] = row.train_mse;
        rj["test_mse"] = row.test_mse;
        rj["train_r2"] = row.train_r2;
        rj["test_r2"] = row.test_r2;
        rows.push_back(std::move(rj));
    }
    j["medians"] = std::move(rows);
    auto means = nlohmann::ordered_json::array();
    for (size_t i = 0; i < rep.configs.size(); ++i) {
        nlohmann::ordered_json mj;
        mj["config"] = rep.configs[i];
        mj["mean_of_medians"] = rep.mean_of_medians[i].mean;
        mj["ci95_half_width"] = rep.mean_of_medians[i].ci_half_width;
        means.push_back(std::move(mj));
    }
    j["mean_of_medians"] = std::move(means);
    if (!rep.friedman.mean_ranks.empty()) {
        j["friedman"]["chi2"] = rep.friedman.chi2;
        j["friedman"]["p_approx"] = rep.friedman.p_approx;
        j["friedman"]["mean_ranks"] = rep.friedman.mean_ranks;
        j["friedman"]["critical_distance"] = rep.friedman.critical_distance;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Demsar-style critical-difference diagram: configurations on a rank axis,
// thick bars join groups whose mean ranks are within the critical distance.
void write_cd_diagram(const BenchReport& rep, const fs::path& path) {
    const auto& fr = rep.friedman;
    const size_t k = rep.configs.size();
    if (fr.mean_ranks.size() != k) return; // no statistics computed

    std::vector<size_t> order(k);
    for (size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return fr.mean_ranks[a] < fr.mean_ranks[b]; });

    const double width = 640.0;
    const double margin = 60.0;
    const double axis_y = 70.0;
    const double axis_w = width - 2.0 * margin;
    auto x_of = [&](double rank) {
        return margin + (rank - 1.0) / (static_cast<double>(k) - 1.0 + 1e-12) * axis_w;
    };

    // maximal groups of configurations within one critical distance
    std::vector<std::pair<size_t, size_t>> groups;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i;
        while (j + 1 < k &&
               fr.mean_ranks[order[j + 1]] - fr.mean_ranks[order[i]] <= fr.critical_distance)
            ++j;
        if (j > i && (groups.empty() || groups.back().second < j)) groups.emplace_back(i, j);
    }

    const double label_h = 18.0;
    const double height = axis_y + 40.0 + static_cast<double>(groups.size()) * 14.0 +
                          static_cast<double>(k) * label_h + 30.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<text x=\"" << margin << "\" y=\"20\">critical distance = " << fr.critical_distance
        << " (alpha = 0.05)</text>\n";
    // CD ruler
    svg << "<line x1=\"" << x_of(1.0) << "\" y1=\"35\" x2=\"" << x_of(1.0 + fr.critical_distance)
        << "\" y2=\"35\" stroke=\"black\" stroke-width=\"3\"/>\n";
    // rank axis with integer ticks
    svg << "<line x1=\"" << margin << "\" y1=\"" << axis_y << "\" x2=\"" << margin + axis_w
        << "\" y2=\"" << axis_y << "\" stroke=\"black\"/>\n";
    for (size_t r = 1; r <= k; ++r) {
        const double x = x_of(static_cast<double>(r));
        svg << "<line x1=\"" << x << "\" y1=\"" << axis_y - 4 << "\" x2=\"" << x << "\" y2=\""
            << axis_y + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x - 4 << "\" y=\"" << axis_y - 8 << "\">" << r << "</text>\n";
    }
    // non-significance bars
    double bar_y = axis_y + 12.0;
    for (const auto& [i, j] : groups) {
        svg << "<line x1=\"" << x_of(fr.mean_ranks[order[i]]) << "\" y1=\"" << bar_y << "\" x2=\""
            << x_of(fr.mean_ranks[order[j]]) << "\" y2=\"" << bar_y
            << "\" stroke=\"black\" stroke-width=\"4\"/>\n";
        bar_y += 14.0;
    }
    // config labels with connectors to their rank positions
    double label_y = bar_y + 24.0;
    for (size_t idx = 0; idx < k; ++idx) {
        const size_t c = order[idx];
        const double x = x_of(fr.mean_ranks[c]);
        svg << "<line x1=\"" << x << "\" y1=\"" << axis_y << "\" x2=\"" << x << "\" y2=\""
            << label_y - 10.0 << "\" stroke=\"gray\" stroke-dasharray=\"2,2\"/>\n";
        svg << "<text x=\"" << x + 3 << "\" y=\"" << label_y << "\">" << rep.configs[c] << " ("
            << fr.mean_ranks[c] << ")</text>\n";
        label_y += label_h;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << svg.str();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace

void emit_report(const BenchReport& rep, const std::string& out_dir) {
    fs::create_directories(out_dir);
    write_medians_csv(rep, fs::path(out_dir) / "medians.csv");
    write_summary_json(rep, fs::path(out_dir) / "summary.json");
    write_cd_diagram(rep, fs::path(out_dir) / "cd_diagram.svg");
}

} // namespace gpg
