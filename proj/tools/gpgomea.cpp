#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gpg/bench.hpp"
#include "gpg/config.hpp"
#include "gpg/evolution.hpp"
#include "gpg/problems.hpp"
#include "gpg/records.hpp"

namespace {

using namespace gpg;

// flags that were actually given become config overrides, so that flag >
// file > default
struct FlagCapture {
    CLI::App* cmd;
    std::vector<std::pair<std::string, std::string>>* overrides;
    std::vector<std::pair<std::string, std::string*>> bound;

    void add(const std::string& key, std::string* storage, const std::string& description) {
        cmd->add_option("--" + key, *storage, description);
        bound.emplace_back(key, storage);
    }

    void collect() {
        for (const auto& [key, storage] : bound)
            if (cmd->count("--" + key) > 0) overrides->emplace_back(key, *storage);
    }
};

OperatorSet opset_for_dataset(const RunConfig& cfg, const Dataset& train) {
    OperatorSet opset = operator_set_from_spec(cfg.operators);
    for (size_t v = 0; v < train.vars(); ++v)
        opset.add_variable(static_cast<int>(v), train.var_types[v]);
    if (cfg.use_constants) opset.add_constant();
    opset.arithmetic_boolean_constraint_enabled = cfg.arith_bool_constraint;
    return opset;
}

std::pair<Dataset, Dataset> resolve_data(const RunConfig& cfg) {
    if (!cfg.csv_path.empty()) {
        const Dataset full = load_csv(cfg.csv_path);
        Rng split_rng(Rng::derive_seed(stable_hash(cfg.csv_path), 2));
        return split(full, 0.75, split_rng);
    }
    ProblemSpec spec;
    if (!cfg.combine.empty()) {
        const size_t comma = cfg.combine.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("--combine expects two problem names: a,b");
        spec = combine_discontinuous(builtin_problem(cfg.combine.substr(0, comma)),
                                     builtin_problem(cfg.combine.substr(comma + 1)));
    } else if (!cfg.problem.empty()) {
        spec = builtin_problem(cfg.problem);
    } else {
        throw std::runtime_error("no problem selected: use --problem, --combine or --csv");
    }
    return problem_data(spec, cfg.rows, 0.75);
}

int cmd_run(const RunConfig& cfg) {
    const auto [train, test] = resolve_data(cfg);
    const OperatorSet opset = opset_for_dataset(cfg, train);
    const TreeTemplate tmpl(cfg.depth, opset.branching_factor());
    const uint64_t seed = cfg.seeds.front();

    EvalBudget budget(cfg.budget, cfg.checkpoints);
    RunRecord rec =
        run_ims(cfg.variant, tmpl, opset, train, test, budget, seed, cfg.base_population);
    rec.operators = cfg.operators;

    const std::string json = run_record_to_json(rec);
    if (cfg.out.empty()) {
        std::cout << json;
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.out);
        out << json;
        if (!out) throw std::runtime_error("write failed: " + cfg.out);
    }
    if (!rec.checkpoints.empty()) {
        const auto& last = rec.checkpoints.back();
        std::cerr << rec.config << " on " << rec.problem << " seed " << seed << ": test R2 "
                  << last.test_r2 << " after " << rec.total_fes << " evaluations\n";
    }
    return 0;
}

std::vector<ProblemSpec> resolve_bench_problems(const std::vector<std::string>& tokens) {
    std::vector<ProblemSpec> out;
    for (const auto& tok : tokens) {
        if (tok.rfind("@disc", 0) == 0) {
            for (const auto& p : discontinuous_problems_at_depth(std::stoi(tok.substr(5))))
                out.push_back(p);
        } else if (tok.rfind("@d", 0) == 0) {
            for (const auto& p : builtin_problems_at_depth(std::stoi(tok.substr(2))))
                out.push_back(p);
        } else {
            out.push_back(builtin_problem(tok));
        }
    }
    if (out.empty()) throw std::runtime_error("bench: no problems selected (key 'problems')");
    return out;
}

std::vector<VariantConfig> resolve_bench_configs(const std::vector<std::string>& tokens,
                                                 int branching) {
    if (tokens.size() == 1 && tokens.front() == "all") return enumerate_variants(branching);
    std::vector<VariantConfig> out;
    for (const auto& tok : tokens) out.push_back(variant_from_label(tok));
    if (out.empty()) throw std::runtime_error("bench: no configurations selected (key 'configs')");
    return out;
}

void print_friedman(const BenchReport& report) {
    if (report.friedman.mean_ranks.empty()) {
        std::cout << "not enough configurations/problems for the Friedman test\n";
        return;
    }
    std::cout << "Friedman chi2 = " << report.friedman.chi2
              << ", p ~ " << report.friedman.p_approx
              << ", Nemenyi CD = " << report.friedman.critical_distance << "\n";
    for (size_t i = 0; i < report.configs.size(); ++i)
        std::cout << "  " << report.configs[i] << ": mean rank " << report.friedman.mean_ranks[i]
                  << ", mean test R2 " << report.mean_of_medians[i].mean << " +- "
                  << report.mean_of_medians[i].ci_half_width << "\n";
}

int cmd_bench(const RunConfig& cfg, const std::string& out_dir) {
    BenchSetup setup;
    setup.operators = cfg.operators;
    setup.depth = cfg.depth;
    setup.budget = cfg.budget;
    setup.checkpoints = cfg.checkpoints;
    setup.seeds = cfg.seeds;
    setup.base_population = cfg.base_population;
    setup.dataset_rows = cfg.rows;
    setup.use_constants = cfg.use_constants;
    setup.arith_bool_constraint = cfg.arith_bool_constraint;
    setup.jobs = cfg.jobs;
    setup.problems = resolve_bench_problems(cfg.bench_problems);
    const OperatorSet probe = operator_set_from_spec(cfg.operators);
    setup.configs = resolve_bench_configs(cfg.bench_configs, probe.branching_factor());

    const auto records = run_matrix(setup, out_dir);
    const BenchReport report = build_report(records);
    emit_report(report, out_dir);
    print_friedman(report);
    return 0;
}

int cmd_stats(const std::string& in_dir, const std::string& out_dir) {
    const auto records = load_all_records(in_dir);
    if (records.empty()) throw std::runtime_error("no records found in " + in_dir);
    const BenchReport report = build_report(records);
    emit_report(report, out_dir.empty() ? in_dir : out_dir);
    print_friedman(report);
    return 0;
}

int cmd_show(const std::string& path) {
    const RunRecord rec = load_run_record(path);
    std::cout << "config:    " << rec.config << "\n";
    std::cout << "problem:   " << rec.problem << "\n";
    std::cout << "operators: " << rec.operators << " (depth " << rec.depth << ")\n";
    std::cout << "seed:      " << rec.seed << "\n";
    std::cout << "budget:    " << rec.budget << " (used " << rec.total_fes << ")\n";
    std::cout << "populations:";
    for (int s : rec.population_sizes) std::cout << " " << s;
    std::cout << "\n";
    for (const auto& c : rec.checkpoints) {
        std::printf("  fe %10llu  train_mse %.6g  test_mse %.6g  train_r2 %.6g  test_r2 %.6g\n",
                    static_cast<unsigned long long>(c.fe_threshold), c.train_mse, c.test_mse,
                    c.train_r2, c.test_r2);
    }
    if (!rec.checkpoints.empty())
        std::cout << "elite: " << rec.checkpoints.back().expression << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GP-GOMEA symbolic regression with semantic subtree inheritance and greedy "
                 "child selection"};
    app.require_subcommand(1);

    std::vector<std::pair<std::string, std::string>> overrides;
    std::string config_path;

    // run
    auto* run = app.add_subcommand("run", "single run, JSON record output");
    run->add_option("--config", config_path, "key = value config file");
    std::string s_problem, s_csv, s_combine, s_operators, s_depth, s_gcs, s_ssi, s_budget, s_seed,
        s_checkpoints, s_out, s_rows, s_pop, s_constants, s_constraint;
    FlagCapture run_flags{run, &overrides, {}};
    run_flags.add("problem", &s_problem, "built-in problem name");
    run_flags.add("csv", &s_csv, "CSV dataset (header row, last column = target)");
    run_flags.add("combine", &s_combine, "two built-in names a,b for a gated problem");
    run_flags.add("operators", &s_operators, "T22|T11|B15|B9|B4 or a symbol list");
    run_flags.add("depth", &s_depth, "template depth");
    run_flags.add("gcs", &s_gcs, "off|1|1+|2|2+|3|3+");
    run_flags.add("ssi", &s_ssi, "true|false");
    run_flags.add("budget", &s_budget, "function-evaluation cap");
    run_flags.add("seed", &s_seed, "run seed");
    run_flags.add("checkpoints", &s_checkpoints, "comma-separated thresholds");
    run_flags.add("out", &s_out, "output record path (default: stdout)");
    run_flags.add("rows", &s_rows, "generated dataset size");
    run_flags.add("pop", &s_pop, "base population size");
    run_flags.add("constants", &s_constants, "include ephemeral constants");
    run_flags.add("arith_bool_constraint", &s_constraint, "numeric-input constraint on/off");

    // bench
    auto* bench = app.add_subcommand("bench", "configuration matrix with streamed records");
    std::string matrix_path, bench_out = "bench_out", s_jobs;
    bench->add_option("--matrix", matrix_path, "matrix config file")->required();
    bench->add_option("--out", bench_out, "output directory");
    FlagCapture bench_flags{bench, &overrides, {}};
    bench_flags.add("jobs", &s_jobs, "parallel worker count");

    // stats
    auto* stats = app.add_subcommand("stats", "recompute statistics from stored records");
    std::string stats_in, stats_out;
    stats->add_option("--in", stats_in, "directory of run records")->required();
    stats->add_option("--out", stats_out, "report directory (default: --in)");

    // show
    auto* show = app.add_subcommand("show", "human-readable view of one record");
    std::string show_path;
    show->add_option("record", show_path, "run record JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            run_flags.collect();
            return cmd_run(parse_config(config_path, overrides));
        }
        if (bench->parsed()) {
            bench_flags.collect();
            return cmd_bench(parse_config(matrix_path, overrides), bench_out);
        }
        if (stats->parsed()) return cmd_stats(stats_in, stats_out);
        if (show->parsed()) return cmd_show(show_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
