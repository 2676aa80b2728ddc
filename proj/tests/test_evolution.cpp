#include "doctest.h"

#include <cmath>

#include "gpg/bench.hpp"
#include "gpg/evolution.hpp"
#include "gpg/problems.hpp"

using namespace gpg;

namespace {

struct Fixture {
    OperatorSet opset;
    TreeTemplate tmpl;
    Dataset train;
    Dataset test;
    VariantConfig cfg;

    Fixture(const std::string& operators, int depth, const std::string& problem,
            size_t rows = 200)
        : opset(opset_for_problem(operators, builtin_problem(problem), true, true)),
          tmpl(depth, opset.branching_factor()) {
        const ProblemSpec& spec = builtin_problem(problem);
        std::tie(train, test) = problem_data(spec, rows, 0.75);
    }

    EvolutionContext ctx() const { return {cfg, opset, tmpl, train, test}; }
};

PopulationState uniform_population(const Fixture& f, const std::string& prefix, int n,
                                   EvalBudget& budget) {
    PopulationState pop;
    pop.size = n;
    for (int i = 0; i < n; ++i) {
        Individual ind;
        ind.genotype = encode_expression(prefix, f.opset, f.tmpl);
        ind.fit = fitness(ind.genotype, f.opset, f.train, budget);
        pop.individuals.push_back(ind);
        pop.observe(pop.individuals.back());
    }
    return pop;
}

} // namespace

TEST_CASE("convergence detection on the worst 90 percent") {
    PopulationState pop;
    auto with_mses = [&](const std::vector<double>& mses) {
        pop.individuals.assign(mses.size(), Individual{});
        for (size_t i = 0; i < mses.size(); ++i) pop.individuals[i].fit.mse = mses[i];
        pop.size = static_cast<int>(mses.size());
    };

    SUBCASE("all equal fitness converges") {
        with_mses(std::vector<double>(64, 2.5));
        CHECK(converged(pop));
    }
    SUBCASE("one fitter individual among 64 identical ones converges") {
        std::vector<double> mses(64, 1.0);
        mses[0] = 0.25;
        with_mses(mses);
        CHECK(converged(pop)); // ceil(0.9 * 64) = 58 <= 63 identical
    }
    SUBCASE("uniformly spread fitness does not converge") {
        std::vector<double> mses;
        for (int i = 0; i < 64; ++i) mses.push_back(1.0 + 0.1 * i);
        with_mses(mses);
        CHECK(!converged(pop));
    }
    SUBCASE("the margin is relative") {
        std::vector<double> mses(64, 1e9);
        mses[63] = 1e9 + 1.0; // within 1e-8 relative of 1e9
        with_mses(mses);
        CHECK(converged(pop));
    }
    SUBCASE("a worst-sentinel band counts as converged") {
        with_mses(std::vector<double>(16, kWorstMse));
        CHECK(converged(pop));
    }
}

TEST_CASE("restart reinjects exactly one archived elite") {
    Fixture f("B4", 2, "d3_gas");
    EvalBudget budget(100000, {});
    RunRecord rec;
    const EvolutionContext ctx = f.ctx();
    RunMonitor monitor(ctx, budget, rec);
    Rng rng(3);

    PopulationState pop = uniform_population(f, "(+ x1 x2)", 16, budget);
    const Individual elite_before = *pop.elite;
    restart(pop, ctx, budget, rng, monitor);

    CHECK(pop.generation == 0);
    CHECK(pop.elite_archive.size() == 1);
    int matches = 0;
    for (const auto& ind : pop.individuals) {
        if (ind.genotype == elite_before.genotype) ++matches;
        CHECK(check_type_constraints(ind.genotype, f.opset));
    }
    CHECK(matches == 1);
    // elite survives the restart (best-ever of the lineage)
    CHECK(pop.elite->fit.mse <= elite_before.fit.mse);
}

TEST_CASE("generation mechanics") {
    SUBCASE("a population of identical optimal individuals is a fixed point") {
        Fixture f("B4", 3, "d3_gas");
        EvalBudget budget(100000, {});
        RunRecord rec;
        const EvolutionContext ctx = f.ctx();
        RunMonitor monitor(ctx, budget, rec);
        Rng rng(5);
        PopulationState pop = uniform_population(f, "(/ (* (* x1 x2) x3) x4)", 8, budget);
        REQUIRE(pop.elite->fit.mse == 0.0);
        const auto genotypes_before = pop.individuals;
        generation(pop, ctx, budget, rng, monitor);
        for (size_t i = 0; i < pop.individuals.size(); ++i)
            CHECK(pop.individuals[i].genotype == genotypes_before[i].genotype);
        CHECK(pop.generation == 1);
    }

    SUBCASE("a dominated unimproved individual is displaced within one generation") {
        Fixture f("B4", 2, "d3_gas");
        for (uint64_t seed = 0; seed < 16; ++seed) {
            EvalBudget budget(100000, {});
            RunRecord rec;
            const EvolutionContext ctx = f.ctx();
            RunMonitor monitor(ctx, budget, rec);
            Rng rng(seed);
            PopulationState pop;
            pop.size = 4;
            const char* exprs[4] = {"(+ x4 x4)", "(/ (* x1 x2) (/ x4 x3))",
                                    "(/ (* x1 x2) (/ x4 x3))", "(/ (* x1 x2) (/ x4 x3))"};
            for (const char* e : exprs) {
                Individual ind;
                ind.genotype = encode_expression(e, f.opset, f.tmpl);
                ind.fit = fitness(ind.genotype, f.opset, f.train, budget);
                pop.individuals.push_back(ind);
                pop.observe(pop.individuals.back());
            }
            REQUIRE(pop.individuals[1].fit.mse < 1e-25);
            const double bad = pop.individuals[0].fit.mse;
            REQUIRE(bad > 1e-6);
            generation(pop, ctx, budget, rng, monitor);
            // either optimal mixing adopted donor material or the tournament
            // replaced the loser with a dominant rival
            CHECK(pop.individuals[0].fit.mse < bad);
            CHECK(budget.audit.violations == 0);
        }
    }
}

TEST_CASE("interleaved multistart scheduling") {
    Fixture f("B4", 2, "d3_gas");

    SUBCASE("a small budget never spawns a second population") {
        EvalBudget budget(200, {100});
        const RunRecord rec =
            run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, 1, 16);
        CHECK(rec.population_sizes == std::vector<int>{16});
        CHECK(rec.total_fes == 200);
    }
    SUBCASE("checkpoints below the budget are all recorded") {
        EvalBudget budget(600, {100, 500});
        const RunRecord rec = run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, 1, 16);
        REQUIRE(rec.checkpoints.size() == 2);
        CHECK(rec.checkpoints[0].fe_threshold == 100);
        CHECK(rec.checkpoints[1].fe_threshold == 500);
        CHECK(rec.total_fes == 600);
    }
    SUBCASE("the second population doubles the base size") {
        EvalBudget budget(60000, {});
        const RunRecord rec = run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, 1, 64);
        REQUIRE(rec.population_sizes.size() >= 2);
        CHECK(rec.population_sizes[0] == 64);
        CHECK(rec.population_sizes[1] == 128);
    }
    SUBCASE("elite metrics never worsen along the checkpoint sequence") {
        EvalBudget budget(20000, {100, 500, 1000, 5000, 10000, 20000});
        const RunRecord rec = run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, 7, 32);
        REQUIRE(!rec.checkpoints.empty());
        for (size_t i = 1; i < rec.checkpoints.size(); ++i)
            CHECK(rec.checkpoints[i].train_mse <= rec.checkpoints[i - 1].train_mse);
    }
    SUBCASE("budget parity: every run consumes the cap exactly") {
        for (uint64_t seed : {0, 1, 2}) {
            EvalBudget budget(5000, {});
            const RunRecord rec =
                run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, seed, 16);
            CHECK(rec.total_fes == 5000);
        }
    }
}

TEST_CASE("baseline configuration never touches the extension code paths") {
    Fixture f("T11", 2, "d3_gas");
    EvalBudget budget(8000, {});
    run_ims(f.cfg, f.tmpl, f.opset, f.train, f.test, budget, 3, 16);
    CHECK(budget.audit.gom_evals > 0);
    CHECK(budget.audit.ssi_evals == 0);
    CHECK(budget.audit.gcs_evals == 0);

    VariantConfig full;
    full.ssi_enabled = true;
    full.gcs = GcsConfig{GcsArity::All, true};
    EvalBudget budget2(8000, {});
    run_ims(full, f.tmpl, f.opset, f.train, f.test, budget2, 3, 16);
    CHECK(budget2.audit.ssi_evals > 0);
    CHECK(budget2.audit.gcs_evals > 0);
}

TEST_CASE("identical seeds reproduce identical runs") {
    Fixture f("T11", 2, "d3_osc");
    VariantConfig cfg;
    cfg.ssi_enabled = true;
    cfg.gcs = GcsConfig{GcsArity::UpTo2, true};

    auto one = [&](uint64_t seed) {
        EvalBudget budget(4000, {100, 1000, 4000});
        RunRecord rec = run_ims(cfg, f.tmpl, f.opset, f.train, f.test, budget, seed, 16);
        rec.operators = "T11";
        return run_record_to_json(rec);
    };
    CHECK(one(5) == one(5));
    CHECK(one(5) != one(6));
}
