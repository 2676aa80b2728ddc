#include "doctest.h"

#include <cmath>

#include "gpg/eval.hpp"
#include "gpg/problems.hpp"
#include "gpg/rng.hpp"

using namespace gpg;

namespace {

OperatorSet small_set() {
    OperatorSet set = builtin_operator_set(BuiltinSet::T22);
    set.add_variables(4);
    set.add_constant();
    return set;
}

Dataset four_var_data(const std::vector<std::vector<double>>& rows) {
    Dataset d;
    d.name = "probe";
    d.var_types.assign(4, ValueType::Real);
    d.columns.resize(4);
    for (const auto& row : rows) {
        for (size_t c = 0; c < 4; ++c) d.columns[c].push_back(row[c]);
        d.y.push_back(row.back());
    }
    return d;
}

} // namespace

TEST_CASE("tree evaluation on the worked examples") {
    const OperatorSet set = small_set();

    Dataset d;
    d.var_types.assign(4, ValueType::Real);
    d.columns = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {0, 0, 0}};
    d.y = {0, 0, 0};

    CHECK(evaluate_tree(encode_expression("x1", set, TreeTemplate(1, 2)), set, d) ==
          std::vector<double>{1, 2, 3});
    CHECK(evaluate_tree(encode_expression("(+ x1 x2)", set, TreeTemplate(1, 2)), set, d) ==
          std::vector<double>{5, 7, 9});

    Dataset cond;
    cond.var_types.assign(4, ValueType::Real);
    cond.columns = {{1, 2}, {2, 1}, {9, 9}, {0, 0}};
    cond.y = {0, 0};
    CHECK(evaluate_tree(encode_expression("(if (< x1 x2) x3 x4)", set, TreeTemplate(2, 3)), set,
                        cond) == std::vector<double>{9, 0});
}

TEST_CASE("fitness metrics") {
    const OperatorSet set = small_set();
    EvalBudget budget(100, {});

    SUBCASE("perfect prediction gives mse 0 and r2 1") {
        Dataset d = four_var_data({{1, 1, 0, 0}, {2, 2, 0, 0}, {3, 3, 0, 0}});
        d.y = {1, 2, 3};
        const auto rec = fitness(encode_expression("x1", set, TreeTemplate(1, 2)), set, d, budget);
        CHECK(rec.mse == 0.0);
        CHECK(rec.r2 == 1.0);
    }
    SUBCASE("predicting the target mean gives r2 0") {
        Dataset d = four_var_data({{0, 0, 0, 0}, {0, 0, 0, 0}});
        d.y = {1, 3};
        const auto rec = fitness(encode_expression("2.0", set, TreeTemplate(1, 2)), set, d, budget);
        CHECK(rec.r2 == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("mse of a constant zero predictor") {
        Dataset d = four_var_data({{0, 0, 0, 0}, {0, 0, 0, 0}});
        d.y = {1, 3};
        const auto rec = fitness(encode_expression("0.0", set, TreeTemplate(1, 2)), set, d, budget);
        CHECK(rec.mse == doctest::Approx(5.0));
    }
    SUBCASE("non-finite predictions map to the worst sentinel") {
        Dataset d = four_var_data({{1, 0, 0, 0}, {2, 0, 0, 0}});
        d.y = {1, 2};
        // exp(300)^3 overflows a double
        Genotype g = encode_expression("(^3 (exp 300.0))", set, TreeTemplate(2, 3));
        const auto rec = fitness(g, set, d, budget);
        CHECK(rec.mse == kWorstMse);
        CHECK(rec.r2 == kR2Floor);
        CHECK(std::isinf(kWorstMse));
        CHECK(FitnessRecord{1e300, 0.0}.better_than(rec));
    }
}

TEST_CASE("budget accounting is exact and monotone") {
    const OperatorSet set = small_set();
    Dataset d = four_var_data({{1, 2, 3, 4}, {2, 3, 4, 5}, {3, 4, 5, 6}});
    d.y = {1, 2, 3};
    const Genotype g = encode_expression("(+ x1 x2)", set, TreeTemplate(1, 2));

    EvalBudget budget(10, {3, 7});
    CHECK(budget.used() == 0);
    for (int i = 1; i <= 10; ++i) {
        CHECK(!budget.exhausted());
        fitness(g, set, d, budget);
        CHECK(budget.used() == static_cast<uint64_t>(i));
    }
    CHECK(budget.exhausted());
    CHECK(budget.checkpoint_due());
    CHECK(budget.pop_checkpoint() == 3);
    CHECK(budget.pop_checkpoint() == 7);
    CHECK(!budget.checkpoint_due());
}

TEST_CASE("evaluation is deterministic and row-permutation invariant") {
    const OperatorSet set = small_set();
    Rng rng(5);
    OperatorSet init_set = set;
    const TreeTemplate tmpl(3, 3);

    Dataset d;
    d.var_types.assign(4, ValueType::Real);
    d.columns.resize(4);
    for (int r = 0; r < 64; ++r) {
        for (int c = 0; c < 4; ++c) d.columns[static_cast<size_t>(c)].push_back(rng.next_double(1, 5));
        d.y.push_back(rng.next_double(0, 10));
    }

    for (int it = 0; it < 50; ++it) {
        const Genotype g = random_init(tmpl, init_set, rng);
        const auto a = evaluate_tree(g, set, d);
        const auto b = evaluate_tree(g, set, d);
        CHECK(a == b); // bit-identical

        // shuffle rows and compare mse
        std::vector<size_t> order(d.rows());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        Dataset shuffled = d;
        for (size_t i = 0; i < order.size(); ++i) {
            for (size_t c = 0; c < 4; ++c) shuffled.columns[c][i] = d.columns[c][order[i]];
            shuffled.y[i] = d.y[order[i]];
        }
        const auto m1 = compute_metrics(g, set, d);
        const auto m2 = compute_metrics(g, set, shuffled);
        CHECK(m1.mse == doctest::Approx(m2.mse).epsilon(1e-12));
    }
}

TEST_CASE("the true generating expression scores r2 1 on noise-free data") {
    for (const auto& spec : builtin_problems()) {
        OperatorSet set = builtin_operator_set(BuiltinSet::B15);
        set.add_variables(spec.n_vars);
        set.add_constant();
        Rng rng(stable_hash(spec.name));
        const Dataset d = generate(spec, 256, rng);
        const Genotype g =
            encode_expression(spec.expression, set, TreeTemplate(spec.feasible_depth, 2));
        const auto rec = compute_metrics(g, set, d);
        CAPTURE(spec.name);
        CHECK(rec.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }
}
