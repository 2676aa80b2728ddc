#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "gpg/problems.hpp"
#include "gpg/variation.hpp"

using namespace gpg;

namespace {

OperatorSet t11_vocab(bool boolean_var = false) {
    OperatorSet set = builtin_operator_set(BuiltinSet::T11);
    set.add_variables(4);
    if (boolean_var) set.add_variable(4, ValueType::Boolean);
    set.add_constant();
    return set;
}

Dataset sampled_data(const ProblemSpec& spec, size_t rows, uint64_t seed) {
    Rng rng(seed);
    return generate(spec, rows, rng);
}

ProblemSpec product_problem() {
    ProblemSpec spec;
    spec.name = "xy";
    spec.n_vars = 4;
    spec.var_ranges.assign(4, {1.0, 5.0});
    spec.var_types.assign(4, ValueType::Real);
    spec.feasible_depth = 1;
    spec.expression = "(* x1 x2)";
    spec.truth = [](const std::vector<double>& v) { return v[0] * v[1]; };
    return spec;
}

// brute-force oracle: all ordered arrangements of `arity` distinct slots,
// collapsed to sorted-unique when commutative
std::set<std::vector<int>> brute_force_options(int arity, bool commutative, int branching) {
    std::set<std::vector<int>> out;
    std::vector<int> slots(static_cast<size_t>(branching));
    for (int i = 0; i < branching; ++i) slots[static_cast<size_t>(i)] = i;
    std::sort(slots.begin(), slots.end());
    do {
        std::vector<int> tuple(slots.begin(), slots.begin() + arity);
        if (commutative) std::sort(tuple.begin(), tuple.end());
        out.insert(tuple);
    } while (std::next_permutation(slots.begin(), slots.end()));
    return out;
}

uint64_t count_options(int arity, bool commutative, int branching, bool allow_ternary) {
    return child_options(arity, commutative, branching, allow_ternary).size();
}

} // namespace

TEST_CASE("child option counts match the published figures") {
    // ternary template: unary 3; commutative binary 3; non-commutative binary 6
    CHECK(count_options(1, false, 3, false) == 3);
    CHECK(count_options(2, true, 3, false) == 3);
    CHECK(count_options(2, false, 3, false) == 6);
    // ternary extension: one option when commutative, six when not
    CHECK(count_options(2, true, 3, true) == 3 + 1);
    CHECK(count_options(2, false, 3, true) == 6 + 6);
    // base arity three (if-then-else style)
    CHECK(count_options(3, false, 3, false) == 6);
    CHECK(count_options(3, true, 3, false) == 1);
    // binary template
    CHECK(count_options(1, false, 2, false) == 2);
    CHECK(count_options(2, true, 2, false) == 1);
    CHECK(count_options(2, false, 2, false) == 2);

    CHECK_THROWS(child_options(3, false, 2, false));
    CHECK_THROWS(child_options(0, false, 2, false));
}

TEST_CASE("child options equal brute-force enumeration") {
    for (int branching : {2, 3}) {
        for (int arity = 1; arity <= branching; ++arity) {
            for (bool commutative : {false, true}) {
                const auto got = child_options(arity, commutative, branching, false);
                const std::set<std::vector<int>> got_set(got.begin(), got.end());
                CHECK(got_set.size() == got.size()); // no duplicates
                CHECK(got_set == brute_force_options(arity, commutative, branching));
            }
        }
    }
    // appended ternary tuples are exactly the arity-3 enumeration
    const auto extended = child_options(2, false, 3, true);
    const std::set<std::vector<int>> tail(extended.begin() + 6, extended.end());
    CHECK(tail == brute_force_options(3, false, 3));
}

TEST_CASE("configuration matrix size") {
    CHECK(enumerate_variants(3).size() == 14);
    CHECK(enumerate_variants(2).size() == 10);
    std::set<std::string> labels;
    for (const auto& v : enumerate_variants(3)) labels.insert(v.label());
    CHECK(labels.size() == 14);
    for (const auto& v : enumerate_variants(3)) {
        const VariantConfig back = variant_from_label(v.label());
        CHECK(back.label() == v.label());
    }
    CHECK_THROWS(parse_gcs("4"));
    CHECK_THROWS(variant_from_label("nonsense"));
}

TEST_CASE("gene-pool optimal mixing") {
    const OperatorSet set = t11_vocab();
    const TreeTemplate tmpl(2, 3);
    const ProblemSpec spec = product_problem();
    const Dataset train = sampled_data(spec, 64, 9001);

    SUBCASE("a population of clones is a fixed point that costs nothing") {
        Rng rng(1);
        Genotype g = encode_expression("(+ x1 x2)", set, tmpl);
        std::vector<Individual> pop(8);
        EvalBudget budget(1000, {});
        for (auto& ind : pop) {
            ind.genotype = g;
            ind.fit = fitness(g, set, train, budget);
        }
        const uint64_t before = budget.used();
        LinkageTree fos = learn_linkage(std::vector<Genotype>(8, g), set, rng);
        Individual& ind = pop.front();
        const Genotype snapshot = ind.genotype;
        const bool improved = gom(ind, fos, pop, set, train, budget, rng);
        CHECK(!improved);
        CHECK(ind.genotype == snapshot);
        CHECK(budget.used() == before); // no-ops are never evaluated
    }

    SUBCASE("a strictly fitter donor can be adopted through the root subset") {
        // two individuals: the receiver is poor, the donor solves the problem
        bool adopted_somewhere = false;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(seed);
            EvalBudget budget(1000, {});
            std::vector<Individual> pop(2);
            pop[0].genotype = encode_expression("(+ x3 x4)", set, tmpl);
            pop[0].fit = fitness(pop[0].genotype, set, train, budget);
            pop[1].genotype = encode_expression("(* x1 x2)", set, tmpl);
            pop[1].fit = fitness(pop[1].genotype, set, train, budget);

            LinkageTree root_only;
            std::vector<int> all;
            for (int i = 0; i < tmpl.node_count; ++i) all.push_back(i);
            root_only.subsets = {all};

            const double before = pop[0].fit.mse;
            const bool improved = gom(pop[0], root_only, pop, set, train, budget, rng);
            CHECK(pop[0].fit.mse <= before);
            if (improved) {
                CHECK(pop[0].fit.mse == 0.0);
                CHECK(pop[0].genotype == pop[1].genotype);
                adopted_somewhere = true;
            }
            CHECK(budget.audit.violations == 0);
        }
        CHECK(adopted_somewhere);
    }

    SUBCASE("type-constraint violations are rejected without evaluations") {
        // donor material would put a Boolean output under an arithmetic slot
        const OperatorSet typed = t11_vocab(true);
        std::vector<Individual> pop(2);
        EvalBudget budget(1000, {});
        pop[0].genotype = encode_expression("(+ x1 x2)", typed, tmpl);
        pop[0].fit = fitness(pop[0].genotype, typed, train, budget);
        pop[1].genotype = encode_expression("(+ x1 x2)", typed, tmpl);
        // donor's node 1 is a comparison subtree: fine for the donor only if
        // it sits under the if condition; here it is just genotype material
        pop[1].genotype.set_symbol(1, typed.find("<"), typed);
        pop[1].fit = pop[0].fit;

        LinkageTree one;
        one.subsets = {{1}};
        Rng rng(3);
        const uint64_t before = budget.used();
        const bool improved = gom(pop[0], one, pop, typed, train, budget, rng);
        CHECK(!improved);
        CHECK(budget.used() == before); // rejected before evaluation
        CHECK(pop[0].genotype.nodes[1].symbol != typed.find("<"));
    }
}

TEST_CASE("semantic subtree inheritance") {
    const OperatorSet set = t11_vocab();
    const TreeTemplate tmpl(2, 3);
    const ProblemSpec spec = product_problem();
    const Dataset train = sampled_data(spec, 64, 9002);

    SUBCASE("clones produce no improvement") {
        Rng rng(5);
        EvalBudget budget(1000, {});
        std::vector<Individual> pop(4);
        for (auto& ind : pop) {
            ind.genotype = encode_expression("(+ (* x1 x3) x2)", set, tmpl);
            ind.fit = fitness(ind.genotype, set, train, budget);
        }
        const bool improved = ssi(pop[0], pop, set, train, budget, rng);
        CHECK(!improved);
        CHECK(budget.audit.violations == 0);
    }

    SUBCASE("a donor subtree under the same operator transplants an exact fit") {
        // receiver root is "+", donor holds the solving subtree under a "+"
        bool solved_somewhere = false;
        for (uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(seed);
            EvalBudget budget(1000, {});
            std::vector<Individual> pop(2);
            pop[0].genotype = encode_expression("(+ x1 x1)", set, tmpl);
            pop[0].fit = fitness(pop[0].genotype, set, train, budget);
            pop[1].genotype = encode_expression("(+ (* x1 x2) 0.0)", set, tmpl);
            pop[1].fit = fitness(pop[1].genotype, set, train, budget);

            const double before = pop[0].fit.mse;
            ssi(pop[0], pop, set, train, budget, rng);
            CHECK(pop[0].fit.mse <= before);
            if (pop[0].fit.mse == 0.0) solved_somewhere = true;
            CHECK(budget.audit.violations == 0);
        }
        CHECK(solved_somewhere);
    }

    SUBCASE("transplants only touch the target subtree region") {
        // root sqrt can never be donated to (no donor uses sqrt), so only the
        // "+" node's region may change
        const TreeTemplate deep(2, 2);
        OperatorSet b9 = builtin_operator_set(BuiltinSet::B9);
        b9.add_variables(4);
        b9.add_constant();
        const Dataset tr = sampled_data(spec, 32, 9003);
        for (uint64_t seed = 0; seed < 50; ++seed) {
            Rng rng(seed);
            EvalBudget budget(1000, {});
            std::vector<Individual> pop(2);
            pop[0].genotype = encode_expression("(sqrt (+ x1 x2))", b9, deep);
            pop[0].fit = fitness(pop[0].genotype, b9, tr, budget);
            pop[1].genotype = encode_expression("(* (+ x3 x4) x2)", b9, deep);
            pop[1].fit = fitness(pop[1].genotype, b9, tr, budget);

            const Genotype before = pop[0].genotype;
            ssi(pop[0], pop, b9, tr, budget, rng);
            // region of node 1 in a depth-2 binary template: indices 1..3
            CHECK(pop[0].genotype.nodes[0] == before.nodes[0]);
            for (int i = 4; i < deep.node_count; ++i)
                CHECK(pop[0].genotype.nodes[static_cast<size_t>(i)] ==
                      before.nodes[static_cast<size_t>(i)]);
        }
    }

    SUBCASE("donor subtrees must fit the room below the target") {
        // the donor's root "*" is two deep and cannot land on the receiver's
        // depth-1 "*"; only the donor's inner depth-1 "*" qualifies there
        Rng rng(11);
        EvalBudget budget(1000, {});
        const TreeTemplate shallow(2, 3);
        std::vector<Individual> pop(2);
        // target node: the "*" at depth 1 (room for depth-1 subtrees)
        pop[0].genotype = encode_expression("(+ (* x1 x1) x2)", set, shallow);
        pop[0].fit = fitness(pop[0].genotype, set, train, budget);
        // donor "*" roots a depth-2 subtree: too deep to fit under depth 1
        pop[1].genotype = encode_expression("(* (* x1 x2) (+ x3 x4))", set, shallow);
        pop[1].fit = fitness(pop[1].genotype, set, train, budget);

        for (int rep = 0; rep < 20; ++rep) {
            ssi(pop[0], pop, set, train, budget, rng);
            CHECK(check_type_constraints(pop[0].genotype, set));
            CHECK(subtree_effective_depth(pop[0].genotype, 0) <= 2);
        }
    }
}

TEST_CASE("greedy child selection") {
    const ProblemSpec spec = product_problem();

    SUBCASE("a unary operator switches to the informative slot") {
        // y = sqrt(x1); slot A holds a junk constant, slot B holds x1
        OperatorSet b9 = builtin_operator_set(BuiltinSet::B9);
        b9.add_variables(2);
        b9.add_constant();
        ProblemSpec root_spec;
        root_spec.name = "sqrt_x1";
        root_spec.n_vars = 2;
        root_spec.var_ranges.assign(2, {1.0, 5.0});
        root_spec.var_types.assign(2, ValueType::Real);
        root_spec.feasible_depth = 1;
        root_spec.truth = [](const std::vector<double>& v) { return std::sqrt(v[0]); };
        const Dataset train = sampled_data(root_spec, 64, 9004);

        Genotype g;
        g.tmpl = TreeTemplate(1, 2);
        g.nodes.resize(3);
        g.set_symbol(0, b9.find("sqrt"), b9);
        g.set_symbol(1, b9.find("const"), b9, 99.0);
        g.set_symbol(2, b9.find("x1"), b9);

        EvalBudget budget(100, {});
        Individual ind{g, fitness(g, b9, train, budget)};
        const uint64_t before = budget.used();
        const bool improved = gcs(ind, GcsConfig{GcsArity::UpTo1, false}, b9, train, budget);
        CHECK(improved);
        CHECK(ind.genotype.nodes[0].sel[0] == 1);
        CHECK(ind.fit.mse == 0.0);
        CHECK(budget.used() - before == 2); // both slot options were evaluated
    }

    SUBCASE("a non-commutative division picks the right ordered pair") {
        OperatorSet set = t11_vocab();
        ProblemSpec ratio;
        ratio.name = "ratio";
        ratio.n_vars = 4;
        ratio.var_ranges.assign(4, {1.0, 5.0});
        ratio.var_types.assign(4, ValueType::Real);
        ratio.feasible_depth = 1;
        ratio.truth = [](const std::vector<double>& v) { return v[0] / v[1]; };
        const Dataset train = sampled_data(ratio, 64, 9005);

        // slot A = x2 (denominator), slot B = x3 (junk), slot C = x1 (numerator)
        Genotype g;
        g.tmpl = TreeTemplate(1, 3);
        g.nodes.resize(4);
        g.set_symbol(0, set.find("/"), set);
        g.set_symbol(1, set.find("x2"), set);
        g.set_symbol(2, set.find("x3"), set);
        g.set_symbol(3, set.find("x1"), set);

        // oracle: evaluate all six ordered pairs directly
        const auto options = child_options(2, false, 3, false);
        std::vector<double> option_mse;
        for (const auto& opt : options) {
            Genotype cand = g;
            cand.nodes[0].sel = {static_cast<uint8_t>(opt[0]), static_cast<uint8_t>(opt[1]), 0};
            option_mse.push_back(compute_metrics(cand, set, train).mse);
        }
        const size_t best = static_cast<size_t>(
            std::min_element(option_mse.begin(), option_mse.end()) - option_mse.begin());
        CHECK(options[best] == std::vector<int>{2, 0}); // slots (C, A): x1 / x2

        EvalBudget budget(100, {});
        Individual ind{g, fitness(g, set, train, budget)};
        gcs(ind, GcsConfig{GcsArity::UpTo2, false}, set, train, budget);
        CHECK(ind.genotype.nodes[0].sel[0] == 2);
        CHECK(ind.genotype.nodes[0].sel[1] == 0);
        CHECK(ind.fit.mse == doctest::Approx(*std::min_element(option_mse.begin(),
                                                               option_mse.end())));
    }

    SUBCASE("ties keep the incumbent selection") {
        OperatorSet b9 = builtin_operator_set(BuiltinSet::B9);
        b9.add_variables(2);
        const Dataset train = sampled_data(product_problem(), 32, 9006);
        Genotype g;
        g.tmpl = TreeTemplate(1, 2);
        g.nodes.resize(3);
        g.set_symbol(0, b9.find("sqrt"), b9);
        g.set_symbol(1, b9.find("x1"), b9);
        g.set_symbol(2, b9.find("x1"), b9); // both slots identical
        EvalBudget budget(100, {});
        Individual ind{g, fitness(g, b9, train, budget)};
        const bool improved = gcs(ind, GcsConfig{GcsArity::UpTo1, false}, b9, train, budget);
        CHECK(!improved);
        CHECK(ind.genotype.nodes[0].sel[0] == 0);
        CHECK(budget.audit.violations == 0);
    }

    SUBCASE("arity scope limits which nodes are optimised") {
        OperatorSet set = t11_vocab();
        const Dataset train = sampled_data(product_problem(), 32, 9007);
        const TreeTemplate tmpl(2, 3);
        const Genotype g = encode_expression("(+ (sqrt x3) x2)", set, tmpl);
        EvalBudget b1(1000, {});
        Individual i1{g, fitness(g, set, train, b1)};
        gcs(i1, GcsConfig{GcsArity::UpTo1, false}, set, train, b1);
        // only the sqrt node (3 unary options) was enumerated
        CHECK(b1.used() == 1 + 3);

        EvalBudget b2(1000, {});
        Individual i2{g, fitness(g, set, train, b2)};
        gcs(i2, GcsConfig{GcsArity::UpTo2, false}, set, train, b2);
        // sqrt (3 options) plus the commutative "+" (3 unordered pairs)
        CHECK(b2.used() == 1 + 3 + 3);
    }
}

TEST_CASE("variation never commits a worse fitness and keeps genotypes legal") {
    const OperatorSet set = t11_vocab(true);
    ProblemSpec spec;
    spec.name = "gated";
    spec.n_vars = 5;
    spec.var_ranges.assign(5, {1.0, 5.0});
    spec.var_types.assign(5, ValueType::Real);
    spec.var_types[4] = ValueType::Boolean;
    spec.feasible_depth = 2;
    spec.truth = [](const std::vector<double>& v) { return v[4] > 0.5 ? v[0] * v[1] : v[2]; };
    const Dataset train = sampled_data(spec, 48, 9008);

    Rng rng(77);
    const TreeTemplate tmpl(2, 3);
    EvalBudget budget(200000, {});
    std::vector<Individual> pop(16);
    for (auto& ind : pop) {
        ind.genotype = random_init(tmpl, set, rng);
        ind.fit = fitness(ind.genotype, set, train, budget);
    }

    for (int round = 0; round < 30; ++round) {
        std::vector<Genotype> genotypes;
        for (const auto& ind : pop) genotypes.push_back(ind.genotype);
        const LinkageTree fos = learn_linkage(genotypes, set, rng);
        for (auto& ind : pop) {
            const double before_gom = ind.fit.mse;
            gom(ind, fos, pop, set, train, budget, rng);
            CHECK(ind.fit.mse <= before_gom);
            const double before_ssi = ind.fit.mse;
            ssi(ind, pop, set, train, budget, rng);
            CHECK(ind.fit.mse <= before_ssi);
            const double before_gcs = ind.fit.mse;
            gcs(ind, GcsConfig{GcsArity::All, true}, set, train, budget);
            CHECK(ind.fit.mse <= before_gcs);

            REQUIRE(check_type_constraints(ind.genotype, set));
            for (int i = 0; i < tmpl.node_count; ++i)
                if (tmpl.is_leaf(i))
                    REQUIRE(set[ind.genotype.nodes[static_cast<size_t>(i)].symbol].is_terminal());
            // the stored fitness always matches a fresh evaluation
            CHECK(ind.fit.mse == compute_metrics(ind.genotype, set, train).mse);
        }
    }
    CHECK(budget.audit.violations == 0);
    CHECK(budget.audit.events > 1000);
}
