#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gpg/eval.hpp"
#include "gpg/rng.hpp"

namespace gpg {

// Ground-truth regression problem. `expression` is the target in prefix form
// over the built-in symbol names; `truth` is an independent native
// implementation of the same formula used to generate data.
struct ProblemSpec {
    std::string name;
    int n_vars = 0;
    std::vector<std::pair<double, double>> var_ranges;
    std::vector<ValueType> var_types;
    int feasible_depth = 0;
    std::string expression;
    std::function<double(const std::vector<double>&)> truth;
};

// Built-in four-variable problems, grouped by the smallest binary template
// depth that hosts them (3, 4 and 5).
const std::vector<ProblemSpec>& builtin_problems();
const ProblemSpec& builtin_problem(const std::string& name);
std::vector<ProblemSpec> builtin_problems_at_depth(int depth);

// Boolean-gated switch between two equally deep problems: the appended gate
// variable selects b (gate = 1) or a (gate = 0) per row.
ProblemSpec combine_discontinuous(const ProblemSpec& a, const ProblemSpec& b);

// all n(n-1)/2 unordered gated pairs of one depth class
std::vector<ProblemSpec> discontinuous_problems_at_depth(int depth);

// Uniform sampling of X within the variable ranges (Bernoulli(1/2) for
// Boolean variables); y is the exact expression value, no noise.
Dataset generate(const ProblemSpec& spec, size_t n, Rng& rng);

// random disjoint partition into floor(train_fraction*n) and the remainder
std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, Rng& rng);

// Header row names the columns, last column is the target. Values are written
// with 17 significant digits so a round-trip is exact.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& d, const std::string& path);

// Places a prefix-form expression into a template, filling uncovered
// positions with the first terminal. Throws when the expression does not fit
// or names unknown symbols.
Genotype encode_expression(const std::string& prefix, const OperatorSet& opset,
                           const TreeTemplate& tmpl);

} // namespace gpg
