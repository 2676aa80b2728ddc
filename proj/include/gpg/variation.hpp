#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpg/eval.hpp"
#include "gpg/linkage.hpp"
#include "gpg/rng.hpp"

namespace gpg {

enum class GcsArity { UpTo1, UpTo2, All };

struct GcsConfig {
    GcsArity max_arity = GcsArity::UpTo2;
    bool backtrack = false;
};

// One of the 14 (ternary) / 10 (binary) tested configurations.
struct VariantConfig {
    std::optional<GcsConfig> gcs;
    bool ssi_enabled = false;

    bool ternary_active(int branching) const {
        return branching == 3 && gcs && gcs->max_arity == GcsArity::All;
    }

    std::string label() const;
};

// "off" | "1" | "1+" | "2" | "2+" | "3" | "3+"
std::optional<GcsConfig> parse_gcs(const std::string& text);
std::string gcs_to_string(const std::optional<GcsConfig>& gcs);

// inverse of VariantConfig::label()
VariantConfig variant_from_label(const std::string& label);

// full configuration matrix for one template branching factor
std::vector<VariantConfig> enumerate_variants(int branching);

struct Individual {
    Genotype genotype;
    FitnessRecord fit;
};

// Ordered child-slot tuples available to an operator: permutations for
// non-commutative symbols, ascending combinations for commutative ones, plus
// the arity-3 tuples when the symbol is ternary-extensible and allowed.
std::vector<std::vector<int>> child_options(int arity, bool commutative, int branching,
                                            bool allow_ternary);

// Gene-pool optimal mixing: donor copying per FOS subset with
// accept-if-not-worse selection. Constraint-violating changes are rejected
// without spending an evaluation. Returns true when fitness strictly improved.
bool gom(Individual& ind, const LinkageTree& fos, const std::vector<Individual>& pop,
         const OperatorSet& opset, const Dataset& train, EvalBudget& budget, Rng& rng);

// Semantic subtree inheritance: per active non-leaf node, transplant a donor
// subtree rooted at the same operator when it fits below the node; slots that
// the donor does not cover keep their previous contents as introns.
bool ssi(Individual& ind, const std::vector<Individual>& pop, const OperatorSet& opset,
         const Dataset& train, EvalBudget& budget, Rng& rng);

// Greedy child selection: post-order sweep of active non-leaf nodes within
// the configured arity bound, evaluating every child-slot tuple and keeping
// the best (incumbent wins ties). With backtracking, subtrees activated from
// intron status are optimised before the sweep continues.
bool gcs(Individual& ind, const GcsConfig& cfg, const OperatorSet& opset, const Dataset& train,
         EvalBudget& budget);

} // namespace gpg
