#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gpg/rng.hpp"
#include "gpg/symbols.hpp"

namespace gpg {

// Perfect tree of fixed depth and branching factor, laid out in pre-order.
// The root sits at depth 0, leaves exactly at `depth`.
struct TreeTemplate {
    int depth = 0;
    int branching = 2;
    int node_count = 0;
    std::vector<int> node_depth;    // per pre-order index
    std::vector<int> subtree_size;  // by node depth: size of the subtree rooted there

    TreeTemplate() = default;
    TreeTemplate(int depth, int branching);

    bool is_leaf(int i) const { return node_depth[static_cast<size_t>(i)] == depth; }

    // pre-order index of child k of node i
    int child(int i, int k) const {
        return i + 1 + k * subtree_size[static_cast<size_t>(node_depth[static_cast<size_t>(i)]) + 1];
    }

    bool operator==(const TreeTemplate&) const = default;
};

// children of a non-leaf node; empty list for leaves
std::vector<int> node_index_children(const TreeTemplate& t, int i);

struct GenotypeNode {
    int16_t symbol = -1;       // id into the OperatorSet
    double const_value = 0.0;  // meaningful for Constant symbols
    uint8_t n_sel = 0;         // effective arity (0 for terminals)
    std::array<uint8_t, 3> sel{0, 0, 0};

    bool operator==(const GenotypeNode&) const = default;
};

// Fixed-length pre-order symbol string with per-node child-slot selections.
// Value type: copy to branch, assign to revert.
struct Genotype {
    TreeTemplate tmpl;
    std::vector<GenotypeNode> nodes;

    bool operator==(const Genotype&) const = default;

    // leftmost `arity` slots in ascending order
    void set_symbol(int pos, int symbol_id, const OperatorSet& opset, double const_value = 0.0);
};

// indices reachable from the root through child selections; everything else
// is a syntactic intron
std::vector<int> active_nodes(const Genotype& g);
std::vector<bool> active_mask(const Genotype& g);

// height of the active subtree rooted at i (terminal -> 0); i must be active
int subtree_effective_depth(const Genotype& g, int i);

// Type discipline over active nodes. When the arithmetic/Boolean constraint is
// disabled, Boolean output may feed Real input slots; the if-condition slot
// and Boolean-input operators keep their requirements either way.
bool check_type_constraints(const Genotype& g, const OperatorSet& opset);

// Uniform typed sampling per position; leaves hold terminals only. Intron
// regions are filled with the same sampler so later activation stays
// well-typed. Throws when the set cannot satisfy the constraints.
Genotype random_init(const TreeTemplate& tmpl, const OperatorSet& opset, Rng& rng);

// infix rendering of the active tree; constants printed with 6 significant digits
std::string to_expression(const Genotype& g, const OperatorSet& opset);

} // namespace gpg
