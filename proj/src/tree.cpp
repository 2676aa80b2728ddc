#include "gpg/tree.hpp"

#include <cstdio>
#include <stdexcept>

namespace gpg {

TreeTemplate::TreeTemplate(int depth_, int branching_) : depth(depth_), branching(branching_) {
    if (depth < 1 || (branching != 2 && branching != 3))
        throw std::invalid_argument("TreeTemplate: depth must be >= 1, branching 2 or 3");
    subtree_size.assign(static_cast<size_t>(depth) + 1, 0);
    subtree_size[static_cast<size_t>(depth)] = 1;
    for (int d = depth - 1; d >= 0; --d)
        subtree_size[static_cast<size_t>(d)] = 1 + branching * subtree_size[static_cast<size_t>(d) + 1];
    node_count = subtree_size[0];
    node_depth.assign(static_cast<size_t>(node_count), 0);
    // pre-order: child k of a node at depth d starts 1 + k*subtree_size[d+1] after it
    for (int i = 0; i < node_count; ++i) {
        const int d = node_depth[static_cast<size_t>(i)];
        if (d == depth) continue;
        for (int k = 0; k < branching; ++k)
            node_depth[static_cast<size_t>(child(i, k))] = d + 1;
    }
}

std::vector<int> node_index_children(const TreeTemplate& t, int i) {
    std::vector<int> out;
    if (t.is_leaf(i)) return out;
    out.reserve(static_cast<size_t>(t.branching));
    for (int k = 0; k < t.branching; ++k) out.push_back(t.child(i, k));
    return out;
}

void Genotype::set_symbol(int pos, int symbol_id, const OperatorSet& opset, double const_value) {
    auto& node = nodes[static_cast<size_t>(pos)];
    const auto& sym = opset[symbol_id];
    node.symbol = static_cast<int16_t>(symbol_id);
    node.const_value = sym.kind == SymbolKind::Constant ? const_value : 0.0;
    node.n_sel = static_cast<uint8_t>(sym.arity);
    for (int k = 0; k < sym.arity; ++k) node.sel[static_cast<size_t>(k)] = static_cast<uint8_t>(k);
}

std::vector<bool> active_mask(const Genotype& g) {
    std::vector<bool> mask(g.nodes.size(), false);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        mask[static_cast<size_t>(i)] = true;
        const auto& node = g.nodes[static_cast<size_t>(i)];
        for (int k = 0; k < node.n_sel; ++k)
            stack.push_back(g.tmpl.child(i, node.sel[static_cast<size_t>(k)]));
    }
    return mask;
}

std::vector<int> active_nodes(const Genotype& g) {
    const auto mask = active_mask(g);
    std::vector<int> out;
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(static_cast<int>(i));
    return out;
}

int subtree_effective_depth(const Genotype& g, int i) {
    const auto mask = active_mask(g);
    if (!mask[static_cast<size_t>(i)])
        throw std::invalid_argument("subtree_effective_depth: node is an intron");
    // iterative height over the active subtree
    struct Frame {
        int node;
        int next_child;
        int height;
    };
    std::vector<Frame> stack{{i, 0, 0}};
    int result = 0;
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& node = g.nodes[static_cast<size_t>(f.node)];
        if (f.next_child >= node.n_sel) {
            result = f.height;
            const int h = f.height + 1;
            stack.pop_back();
            if (!stack.empty() && stack.back().height < h) stack.back().height = h;
            continue;
        }
        const int c = g.tmpl.child(f.node, node.sel[static_cast<size_t>(f.next_child)]);
        ++f.next_child;
        stack.push_back({c, 0, 0});
    }
    return result;
}

bool check_type_constraints(const Genotype& g, const OperatorSet& opset) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const auto& node = g.nodes[static_cast<size_t>(i)];
        const auto& sym = opset[node.symbol];
        for (int k = 0; k < node.n_sel; ++k) {
            const int c = g.tmpl.child(i, node.sel[static_cast<size_t>(k)]);
            const auto& child_sym = opset[g.nodes[static_cast<size_t>(c)].symbol];
            const ValueType need = sym.input_types[static_cast<size_t>(k)];
            const ValueType got = child_sym.output_type;
            if (got != need) {
                const bool waived = !opset.arithmetic_boolean_constraint_enabled &&
                                    need == ValueType::Real && got == ValueType::Boolean;
                if (!waived) return false;
            }
            stack.push_back(c);
        }
    }
    return true;
}

namespace {

struct InitTables {
    // per template depth level: symbol ids usable there, and whether a given
    // output type is producible there
    std::vector<std::vector<int>> feasible;
    std::vector<std::array<bool, 2>> producible;
};

bool type_producible(const InitTables& t, int level, ValueType v) {
    return t.producible[static_cast<size_t>(level)][static_cast<size_t>(v)];
}

InitTables build_init_tables(const TreeTemplate& tmpl, const OperatorSet& opset) {
    InitTables t;
    t.feasible.resize(static_cast<size_t>(tmpl.depth) + 1);
    t.producible.assign(static_cast<size_t>(tmpl.depth) + 1, {false, false});
    for (int level = tmpl.depth; level >= 0; --level) {
        auto& ids = t.feasible[static_cast<size_t>(level)];
        for (int id = 0; id < opset.size(); ++id) {
            const auto& sym = opset[id];
            if (sym.is_terminal()) {
                ids.push_back(id);
            } else if (level < tmpl.depth && sym.arity <= tmpl.branching) {
                bool ok = true;
                for (int k = 0; k < sym.arity && ok; ++k)
                    ok = type_producible(t, level + 1, sym.input_types[static_cast<size_t>(k)]);
                if (ok) ids.push_back(id);
            }
        }
        for (int id : ids)
            t.producible[static_cast<size_t>(level)][static_cast<size_t>(opset[id].output_type)] =
                true;
    }
    return t;
}

int sample_symbol(const InitTables& tables, const OperatorSet& opset, int level,
                  const ValueType* required, Rng& rng) {
    const auto& pool = tables.feasible[static_cast<size_t>(level)];
    std::vector<int> candidates;
    candidates.reserve(pool.size());
    for (int id : pool) {
        if (required != nullptr) {
            const ValueType got = opset[id].output_type;
            if (got != *required) {
                const bool waived = !opset.arithmetic_boolean_constraint_enabled &&
                                    *required == ValueType::Real && got == ValueType::Boolean;
                if (!waived) continue;
            }
        }
        candidates.push_back(id);
    }
    if (candidates.empty()) return -1;
    return candidates[rng.next_below(candidates.size())];
}

void fill_position(Genotype& g, const InitTables& tables, const OperatorSet& opset, int pos,
                   const ValueType* required, Rng& rng) {
    const int level = g.tmpl.node_depth[static_cast<size_t>(pos)];
    const int id = sample_symbol(tables, opset, level, required, rng);
    if (id < 0)
        throw std::runtime_error("random_init: operator set cannot satisfy type constraints");
    const auto& sym = opset[id];
    const double cval = sym.kind == SymbolKind::Constant
                            ? rng.next_double(OperatorSet::kConstMin, OperatorSet::kConstMax)
                            : 0.0;
    g.set_symbol(pos, id, opset, cval);
    if (level == g.tmpl.depth) return;
    for (int k = 0; k < g.tmpl.branching; ++k) {
        const int c = g.tmpl.child(pos, k);
        if (k < sym.arity) {
            const ValueType need = sym.input_types[static_cast<size_t>(k)];
            fill_position(g, tables, opset, c, &need, rng);
        } else {
            fill_position(g, tables, opset, c, nullptr, rng);
        }
    }
}

} // namespace

Genotype random_init(const TreeTemplate& tmpl, const OperatorSet& opset, Rng& rng) {
    if (opset.terminal_ids().empty())
        throw std::runtime_error("random_init: operator set has no terminals");
    Genotype g;
    g.tmpl = tmpl;
    g.nodes.resize(static_cast<size_t>(tmpl.node_count));
    const InitTables tables = build_init_tables(tmpl, opset);
    fill_position(g, tables, opset, 0, nullptr, rng);
    return g;
}

namespace {

std::string format_constant(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string print_node(const Genotype& g, const OperatorSet& opset, int i) {
    const auto& node = g.nodes[static_cast<size_t>(i)];
    const auto& sym = opset[node.symbol];
    switch (sym.kind) {
        case SymbolKind::Variable: return sym.name;
        case SymbolKind::Constant: return format_constant(node.const_value);
        case SymbolKind::Operator: break;
    }
    std::vector<std::string> args;
    args.reserve(node.n_sel);
    for (int k = 0; k < node.n_sel; ++k)
        args.push_back(print_node(g, opset, g.tmpl.child(i, node.sel[static_cast<size_t>(k)])));

    switch (sym.op) {
        case OpCode::Neg: return "(-" + args[0] + ")";
        case OpCode::Inv: return "(1/" + args[0] + ")";
        case OpCode::Pow2: return "(" + args[0] + "^2)";
        case OpCode::Pow3: return "(" + args[0] + "^3)";
        case OpCode::Pow4: return "(" + args[0] + "^4)";
        case OpCode::Pow5: return "(" + args[0] + "^5)";
        case OpCode::IfThenElse: return "if(" + args[0] + ", " + args[1] + ", " + args[2] + ")";
        case OpCode::Sin:
        case OpCode::Cos:
        case OpCode::Log:
        case OpCode::Exp:
        case OpCode::Sqrt:
        case OpCode::Not: return sym.name + "(" + args[0] + ")";
        default: break;
    }
    // infix, left-fold reading for effective arity 3
    std::string out = "(" + args[0];
    for (size_t a = 1; a < args.size(); ++a) out += " " + sym.name + " " + args[a];
    return out + ")";
}

} // namespace

std::string to_expression(const Genotype& g, const OperatorSet& opset) {
    return print_node(g, opset, 0);
}

} // namespace gpg
