#include "gpg/eval.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace gpg {

namespace {

std::vector<double> eval_node(const Genotype& g, const OperatorSet& opset, const Dataset& d,
                              int i) {
    const auto& node = g.nodes[static_cast<size_t>(i)];
    const auto& sym = opset[node.symbol];
    const size_t n = d.rows();
    if (sym.kind == SymbolKind::Variable) return d.columns[static_cast<size_t>(sym.var_index)];
    if (sym.kind == SymbolKind::Constant) return std::vector<double>(n, node.const_value);

    std::vector<std::vector<double>> args;
    args.reserve(node.n_sel);
    for (int k = 0; k < node.n_sel; ++k)
        args.push_back(eval_node(g, opset, d, g.tmpl.child(i, node.sel[static_cast<size_t>(k)])));
    std::vector<const double*> ptrs;
    ptrs.reserve(args.size());
    for (const auto& a : args) ptrs.push_back(a.data());
    std::vector<double> out(n);
    apply_symbol(sym, std::span<const double* const>(ptrs.data(), ptrs.size()), n, out.data());
    return out;
}

} // namespace

std::vector<double> evaluate_tree(const Genotype& g, const OperatorSet& opset, const Dataset& d) {
    return eval_node(g, opset, d, 0);
}

FitnessRecord compute_metrics(const Genotype& g, const OperatorSet& opset, const Dataset& d) {
    const std::vector<double> pred = evaluate_tree(g, opset, d);
    const size_t n = d.rows();
    double mean_y = 0.0;
    for (double v : d.y) mean_y += v;
    mean_y /= static_cast<double>(n);

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (size_t r = 0; r < n; ++r) {
        const double e = pred[r] - d.y[r];
        ss_res += e * e;
        const double c = d.y[r] - mean_y;
        ss_tot += c * c;
    }

    FitnessRecord rec;
    const double mse = ss_res / static_cast<double>(n);
    rec.mse = std::isfinite(mse) ? mse : kWorstMse;
    if (rec.mse == kWorstMse) {
        rec.r2 = kR2Floor;
    } else if (ss_tot > 0.0) {
        rec.r2 = 1.0 - ss_res / ss_tot;
        if (!(rec.r2 >= kR2Floor)) rec.r2 = kR2Floor;
    } else {
        // constant target: perfect fit is 1, anything else the floor
        rec.r2 = ss_res == 0.0 ? 1.0 : kR2Floor;
    }
    return rec;
}

FitnessRecord fitness(const Genotype& g, const OperatorSet& opset, const Dataset& d,
                      EvalBudget& budget) {
    assert(!budget.exhausted());
    budget.count_one();
    return compute_metrics(g, opset, d);
}

} // namespace gpg
