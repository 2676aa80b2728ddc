#include "gpg/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpg {

namespace {

using Row = std::vector<double>;

ProblemSpec make_builtin(std::string name, int depth, std::string expression,
                         std::function<double(const Row&)> truth) {
    ProblemSpec spec;
    spec.name = std::move(name);
    spec.n_vars = 4;
    spec.var_ranges.assign(4, {1.0, 5.0});
    spec.var_types.assign(4, ValueType::Real);
    spec.feasible_depth = depth;
    spec.expression = std::move(expression);
    spec.truth = std::move(truth);
    return spec;
}

std::vector<ProblemSpec> make_builtin_problems() {
    std::vector<ProblemSpec> out;

    // depth 3
    out.push_back(make_builtin("d3_gas", 3, "(/ (* (* x1 x2) x3) x4)",
                               [](const Row& v) { return v[0] * v[1] * v[2] / v[3]; }));
    out.push_back(make_builtin("d3_grav", 3, "(/ (* x1 x2) (* x3 (^2 x4)))",
                               [](const Row& v) { return v[0] * v[1] / (v[2] * v[3] * v[3]); }));
    out.push_back(make_builtin("d3_wave", 3, "(sqrt (/ (* x1 x2) (* x3 x4)))", [](const Row& v) {
        return std::sqrt(v[0] * v[1] / (v[2] * v[3]));
    }));
    out.push_back(make_builtin("d3_osc", 3, "(* (/ x1 x4) (sin (* x2 x3)))", [](const Row& v) {
        return v[0] / v[3] * std::sin(v[1] * v[2]);
    }));
    out.push_back(make_builtin("d3_lens", 3, "(* (+ x1 x2) (^2 (- x3 x4)))", [](const Row& v) {
        return (v[0] + v[1]) * (v[2] - v[3]) * (v[2] - v[3]);
    }));
    out.push_back(make_builtin("d3_decay", 3, "(/ (* x1 x2) (exp (* x3 x4)))", [](const Row& v) {
        return v[0] * v[1] / std::exp(v[2] * v[3]);
    }));
    out.push_back(make_builtin("d3_pow", 3, "(/ (* (^2 x1) x2) (* x3 x4))", [](const Row& v) {
        return v[0] * v[0] * v[1] / (v[2] * v[3]);
    }));
    out.push_back(make_builtin("d3_logq", 3, "(* (log (* x1 x2)) (/ x3 x4))", [](const Row& v) {
        return std::log(v[0] * v[1]) * (v[2] / v[3]);
    }));
    out.push_back(make_builtin("d3_sum3", 3, "(* (+ (+ x1 x2) x3) x4)", [](const Row& v) {
        return (v[0] + v[1] + v[2]) * v[3];
    }));

    // depth 4
    out.push_back(make_builtin("d4_sinsq", 4, "(/ (* x1 x2) (* x3 (^2 (sin x4))))",
                               [](const Row& v) {
                                   const double s = std::sin(v[3]);
                                   return v[0] * v[1] / (v[2] * s * s);
                               }));
    out.push_back(make_builtin("d4_norm2", 4,
                               "(sqrt (* (+ (^2 x1) (^2 x2)) (+ (^2 x3) (^2 x4))))",
                               [](const Row& v) {
                                   return std::sqrt((v[0] * v[0] + v[1] * v[1]) *
                                                    (v[2] * v[2] + v[3] * v[3]));
                               }));
    out.push_back(make_builtin("d4_sinsum", 4, "(sin (+ x1 (* (* x2 x3) x4)))",
                               [](const Row& v) {
                                   return std::sin(v[0] + v[1] * v[2] * v[3]);
                               }));
    out.push_back(make_builtin("d4_sqrtsum", 4, "(sqrt (+ x1 (* (* x2 x3) x4)))",
                               [](const Row& v) { return std::sqrt(v[0] + v[1] * v[2] * v[3]); }));
    out.push_back(make_builtin("d4_recip", 4, "(1/x (+ x1 (* (* x2 x3) x4)))",
                               [](const Row& v) { return 1.0 / (v[0] + v[1] * v[2] * v[3]); }));
    out.push_back(make_builtin("d4_logmix", 4, "(log (+ (/ (* x1 x2) (* x3 x4)) 1))",
                               [](const Row& v) {
                                   return std::log(v[0] * v[1] / (v[2] * v[3]) + 1.0);
                               }));
    out.push_back(make_builtin("d4_dipole", 4, "(* (* x1 x2) (+ (cos (- x3 x4)) 1))",
                               [](const Row& v) {
                                   return v[0] * v[1] * (std::cos(v[2] - v[3]) + 1.0);
                               }));
    out.push_back(make_builtin("d4_prodsqrt", 4, "(* (sqrt (* (* x1 x2) x3)) x4)",
                               [](const Row& v) {
                                   return std::sqrt(v[0] * v[1] * v[2]) * v[3];
                               }));
    out.push_back(make_builtin("d4_sumsq", 4, "(/ (^2 (+ (+ x1 x2) x3)) x4)", [](const Row& v) {
        const double s = v[0] + v[1] + v[2];
        return s * s / v[3];
    }));

    // depth 5
    out.push_back(make_builtin("d5_gauss", 5, "(exp (-x (/ (^2 (- x1 x2)) (* x3 x4))))",
                               [](const Row& v) {
                                   const double d = v[0] - v[1];
                                   return std::exp(-(d * d) / (v[2] * v[3]));
                               }));
    out.push_back(make_builtin("d5_frac", 5, "(/ x1 (+ (/ x2 (+ x3 (1/x x4))) 1))",
                               [](const Row& v) {
                                   return v[0] / (v[1] / (v[2] + 1.0 / v[3]) + 1.0);
                               }));
    out.push_back(make_builtin("d5_sinmix", 5, "(* (sin (+ (* x1 x2) (cos (* x3 x4)))) x1)",
                               [](const Row& v) {
                                   return std::sin(v[0] * v[1] + std::cos(v[2] * v[3])) * v[0];
                               }));
    out.push_back(make_builtin("d5_logsq", 5, "(^2 (log (+ (* (* x1 x2) (* x3 x4)) 1)))",
                               [](const Row& v) {
                                   const double l = std::log(v[0] * v[1] * v[2] * v[3] + 1.0);
                                   return l * l;
                               }));
    out.push_back(make_builtin("d5_nest", 5, "(sqrt (+ x1 (* x2 (+ x3 (^2 x4)))))",
                               [](const Row& v) {
                                   return std::sqrt(v[0] + v[1] * (v[2] + v[3] * v[3]));
                               }));
    out.push_back(make_builtin("d5_res", 5, "(1/x (+ (1/x x1) (1/x (+ x2 (* x3 x4)))))",
                               [](const Row& v) {
                                   return 1.0 / (1.0 / v[0] + 1.0 / (v[1] + v[2] * v[3]));
                               }));
    return out;
}

} // namespace

const std::vector<ProblemSpec>& builtin_problems() {
    static const std::vector<ProblemSpec> problems = make_builtin_problems();
    return problems;
}

const ProblemSpec& builtin_problem(const std::string& name) {
    for (const auto& p : builtin_problems())
        if (p.name == name) return p;
    throw std::runtime_error("unknown problem: " + name);
}

std::vector<ProblemSpec> builtin_problems_at_depth(int depth) {
    std::vector<ProblemSpec> out;
    for (const auto& p : builtin_problems())
        if (p.feasible_depth == depth) out.push_back(p);
    return out;
}

ProblemSpec combine_discontinuous(const ProblemSpec& a, const ProblemSpec& b) {
    if (a.feasible_depth != b.feasible_depth)
        throw std::invalid_argument("combine_discontinuous: depth mismatch (" + a.name + ", " +
                                    b.name + ")");
    if (a.n_vars != b.n_vars)
        throw std::invalid_argument("combine_discontinuous: variable count mismatch");
    ProblemSpec spec;
    spec.name = a.name + "__" + b.name;
    spec.n_vars = a.n_vars + 1;
    spec.var_ranges = a.var_ranges;
    spec.var_ranges.emplace_back(0.0, 1.0);
    spec.var_types = a.var_types;
    spec.var_types.push_back(ValueType::Boolean);
    spec.feasible_depth = a.feasible_depth; // depth class of the components
    const std::string gate = "x" + std::to_string(spec.n_vars);
    spec.expression = "(if " + gate + " " + b.expression + " " + a.expression + ")";
    const auto fa = a.truth;
    const auto fb = b.truth;
    const size_t gate_index = static_cast<size_t>(a.n_vars);
    spec.truth = [fa, fb, gate_index](const Row& v) {
        const double g = v[gate_index];
        return (1.0 - g) * fa(v) + g * fb(v);
    };
    return spec;
}

std::vector<ProblemSpec> discontinuous_problems_at_depth(int depth) {
    const auto base = builtin_problems_at_depth(depth);
    std::vector<ProblemSpec> out;
    for (size_t i = 0; i < base.size(); ++i)
        for (size_t j = i + 1; j < base.size(); ++j)
            out.push_back(combine_discontinuous(base[i], base[j]));
    return out;
}

Dataset generate(const ProblemSpec& spec, size_t n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("generate: need at least one row");
    Dataset d;
    d.name = spec.name;
    d.var_types = spec.var_types;
    d.columns.assign(static_cast<size_t>(spec.n_vars), std::vector<double>(n));
    d.y.resize(n);
    Row row(static_cast<size_t>(spec.n_vars));
    for (size_t r = 0; r < n; ++r) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (spec.var_types[c] == ValueType::Boolean)
                row[c] = rng.next_double() < 0.5 ? 0.0 : 1.0;
            else
                row[c] = rng.next_double(spec.var_ranges[c].first, spec.var_ranges[c].second);
            d.columns[c][r] = row[c];
        }
        d.y[r] = spec.truth(row);
    }
    return d;
}

std::pair<Dataset, Dataset> split(const Dataset& d, double train_fraction, Rng& rng) {
    const size_t n = d.rows();
    if (n < 4) throw std::invalid_argument("split: need at least 4 rows");
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const size_t n_train = static_cast<size_t>(std::floor(train_fraction * static_cast<double>(n)));

    auto take = [&](size_t begin, size_t end) {
        Dataset out;
        out.name = d.name;
        out.var_types = d.var_types;
        out.columns.assign(d.vars(), std::vector<double>(end - begin));
        out.y.resize(end - begin);
        for (size_t k = begin; k < end; ++k) {
            const size_t src = order[k];
            for (size_t c = 0; c < d.vars(); ++c) out.columns[c][k - begin] = d.columns[c][src];
            out.y[k - begin] = d.y[src];
        }
        return out;
    };
    return {take(0, n_train), take(n_train, n)};
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv file: " + path);
    const auto header = split_line(line);
    if (header.size() < 2)
        throw std::runtime_error("csv needs at least one feature and the target: " + path);
    const size_t n_vars = header.size() - 1;

    Dataset d;
    d.name = path;
    d.columns.assign(n_vars, {});
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " cells, got " + std::to_string(cells.size()));
        std::vector<double> values(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) {
            try {
                size_t used = 0;
                values[c] = std::stod(cells[c], &used);
                while (used < cells[c].size() && std::isspace(static_cast<unsigned char>(cells[c][used])))
                    ++used;
                if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": bad numeric cell '" + cells[c] + "'");
            }
            if (!std::isfinite(values[c]))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": non-finite cell");
        }
        for (size_t c = 0; c < n_vars; ++c) d.columns[c].push_back(values[c]);
        d.y.push_back(values[n_vars]);
    }
    if (d.y.empty()) throw std::runtime_error("csv has no data rows: " + path);

    d.var_types.assign(n_vars, ValueType::Real);
    for (size_t c = 0; c < n_vars; ++c) {
        const bool binary = std::all_of(d.columns[c].begin(), d.columns[c].end(),
                                        [](double v) { return v == 0.0 || v == 1.0; });
        if (binary) d.var_types[c] = ValueType::Boolean;
    }
    return d;
}

void save_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv file: " + path);
    for (size_t c = 0; c < d.vars(); ++c) out << "x" << (c + 1) << ",";
    out << "target\n";
    char buf[64];
    for (size_t r = 0; r < d.rows(); ++r) {
        for (size_t c = 0; c < d.vars(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", d.columns[c][r]);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof(buf), "%.17g", d.y[r]);
        out << buf << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct PrefixParser {
    const std::vector<std::string> tokens;
    size_t pos = 0;
    const OperatorSet& opset;
    const TreeTemplate& tmpl;
    Genotype& g;

    static std::vector<std::string> tokenize(const std::string& text) {
        std::vector<std::string> out;
        std::string cur;
        for (char ch : text) {
            if (ch == '(' || ch == ')') {
                if (!cur.empty()) {
                    out.push_back(cur);
                    cur.clear();
                }
                out.push_back(std::string(1, ch));
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!cur.empty()) {
                    out.push_back(cur);
                    cur.clear();
                }
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    }

    const std::string& next() {
        if (pos >= tokens.size()) throw std::runtime_error("prefix expression: unexpected end");
        return tokens[pos++];
    }

    void parse_into(int node) {
        const std::string& tok = next();
        if (tok == "(") {
            const std::string op = next();
            const int id = opset.find(op);
            if (id < 0 || opset[id].is_terminal())
                throw std::runtime_error("prefix expression: unknown operator '" + op + "'");
            if (tmpl.is_leaf(node))
                throw std::runtime_error("prefix expression does not fit the template");
            g.set_symbol(node, id, opset);
            for (int k = 0; k < opset[id].arity; ++k) parse_into(tmpl.child(node, k));
            if (next() != ")") throw std::runtime_error("prefix expression: expected ')'");
            return;
        }
        const int id = opset.find(tok);
        if (id >= 0) {
            if (!opset[id].is_terminal())
                throw std::runtime_error("prefix expression: operator '" + tok +
                                         "' needs arguments");
            g.set_symbol(node, id, opset);
            return;
        }
        try {
            const double value = std::stod(tok);
            const int cid = opset.find("const");
            if (cid < 0)
                throw std::runtime_error("prefix expression: constant without const terminal");
            g.set_symbol(node, cid, opset, value);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("prefix expression: unknown token '" + tok + "'");
        }
    }
};

} // namespace

Genotype encode_expression(const std::string& prefix, const OperatorSet& opset,
                           const TreeTemplate& tmpl) {
    const auto terminals = opset.terminal_ids();
    if (terminals.empty()) throw std::runtime_error("encode_expression: no terminals in set");
    Genotype g;
    g.tmpl = tmpl;
    g.nodes.resize(static_cast<size_t>(tmpl.node_count));
    for (int i = 0; i < tmpl.node_count; ++i) g.set_symbol(i, terminals.front(), opset);

    PrefixParser parser{PrefixParser::tokenize(prefix), 0, opset, tmpl, g};
    parser.parse_into(0);
    if (parser.pos != parser.tokens.size())
        throw std::runtime_error("prefix expression: trailing tokens");
    return g;
}

} // namespace gpg
