#include "gpg/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace gpg {

namespace protected_ops {

double div(double a, double b) { return std::abs(b) < kDivGuard ? 1.0 : a / b; }

double inv(double x) { return std::abs(x) < kDivGuard ? 1.0 : 1.0 / x; }

double log_abs(double x) { return std::abs(x) < kDivGuard ? 0.0 : std::log(std::abs(x)); }

double sqrt_abs(double x) { return std::sqrt(std::abs(x)); }

double exp_clamped(double x) { return std::exp(std::min(x, kExpClamp)); }

} // namespace protected_ops

namespace {

SymbolSpec make_op(std::string name, OpCode op, int arity, bool commutative,
                   std::array<ValueType, 3> in, ValueType out, bool ternary = false) {
    SymbolSpec s;
    s.name = std::move(name);
    s.kind = SymbolKind::Operator;
    s.op = op;
    s.arity = arity;
    s.commutative = commutative;
    s.ternary_extension = ternary;
    s.input_types = in;
    s.output_type = out;
    return s;
}

constexpr std::array<ValueType, 3> kRRR{ValueType::Real, ValueType::Real, ValueType::Real};
constexpr std::array<ValueType, 3> kBBB{ValueType::Boolean, ValueType::Boolean,
                                        ValueType::Boolean};
constexpr std::array<ValueType, 3> kBRR{ValueType::Boolean, ValueType::Real, ValueType::Real};

SymbolSpec builtin_symbol(const std::string& name) {
    if (name == "+") return make_op("+", OpCode::Add, 2, true, kRRR, ValueType::Real, true);
    if (name == "-") return make_op("-", OpCode::Sub, 2, false, kRRR, ValueType::Real, true);
    if (name == "*") return make_op("*", OpCode::Mul, 2, true, kRRR, ValueType::Real, true);
    if (name == "/") return make_op("/", OpCode::Div, 2, false, kRRR, ValueType::Real);
    if (name == "-x") return make_op("-x", OpCode::Neg, 1, false, kRRR, ValueType::Real);
    if (name == "1/x") return make_op("1/x", OpCode::Inv, 1, false, kRRR, ValueType::Real);
    if (name == "sin") return make_op("sin", OpCode::Sin, 1, false, kRRR, ValueType::Real);
    if (name == "cos") return make_op("cos", OpCode::Cos, 1, false, kRRR, ValueType::Real);
    if (name == "log") return make_op("log", OpCode::Log, 1, false, kRRR, ValueType::Real);
    if (name == "exp") return make_op("exp", OpCode::Exp, 1, false, kRRR, ValueType::Real);
    if (name == "sqrt") return make_op("sqrt", OpCode::Sqrt, 1, false, kRRR, ValueType::Real);
    if (name == "^2") return make_op("^2", OpCode::Pow2, 1, false, kRRR, ValueType::Real);
    if (name == "^3") return make_op("^3", OpCode::Pow3, 1, false, kRRR, ValueType::Real);
    if (name == "^4") return make_op("^4", OpCode::Pow4, 1, false, kRRR, ValueType::Real);
    if (name == "^5") return make_op("^5", OpCode::Pow5, 1, false, kRRR, ValueType::Real);
    if (name == "=") return make_op("=", OpCode::Eq, 2, true, kRRR, ValueType::Boolean);
    if (name == ">") return make_op(">", OpCode::Gt, 2, false, kRRR, ValueType::Boolean);
    if (name == "<") return make_op("<", OpCode::Lt, 2, false, kRRR, ValueType::Boolean);
    if (name == "if")
        return make_op("if", OpCode::IfThenElse, 3, false, kBRR, ValueType::Real);
    if (name == "AND")
        return make_op("AND", OpCode::And, 2, true, kBBB, ValueType::Boolean, true);
    if (name == "OR") return make_op("OR", OpCode::Or, 2, true, kBBB, ValueType::Boolean, true);
    if (name == "NOT") return make_op("NOT", OpCode::Not, 1, false, kBBB, ValueType::Boolean);
    throw std::runtime_error("unknown operator name: " + name);
}

const std::vector<std::string>& builtin_member_names(BuiltinSet which) {
    static const std::vector<std::string> t22 = {
        "+", "-x", "-", "*", "1/x", "/",  "sin", "cos", "log", "exp", "sqrt",
        "^2", "^3", "^4", "^5", "=", ">", "<",  "if",  "AND", "OR",  "NOT"};
    static const std::vector<std::string> t11 = {"+",    "-",  "*",  "/",  "sin", "log",
                                                 "sqrt", "^2", "^3", "<", "if"};
    static const std::vector<std::string> b15 = {"+",   "-x",  "-",  "*",  "1/x",
                                                 "/",   "sin", "cos", "log", "exp",
                                                 "sqrt", "^2",  "^3", "^4", "^5"};
    static const std::vector<std::string> b9 = {"+",   "-",    "*",  "/", "sin",
                                                "log", "sqrt", "^2", "^3"};
    static const std::vector<std::string> b4 = {"+", "-", "*", "/"};
    switch (which) {
        case BuiltinSet::T22: return t22;
        case BuiltinSet::T11: return t11;
        case BuiltinSet::B15: return b15;
        case BuiltinSet::B9: return b9;
        case BuiltinSet::B4: return b4;
    }
    throw std::logic_error("bad BuiltinSet");
}

} // namespace

int OperatorSet::branching_factor() const {
    int b = 2;
    for (const auto& s : symbols) b = std::max(b, s.arity);
    return b;
}

int OperatorSet::find(const std::string& name) const {
    for (size_t i = 0; i < symbols.size(); ++i)
        if (symbols[i].name == name) return static_cast<int>(i);
    return -1;
}

void OperatorSet::add_variable(int var_index, ValueType type) {
    SymbolSpec s;
    s.name = "x" + std::to_string(var_index + 1);
    s.kind = SymbolKind::Variable;
    s.op = OpCode::Var;
    s.arity = 0;
    s.output_type = type;
    s.var_index = var_index;
    symbols.push_back(std::move(s));
}

void OperatorSet::add_variables(int n, ValueType type) {
    for (int i = 0; i < n; ++i) add_variable(i, type);
}

void OperatorSet::add_constant() {
    SymbolSpec s;
    s.name = "const";
    s.kind = SymbolKind::Constant;
    s.op = OpCode::Const;
    s.arity = 0;
    s.output_type = ValueType::Real;
    symbols.push_back(std::move(s));
}

std::vector<int> OperatorSet::terminal_ids() const {
    std::vector<int> ids;
    for (int i = 0; i < size(); ++i)
        if (symbols[static_cast<size_t>(i)].is_terminal()) ids.push_back(i);
    return ids;
}

std::vector<int> OperatorSet::operator_ids() const {
    std::vector<int> ids;
    for (int i = 0; i < size(); ++i)
        if (!symbols[static_cast<size_t>(i)].is_terminal()) ids.push_back(i);
    return ids;
}

bool OperatorSet::has_terminal_of(ValueType t) const {
    for (const auto& s : symbols)
        if (s.is_terminal() && s.output_type == t) return true;
    return false;
}

OperatorSet builtin_operator_set(BuiltinSet which) {
    OperatorSet set;
    for (const auto& name : builtin_member_names(which)) set.symbols.push_back(builtin_symbol(name));
    return set;
}

OperatorSet custom_operator_set(const std::vector<std::string>& names) {
    if (names.empty()) throw std::runtime_error("custom operator set: no symbols given");
    OperatorSet set;
    for (const auto& name : names) {
        if (set.find(name) >= 0)
            throw std::runtime_error("custom operator set: duplicate symbol " + name);
        set.symbols.push_back(builtin_symbol(name));
    }
    return set;
}

OperatorSet operator_set_from_spec(const std::string& spec) {
    if (spec.find(',') == std::string::npos) return builtin_operator_set(builtin_set_from_name(spec));
    std::vector<std::string> names;
    std::string cur;
    for (char ch : spec) {
        if (ch == ',') {
            if (!cur.empty()) names.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) names.push_back(cur);
    return custom_operator_set(names);
}

BuiltinSet builtin_set_from_name(const std::string& name) {
    if (name == "T22") return BuiltinSet::T22;
    if (name == "T11") return BuiltinSet::T11;
    if (name == "B15") return BuiltinSet::B15;
    if (name == "B9") return BuiltinSet::B9;
    if (name == "B4") return BuiltinSet::B4;
    throw std::runtime_error("unknown operator set: " + name +
                             " (expected T22, T11, B15, B9 or B4)");
}

std::string builtin_set_name(BuiltinSet which) {
    switch (which) {
        case BuiltinSet::T22: return "T22";
        case BuiltinSet::T11: return "T11";
        case BuiltinSet::B15: return "B15";
        case BuiltinSet::B9: return "B9";
        case BuiltinSet::B4: return "B4";
    }
    return "?";
}

namespace {

inline bool truthy(double x) { return x >= 0.5; }

inline double unary_kernel(OpCode op, double a) {
    using namespace protected_ops;
    switch (op) {
        case OpCode::Neg: return -a;
        case OpCode::Inv: return inv(a);
        case OpCode::Sin: return std::sin(a);
        case OpCode::Cos: return std::cos(a);
        case OpCode::Log: return log_abs(a);
        case OpCode::Exp: return exp_clamped(a);
        case OpCode::Sqrt: return sqrt_abs(a);
        case OpCode::Pow2: return a * a;
        case OpCode::Pow3: return a * a * a;
        case OpCode::Pow4: {
            const double a2 = a * a;
            return a2 * a2;
        }
        case OpCode::Pow5: {
            const double a2 = a * a;
            return a2 * a2 * a;
        }
        case OpCode::Not: return truthy(a) ? 0.0 : 1.0;
        default: break;
    }
    throw std::logic_error("unary_kernel: bad op");
}

inline double binary_kernel(OpCode op, double a, double b) {
    using namespace protected_ops;
    switch (op) {
        case OpCode::Add: return a + b;
        case OpCode::Sub: return a - b;
        case OpCode::Mul: return a * b;
        case OpCode::Div: return div(a, b);
        case OpCode::Eq: return std::abs(a - b) <= kEqTolerance ? 1.0 : 0.0;
        case OpCode::Gt: return a > b ? 1.0 : 0.0;
        case OpCode::Lt: return a < b ? 1.0 : 0.0;
        case OpCode::And: return (truthy(a) && truthy(b)) ? 1.0 : 0.0;
        case OpCode::Or: return (truthy(a) || truthy(b)) ? 1.0 : 0.0;
        default: break;
    }
    throw std::logic_error("binary_kernel: bad op");
}

} // namespace

void apply_symbol(const SymbolSpec& sym, std::span<const double* const> args, size_t n,
                  double* out) {
    const size_t effective_arity = args.size();
    if (sym.is_terminal() || effective_arity < static_cast<size_t>(sym.arity))
        throw std::invalid_argument("apply_symbol: arity mismatch for " + sym.name);
    if (effective_arity > static_cast<size_t>(sym.arity) && !sym.ternary_extension)
        throw std::invalid_argument("apply_symbol: " + sym.name + " is not ternary-extensible");

    if (sym.op == OpCode::IfThenElse) {
        const double* c = args[0];
        const double* t = args[1];
        const double* e = args[2];
        for (size_t i = 0; i < n; ++i) out[i] = truthy(c[i]) ? t[i] : e[i];
        return;
    }
    if (sym.arity == 1) {
        const double* a = args[0];
        for (size_t i = 0; i < n; ++i) out[i] = unary_kernel(sym.op, a[i]);
        return;
    }
    const double* a = args[0];
    const double* b = args[1];
    if (effective_arity == 2) {
        for (size_t i = 0; i < n; ++i) out[i] = binary_kernel(sym.op, a[i], b[i]);
    } else {
        const double* c = args[2];
        for (size_t i = 0; i < n; ++i)
            out[i] = binary_kernel(sym.op, binary_kernel(sym.op, a[i], b[i]), c[i]);
    }
}

std::vector<double> symbol_semantics(const SymbolSpec& sym,
                                     const std::vector<std::vector<double>>& args) {
    if (args.empty()) throw std::invalid_argument("symbol_semantics: no arguments");
    const size_t n = args.front().size();
    std::vector<const double*> ptrs;
    for (const auto& a : args) {
        if (a.size() != n) throw std::invalid_argument("symbol_semantics: ragged arguments");
        ptrs.push_back(a.data());
    }
    std::vector<double> out(n);
    apply_symbol(sym, std::span<const double* const>(ptrs.data(), ptrs.size()), n, out.data());
    return out;
}

} // namespace gpg
