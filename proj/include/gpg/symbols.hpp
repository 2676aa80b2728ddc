#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gpg {

enum class ValueType : uint8_t { Real, Boolean };

enum class SymbolKind : uint8_t { Operator, Variable, Constant };

// Built-in operator codes. Var/Const are terminal codes so that a genotype
// node is fully described by (symbol id, constant value).
enum class OpCode : uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Neg,  // unary minus
    Inv,  // 1/x
    Sin,
    Cos,
    Log,
    Exp,
    Sqrt,
    Pow2,
    Pow3,
    Pow4,
    Pow5,
    Eq,
    Gt,
    Lt,
    IfThenElse,
    And,
    Or,
    Not,
    Var,
    Const,
};

struct SymbolSpec {
    std::string name;
    SymbolKind kind = SymbolKind::Operator;
    OpCode op = OpCode::Const;
    int arity = 0; // 0 for terminals
    bool commutative = false;
    bool ternary_extension = false; // +, -, *, AND, OR only
    std::array<ValueType, 3> input_types{ValueType::Real, ValueType::Real, ValueType::Real};
    ValueType output_type = ValueType::Real;
    int var_index = -1; // kind == Variable

    bool is_terminal() const { return arity == 0; }
};

// The symbol vocabulary of one run: built-in operators plus the problem's
// variables and (optionally) an ephemeral constant terminal.
class OperatorSet {
public:
    static constexpr double kConstMin = -5.0;
    static constexpr double kConstMax = 5.0;

    std::vector<SymbolSpec> symbols;
    bool arithmetic_boolean_constraint_enabled = true;

    int branching_factor() const;

    int size() const { return static_cast<int>(symbols.size()); }
    const SymbolSpec& operator[](int id) const { return symbols[static_cast<size_t>(id)]; }

    // -1 when absent
    int find(const std::string& name) const;

    void add_variable(int var_index, ValueType type);
    void add_variables(int n, ValueType type = ValueType::Real);
    void add_constant();

    std::vector<int> terminal_ids() const;
    std::vector<int> operator_ids() const;
    bool has_constant() const { return find("const") >= 0; }

    // terminal output types present in the set
    bool has_terminal_of(ValueType t) const;
};

enum class BuiltinSet { T22, T11, B15, B9, B4 };

// Table-driven construction of the five built-in operator sets. Variables and
// constants are added separately by the caller.
OperatorSet builtin_operator_set(BuiltinSet which);
BuiltinSet builtin_set_from_name(const std::string& name);
std::string builtin_set_name(BuiltinSet which);

// custom set from an explicit list of built-in symbol names
OperatorSet custom_operator_set(const std::vector<std::string>& names);

// either a built-in set name (T22, ...) or a comma-separated symbol list
OperatorSet operator_set_from_spec(const std::string& spec);

// Protected element-wise semantics. `args` spans must all have length n.
// Boolean results are encoded as 0.0/1.0. Effective arity of 3 on binary
// extensible operators folds left: (a op b) op c.
void apply_symbol(const SymbolSpec& sym, std::span<const double* const> args, size_t n,
                  double* out);

// scalar convenience used by tests and ground-truth encodings
std::vector<double> symbol_semantics(const SymbolSpec& sym,
                                     const std::vector<std::vector<double>>& args);

namespace protected_ops {
constexpr double kDivGuard = 1e-10;
constexpr double kEqTolerance = 1e-9;
constexpr double kExpClamp = 300.0;

double div(double a, double b);
double inv(double x);
double log_abs(double x);
double sqrt_abs(double x);
double exp_clamped(double x);
} // namespace protected_ops

} // namespace gpg
