#pragma once

#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace mcdist::ir {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearTerm {
    int var;
    double coef;
};

struct LinearExpr {
    std::vector<LinearTerm> terms;
    double constant = 0.0;

    LinearExpr() = default;
    LinearExpr(double c) : constant(c) {}  // NOLINT: scalars promote to expressions
    static LinearExpr variable(int var, double coef = 1.0);

    LinearExpr& add(int var, double coef);
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);
    LinearExpr& operator+=(const LinearExpr& other) { return add(other); }
    LinearExpr& operator-=(const LinearExpr& other) { return add(other, -1.0); }
    LinearExpr& operator*=(double s);
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double s, LinearExpr a);
LinearExpr operator-(LinearExpr a);

struct QuadTerm {
    int a;
    int b;
    double coef;
};

struct QuadExpr {
    LinearExpr linear;
    std::vector<QuadTerm> quad;

    QuadExpr() = default;
    QuadExpr(LinearExpr l) : linear(std::move(l)) {}  // NOLINT
    QuadExpr(double c) : linear(c) {}                 // NOLINT

    QuadExpr& add_product(int a, int b, double coef);
    /// coef * x * y for linear expressions x, y.
    QuadExpr& add_product(const LinearExpr& x, const LinearExpr& y, double coef = 1.0);
    QuadExpr& add(const QuadExpr& other, double scale = 1.0);
    bool is_linear() const { return quad.empty(); }
};

enum class Sense { Eq, Le, Ge };

struct VariableDecl {
    std::string name;
    double lb = -kInf;
    double ub = kInf;
};

struct LinearConstraint {
    LinearExpr expr;
    Sense sense = Sense::Eq;
    double rhs = 0.0;
};

struct QuadraticConstraint {
    QuadExpr expr;
    Sense sense = Sense::Eq;
    double rhs = 0.0;
};

/// ||args||_2 <= bound
struct SocConstraint {
    std::vector<LinearExpr> args;
    LinearExpr bound;
};

/// ||args||^2 <= x1 * x2 with x1, x2 >= 0
struct RotatedSocConstraint {
    LinearExpr x1;
    LinearExpr x2;
    std::vector<LinearExpr> args;
};

using ConstraintBody = std::variant<LinearConstraint, QuadraticConstraint, SocConstraint, RotatedSocConstraint>;

struct Constraint {
    std::string label;
    ConstraintBody body;
};

/// ||[2 args, x1 - x2]|| <= x1 + x2, which accepts exactly the same points.
SocConstraint rotated_soc_to_soc(const RotatedSocConstraint& c);

class MathModel {
  public:
    std::string formulation;
    std::map<std::string, std::string> metadata;
    std::vector<VariableDecl> variables;
    std::vector<Constraint> constraints;
    /// Always minimized.
    QuadExpr objective;

    int add_variable(const std::string& name, double lb = -kInf, double ub = kInf);
    /// Index of a declared variable; throws ModelError when absent.
    int var(const std::string& name) const;
    bool has_variable(const std::string& name) const { return lookup_.count(name) != 0; }
    LinearExpr v(const std::string& name, double coef = 1.0) const { return LinearExpr::variable(var(name), coef); }

    void add_linear(const std::string& label, LinearExpr expr, Sense sense, double rhs = 0.0);
    void add_quadratic(const std::string& label, QuadExpr expr, Sense sense, double rhs = 0.0);
    void add_soc(const std::string& label, std::vector<LinearExpr> args, LinearExpr bound);
    void add_rotated_soc(const std::string& label, LinearExpr x1, LinearExpr x2, std::vector<LinearExpr> args);

    /// Same model with every rotated cone rewritten in norm form.
    MathModel to_conic() const;

    bool is_linear() const;
    std::map<std::string, std::size_t> constraint_counts() const;

  private:
    std::unordered_map<std::string, int> lookup_;
};

/// Variable name -> value.
using Assignment = std::map<std::string, double>;

double evaluate(const LinearExpr& e, const std::vector<double>& x);
double evaluate(const QuadExpr& e, const std::vector<double>& x);

/// Values in model variable order; throws ModelError naming a missing variable.
std::vector<double> values_for(const MathModel& model, const Assignment& a);

}  // namespace mcdist::ir
