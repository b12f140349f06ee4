#pragma once

#include <string>
#include <vector>

#include "mcdist/ir/model.hpp"

namespace mcdist::lp {

struct Entry {
    int row;
    int col;
    double value;
};

/// min c^T x + c0 s.t. rows (A x) sense rhs, lb <= x <= ub.
struct LpProblem {
    int num_vars = 0;
    int num_rows = 0;
    std::vector<Entry> entries;  ///< at most one per (row, col)
    std::vector<ir::Sense> senses;
    std::vector<double> rhs;
    std::vector<double> lb, ub;
    std::vector<double> cost;
    double cost_constant = 0.0;
    std::vector<std::string> var_names;
    std::vector<std::string> row_labels;

    /// Throws ModelError when the dimensions disagree or lb > ub.
    void check() const;
};

/// Rows and bounds of a linear model. Throws UnsupportedError naming the
/// first nonlinear constraint, or for a quadratic objective.
LpProblem extract(const ir::MathModel& model);

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus status);

struct LpOptions {
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-9;
    int max_iterations = 200000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int stall_limit = 50;
    /// Geometric-mean row/column equilibration.
    bool scale = true;
};

struct LpResult {
    LpStatus status = LpStatus::IterationLimit;
    std::vector<double> x;
    ir::Assignment assignment;
    double objective = 0.0;
    /// d objective / d rhs per row: <= 0 on active <= rows, >= 0 on >= rows.
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    /// b^T y plus the bound terms of the reduced costs.
    double dual_objective = 0.0;
    double primal_infeasibility = 0.0;
    /// On infeasibility: y with y_i <= 0 on <= rows and y_i >= 0 on >= rows
    /// such that b^T y exceeds the largest value of (A^T y)^T x over the box.
    std::vector<double> farkas;
    double farkas_gap = 0.0;
    int iterations = 0;
    bool used_bland = false;
    std::string message;
};

LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});
LpResult solve_lp(const ir::MathModel& model, const LpOptions& options = {});

/// b^T y - max over the box of (A^T y)^T x; -inf when y has the wrong sign
/// on an inequality row or the maximum is unbounded. Positive for a valid
/// infeasibility certificate.
double farkas_gap(const LpProblem& problem, const std::vector<double>& y);

}  // namespace mcdist::lp
