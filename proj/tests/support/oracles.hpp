#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcdist/ir/model.hpp"
#include "mcdist/lp/lp.hpp"
#include "mcdist/pf/newton.hpp"

namespace mcdist::test {

/// Recursive-descent infix evaluator used as the RPN oracle.
class Infix {
  public:
    explicit Infix(std::string text) : s_(std::move(text)) {}
    double run() {
        double v = expr();
        skip();
        if (pos_ != s_.size()) throw std::runtime_error("trailing text in " + s_);
        return v;
    }

  private:
    void skip() {
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    }
    double expr() {
        double v = term();
        for (skip(); pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-'); skip()) {
            char op = s_[pos_++];
            double r = term();
            v = op == '+' ? v + r : v - r;
        }
        return v;
    }
    double term() {
        double v = factor();
        for (skip(); pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/'); skip()) {
            char op = s_[pos_++];
            double r = factor();
            v = op == '*' ? v * r : v / r;
        }
        return v;
    }
    double factor() {
        skip();
        for (const char* fn : {"sqrt", "sqr", "inv"}) {
            std::string name(fn);
            if (s_.compare(pos_, name.size() + 1, name + "(") == 0) {
                pos_ += name.size() + 1;
                double a = expr();
                skip();
                ++pos_;  // ')'
                if (name == "sqrt") return std::sqrt(a);
                if (name == "sqr") return a * a;
                return 1.0 / a;
            }
        }
        if (s_[pos_] == '(') {
            ++pos_;
            double v = expr();
            skip();
            ++pos_;
            return v;
        }
        std::size_t used = 0;
        double v = std::stod(s_.substr(pos_), &used);
        pos_ += used;
        return v;
    }

    std::string s_;
    std::size_t pos_ = 0;
};

struct RandomExpr {
    std::string rpn;
    std::string infix;
    double value;
};

// Random well-formed expression; the tracked value only steers away from
// division by tiny numbers and sqrt of negatives.
inline RandomExpr random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 7);
    std::uniform_real_distribution<double> num(0.25, 9.75);
    int k = depth <= 0 ? 0 : pick(rng);
    if (k <= 1) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", num(rng));
        double v = std::stod(buf);
        return {buf, buf, v};
    }
    if (k == 2) {
        RandomExpr a = random_expr(rng, depth - 1);
        if (a.value > 0) return {a.rpn + " sqrt", "sqrt(" + a.infix + ")", std::sqrt(a.value)};
        return {a.rpn + " sqr", "sqr(" + a.infix + ")", a.value * a.value};
    }
    if (k == 3) {
        RandomExpr a = random_expr(rng, depth - 1);
        if (std::abs(a.value) > 1e-3) return {a.rpn + " inv", "inv(" + a.infix + ")", 1.0 / a.value};
        return a;
    }
    RandomExpr a = random_expr(rng, depth - 1);
    RandomExpr b = random_expr(rng, depth - 1);
    const char ops[] = {'+', '-', '*', '/'};
    char op = ops[k - 4];
    if (op == '/' && std::abs(b.value) < 1e-3) op = '*';
    double v = op == '+' ? a.value + b.value : op == '-' ? a.value - b.value : op == '*' ? a.value * b.value
                                                                                          : a.value / b.value;
    return {a.rpn + " " + b.rpn + " " + op, "(" + a.infix + " " + op + " " + b.infix + ")", v};
}

/// Largest entrywise difference between the analytic Jacobian and central
/// differences, relative to max(1, |J_ij|).
inline double jacobian_error(const pf::NewtonSystem& sys, const RVector& x, double h = 1e-7) {
    const Eigen::MatrixXd j = Eigen::MatrixXd(sys.jacobian(x));
    double worst = 0.0;
    for (int c = 0; c < sys.size(); ++c) {
        RVector xp = x, xm = x;
        xp(c) += h;
        xm(c) -= h;
        const RVector fd = (sys.residual(xp) - sys.residual(xm)) / (2.0 * h);
        for (int r = 0; r < sys.size(); ++r) {
            worst = std::max(worst, std::abs(fd(r) - j(r, c)) / std::max(1.0, std::abs(j(r, c))));
        }
    }
    return worst;
}

/// Largest |x1 x2 - |args|^2| over the rotated cones of one label family.
inline double worst_rotated_gap(const ir::MathModel& m, const std::vector<double>& x, const std::string& family) {
    double worst = 0.0;
    for (const auto& c : m.constraints) {
        if (c.label.compare(0, family.size() + 1, family + "(") != 0) continue;
        const auto& r = std::get<ir::RotatedSocConstraint>(c.body);
        double sq = 0.0;
        for (const auto& a : r.args) sq += std::pow(ir::evaluate(a, x), 2);
        worst = std::max(worst, std::abs(ir::evaluate(r.x1, x) * ir::evaluate(r.x2, x) - sq));
    }
    return worst;
}

/// Box-constrained equality LP: A x = b, 0 <= x <= upper, min c^T x.
struct BoxLp {
    Eigen::MatrixXd a;
    Eigen::VectorXd b, c;
    double upper = 10.0;

    lp::LpProblem problem(ir::Sense sense = ir::Sense::Eq) const {
        lp::LpProblem p;
        p.num_vars = static_cast<int>(a.cols());
        p.num_rows = static_cast<int>(a.rows());
        for (int i = 0; i < p.num_rows; ++i) {
            for (int j = 0; j < p.num_vars; ++j) p.entries.push_back({i, j, a(i, j)});
            p.senses.push_back(sense);
            p.rhs.push_back(b(i));
            p.row_labels.push_back("r" + std::to_string(i));
        }
        for (int j = 0; j < p.num_vars; ++j) {
            p.lb.push_back(0.0);
            p.ub.push_back(upper);
            p.cost.push_back(c(j));
            p.var_names.push_back("x" + std::to_string(j));
        }
        return p;
    }
};

/// Entries of A and c uniform in [-1, 1]; b = A x0 for x0 inside the box,
/// so the instance is feasible and bounded.
inline BoxLp random_box_lp(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0), start(0.0, 10.0);
    BoxLp in{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows), Eigen::VectorXd(cols)};
    Eigen::VectorXd x0(cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) in.a(i, j) = coef(rng);
    for (int j = 0; j < cols; ++j) {
        x0(j) = start(rng);
        in.c(j) = coef(rng);
    }
    in.b = in.a * x0;
    return in;
}

/// Best objective over every basic solution: each choice of rows() basic
/// columns with the remaining columns at either bound. +inf when none is
/// feasible.
inline double brute_force(const BoxLp& in) {
    const int m = static_cast<int>(in.a.rows()), n = static_cast<int>(in.a.cols());
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + m, true);
    do {
        std::vector<int> basic, rest;
        for (int j = 0; j < n; ++j) (pick[j] ? basic : rest).push_back(j);
        Eigen::MatrixXd bm(m, m);
        for (int k = 0; k < m; ++k) bm.col(k) = in.a.col(basic[k]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(bm);
        if (!lu.isInvertible()) continue;
        for (int mask = 0; mask < (1 << (n - m)); ++mask) {
            Eigen::VectorXd rhs = in.b;
            double obj = 0.0;
            for (int k = 0; k < n - m; ++k) {
                const double v = (mask >> k & 1) ? in.upper : 0.0;
                rhs -= in.a.col(rest[k]) * v;
                obj += in.c(rest[k]) * v;
            }
            const Eigen::VectorXd xb = lu.solve(rhs);
            if (xb.minCoeff() < -1e-9 || xb.maxCoeff() > in.upper + 1e-9) continue;
            for (int k = 0; k < m; ++k) obj += in.c(basic[k]) * xb(k);
            best = std::min(best, obj);
        }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return best;
}

}  // namespace mcdist::test
