#include <cmath>

#include <Eigen/Dense>

#include "mcdist/common/errors.hpp"
#include "mcdist/common/linalg.hpp"
#include "mcdist/lp/lp.hpp"

namespace mcdist::lp {

namespace {

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kInf = ir::kInf;
constexpr double kPivotTol = 1e-9;
constexpr double kTieTol = 1e-12;

/// Row and column factors, rounded to powers of two so scaling is exact.
void equilibrate(const LpProblem& p, RVector& row, RVector& col, bool enabled) {
    row = RVector::Ones(p.num_rows);
    col = RVector::Ones(p.num_vars);
    if (!enabled || p.entries.empty()) return;
    auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
    for (int pass = 0; pass < 4; ++pass) {
        RVector lo = RVector::Constant(p.num_rows, kInf), hi = RVector::Zero(p.num_rows);
        for (const auto& e : p.entries) {
            const double v = std::abs(e.value) * row[e.row] * col[e.col];
            lo[e.row] = std::min(lo[e.row], v);
            hi[e.row] = std::max(hi[e.row], v);
        }
        for (int i = 0; i < p.num_rows; ++i) {
            if (hi[i] > 0.0) row[i] *= pow2(1.0 / std::sqrt(lo[i] * hi[i]));
        }
        RVector clo = RVector::Constant(p.num_vars, kInf), chi = RVector::Zero(p.num_vars);
        for (const auto& e : p.entries) {
            const double v = std::abs(e.value) * row[e.row] * col[e.col];
            clo[e.col] = std::min(clo[e.col], v);
            chi[e.col] = std::max(chi[e.col], v);
        }
        for (int j = 0; j < p.num_vars; ++j) {
            if (chi[j] > 0.0) col[j] *= pow2(1.0 / std::sqrt(clo[j] * chi[j]));
        }
    }
}

/// Bounded-variable primal simplex on a dense tableau. Columns are the
/// scaled structural variables, then one slack per inequality row, then
/// one artificial per row.
class Simplex {
  public:
    Simplex(const LpProblem& p, const LpOptions& o) : p_(p), opt_(o) {
        equilibrate(p, row_scale_, col_scale_, o.scale);
        m_ = p.num_rows;
        n_ = p.num_vars;
        int slacks = 0;
        for (auto s : p.senses) slacks += s != ir::Sense::Eq;
        art0_ = n_ + slacks;
        cols_ = art0_ + m_;

        a_ = Tableau::Zero(m_, cols_);
        for (const auto& e : p.entries) a_(e.row, e.col) += e.value * row_scale_[e.row] * col_scale_[e.col];
        lb_.resize(cols_);
        ub_.resize(cols_);
        cost_ = RVector::Zero(cols_);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = p.lb[j] / col_scale_[j];
            ub_[j] = p.ub[j] / col_scale_[j];
            cost_[j] = p.cost[j] * col_scale_[j];
        }
        int s = n_;
        for (int i = 0; i < m_; ++i) {
            if (p.senses[i] == ir::Sense::Eq) continue;
            a_(i, s) = p.senses[i] == ir::Sense::Le ? 1.0 : -1.0;
            lb_[s] = 0.0;
            ub_[s] = kInf;
            ++s;
        }
        b_ = RVector(m_);
        for (int i = 0; i < m_; ++i) b_[i] = p.rhs[i] * row_scale_[i];

        // nonbasic start at a finite bound, or zero when free
        x_ = RVector::Zero(cols_);
        for (int j = 0; j < art0_; ++j) {
            if (std::isfinite(lb_[j])) x_[j] = lb_[j];
            else if (std::isfinite(ub_[j])) x_[j] = ub_[j];
        }
        const RVector r = b_ - a_.leftCols(art0_) * x_.head(art0_);
        basis_.resize(m_);
        basic_.assign(cols_, false);
        for (int i = 0; i < m_; ++i) {
            const double sigma = r[i] >= 0.0 ? 1.0 : -1.0;
            a_(i, art0_ + i) = sigma;
            lb_[art0_ + i] = 0.0;
            ub_[art0_ + i] = kInf;
            x_[art0_ + i] = std::abs(r[i]);
            basis_[i] = art0_ + i;
            basic_[art0_ + i] = true;
        }
        t_ = a_;
        for (int i = 0; i < m_; ++i) t_.row(i) *= a_(i, art0_ + i);
    }

    LpResult run() {
        LpResult res;
        RVector phase1 = RVector::Zero(cols_);
        phase1.tail(m_).setOnes();
        const LpStatus s1 = iterate(phase1);
        if (s1 == LpStatus::IterationLimit) return finish(res, LpStatus::IterationLimit, "iteration limit in phase 1");
        const double infeas = x_.tail(m_).sum();
        if (infeas > opt_.feasibility_tol) {
            res.farkas = unscale_duals(duals(phase1));
            res.farkas_gap = farkas_gap(p_, res.farkas);
            return finish(res, LpStatus::Infeasible, "infeasible: artificial sum " + std::to_string(infeas));
        }
        for (int j = art0_; j < cols_; ++j) {
            ub_[j] = 0.0;
            x_[j] = 0.0;
        }
        drive_out_artificials();
        const LpStatus s2 = iterate(cost_);
        if (s2 != LpStatus::Optimal) {
            return finish(res, s2, s2 == LpStatus::Unbounded ? "objective unbounded below" : "iteration limit in phase 2");
        }
        refactor();
        res.duals = unscale_duals(duals(cost_));
        return finish(res, LpStatus::Optimal, "optimal");
    }

  private:
    bool fixed(int j) const { return lb_[j] == ub_[j]; }

    RVector reduced_costs(const RVector& c) const {
        RVector cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = c[basis_[i]];
        return c - (cb.transpose() * t_).transpose();
    }

    LpStatus iterate(const RVector& c) {
        d_ = reduced_costs(c);
        int stall = 0;
        while (true) {
            if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
            int q = -1;
            double dir = 0.0, best = 0.0;
            for (int j = 0; j < cols_; ++j) {
                if (basic_[j] || fixed(j)) continue;
                double dj = d_[j];
                double dj_dir = 0.0;
                if (dj < -opt_.optimality_tol && x_[j] < ub_[j]) dj_dir = 1.0;
                else if (dj > opt_.optimality_tol && x_[j] > lb_[j]) dj_dir = -1.0;
                if (dj_dir == 0.0) continue;
                if (bland_) {
                    q = j;
                    dir = dj_dir;
                    break;
                }
                if (std::abs(dj) > best) {
                    best = std::abs(dj);
                    q = j;
                    dir = dj_dir;
                }
            }
            if (q < 0) return LpStatus::Optimal;

            double theta = std::isfinite(lb_[q]) && std::isfinite(ub_[q]) ? ub_[q] - lb_[q] : kInf;
            int r = -1;
            double r_alpha = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = dir * t_(i, q);
                const int bv = basis_[i];
                double lim;
                if (a > kPivotTol) lim = std::isfinite(lb_[bv]) ? (x_[bv] - lb_[bv]) / a : kInf;
                else if (a < -kPivotTol) lim = std::isfinite(ub_[bv]) ? (ub_[bv] - x_[bv]) / -a : kInf;
                else continue;
                if (!std::isfinite(lim)) continue;
                lim = std::max(lim, 0.0);
                bool take = false;
                if (r < 0) take = lim <= theta;
                else if (lim < theta - kTieTol) take = true;
                else if (lim <= theta + kTieTol) {
                    take = bland_ ? bv < basis_[r] : std::abs(a) > std::abs(r_alpha);
                }
                if (take) {
                    theta = std::min(theta, lim);
                    r = i;
                    r_alpha = a;
                }
            }
            if (!std::isfinite(theta)) return LpStatus::Unbounded;
            ++iterations_;

            x_[q] += dir * theta;
            for (int i = 0; i < m_; ++i) x_[basis_[i]] -= theta * dir * t_(i, q);
            stall = theta <= kTieTol ? stall + 1 : 0;
            if (stall > opt_.stall_limit) bland_ = true;
            if (r < 0) continue;  // bound flip

            const int leaving = basis_[r];
            x_[leaving] = r_alpha > 0.0 ? lb_[leaving] : ub_[leaving];
            pivot(r, q);
        }
    }

    void pivot(int r, int q) {
        const int leaving = basis_[r];
        t_.row(r) /= t_(r, q);
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, q);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        const double dq = d_[q];
        if (dq != 0.0) d_ -= dq * t_.row(r).transpose();
        basic_[leaving] = false;
        basic_[q] = true;
        basis_[r] = q;
    }

    void drive_out_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art0_) continue;
            int best = -1;
            double mag = 1e-7;
            for (int j = 0; j < art0_; ++j) {
                if (basic_[j] || std::abs(t_(i, j)) <= mag) continue;
                mag = std::abs(t_(i, j));
                best = j;
            }
            if (best >= 0) {
                d_ = RVector::Zero(cols_);
                pivot(i, best);
            }
        }
    }

    /// Recompute basic values from the basis matrix to shed pivot drift.
    void refactor() {
        Tableau bm(m_, m_);
        for (int i = 0; i < m_; ++i) bm.col(i) = a_.col(basis_[i]);
        lu_ = Eigen::PartialPivLU<RMatrix>(RMatrix(bm));
        RVector rhs = b_;
        for (int j = 0; j < cols_; ++j) {
            if (!basic_[j] && x_[j] != 0.0) rhs -= a_.col(j) * x_[j];
        }
        const RVector xb = lu_.solve(rhs);
        for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
        factored_ = true;
    }

    RVector duals(const RVector& c) {
        if (!factored_) refactor();
        RVector cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = c[basis_[i]];
        return lu_.transpose().solve(cb);
    }

    std::vector<double> unscale_duals(const RVector& y) const {
        std::vector<double> out(static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) out[i] = y[i] * row_scale_[i];
        return out;
    }

    LpResult& finish(LpResult& res, LpStatus status, const std::string& message) {
        res.status = status;
        res.message = message;
        res.iterations = iterations_;
        res.used_bland = bland_;
        res.x.resize(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) res.x[j] = x_[j] * col_scale_[j];
        for (int j = 0; j < n_; ++j) {
            if (!p_.var_names.empty()) res.assignment[p_.var_names[j]] = res.x[j];
        }
        res.objective = p_.cost_constant;
        for (int j = 0; j < n_; ++j) res.objective += p_.cost[j] * res.x[j];

        std::vector<double> ax(static_cast<std::size_t>(m_), 0.0);
        for (const auto& e : p_.entries) ax[e.row] += e.value * res.x[e.col];
        double viol = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double d = ax[i] - p_.rhs[i];
            if (p_.senses[i] == ir::Sense::Eq) viol = std::max(viol, std::abs(d));
            else if (p_.senses[i] == ir::Sense::Le) viol = std::max(viol, d);
            else viol = std::max(viol, -d);
        }
        for (int j = 0; j < n_; ++j) viol = std::max({viol, p_.lb[j] - res.x[j], res.x[j] - p_.ub[j]});
        res.primal_infeasibility = viol;

        if (!res.duals.empty()) {
            res.reduced_costs = p_.cost;
            for (const auto& e : p_.entries) res.reduced_costs[e.col] -= e.value * res.duals[e.row];
            double dual = p_.cost_constant;
            for (int i = 0; i < m_; ++i) dual += p_.rhs[i] * res.duals[i];
            for (int j = 0; j < n_; ++j) {
                const double dj = res.reduced_costs[j];
                if (dj > 0.0 && std::isfinite(p_.lb[j])) dual += dj * p_.lb[j];
                else if (dj < 0.0 && std::isfinite(p_.ub[j])) dual += dj * p_.ub[j];
            }
            res.dual_objective = dual;
        }
        return res;
    }

    const LpProblem& p_;
    const LpOptions& opt_;
    RVector row_scale_, col_scale_;
    int m_ = 0, n_ = 0, art0_ = 0, cols_ = 0;
    Tableau a_, t_;
    RVector lb_, ub_, cost_, b_, x_, d_;
    std::vector<int> basis_;
    std::vector<bool> basic_;
    int iterations_ = 0;
    bool bland_ = false;
    bool factored_ = false;
    Eigen::PartialPivLU<RMatrix> lu_;
};

}  // namespace

double farkas_gap(const LpProblem& p, const std::vector<double>& y) {
    constexpr double kSignTol = 1e-9;
    double gap = 0.0;
    for (int i = 0; i < p.num_rows; ++i) {
        if ((p.senses[i] == ir::Sense::Le && y[i] > kSignTol) || (p.senses[i] == ir::Sense::Ge && y[i] < -kSignTol)) {
            return -kInf;
        }
        gap += p.rhs[i] * y[i];
    }
    std::vector<double> g(static_cast<std::size_t>(p.num_vars), 0.0);
    for (const auto& e : p.entries) g[e.col] += e.value * y[e.row];
    for (int j = 0; j < p.num_vars; ++j) {
        if (std::abs(g[j]) <= kSignTol) continue;
        const double bound = g[j] > 0.0 ? p.ub[j] : p.lb[j];
        if (!std::isfinite(bound)) return -kInf;
        gap -= g[j] * bound;
    }
    return gap;
}

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
    problem.check();
    Simplex s(problem, options);
    return s.run();
}

LpResult solve_lp(const ir::MathModel& model, const LpOptions& options) { return solve_lp(extract(model), options); }

}  // namespace mcdist::lp
