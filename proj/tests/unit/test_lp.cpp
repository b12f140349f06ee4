#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "mcdist/common/errors.hpp"
#include "mcdist/lp/lp.hpp"
#include "oracles.hpp"

using namespace mcdist;
using namespace mcdist::lp;
using ir::LinearExpr;
using ir::Sense;
using mcdist::test::BoxLp;
using mcdist::test::brute_force;
using mcdist::test::random_box_lp;

namespace {

constexpr int kRows = 8;
constexpr int kCols = 12;
constexpr double kUpper = 10.0;

double row_activity(const LpProblem& p, const std::vector<double>& x, int row) {
    double s = 0.0;
    for (const auto& e : p.entries)
        if (e.row == row) s += e.value * x[e.col];
    return s;
}

}  // namespace

TEST(Lp, SingleLowerBoundRow) {
    ir::MathModel m;
    const int x = m.add_variable("x");
    m.add_linear("floor", LinearExpr::variable(x), Sense::Ge, 1.0);
    m.objective = ir::QuadExpr(LinearExpr::variable(x));
    auto r = solve_lp(m);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.assignment.at("x"), 1.0, 1e-12);
    EXPECT_NEAR(r.objective, 1.0, 1e-12);
    EXPECT_NEAR(r.duals.at(0), 1.0, 1e-12);
}

TEST(Lp, TieBetweenOptimalVertices) {
    ir::MathModel m;
    const int x = m.add_variable("x", 0.0);
    const int y = m.add_variable("y", 0.0);
    m.add_linear("cap", LinearExpr::variable(x) + LinearExpr::variable(y), Sense::Le, 1.0);
    m.objective = ir::QuadExpr(LinearExpr::variable(x, -1.0) + LinearExpr::variable(y, -1.0));
    auto r = solve_lp(m);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, -1.0, 1e-12);
    // the lowest-index improving column enters first
    EXPECT_NEAR(r.assignment.at("x"), 1.0, 1e-12);
    EXPECT_NEAR(r.assignment.at("y"), 0.0, 1e-12);
}

TEST(Lp, Unbounded) {
    ir::MathModel m;
    const int x = m.add_variable("x", 0.0);
    m.objective = ir::QuadExpr(LinearExpr::variable(x, -1.0));
    EXPECT_EQ(solve_lp(m).status, LpStatus::Unbounded);
}

TEST(Lp, RandomInstancesMatchBruteForce) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const BoxLp in = random_box_lp(rng, kRows, kCols);
        const LpProblem p = in.problem();
        const double expected = brute_force(in);
        auto r = solve_lp(p);
        ASSERT_EQ(r.status, LpStatus::Optimal) << trial << " " << r.message;
        EXPECT_NEAR(r.objective, expected, 1e-7 * std::max(1.0, std::abs(expected))) << trial;

        // primal feasibility of the returned point
        for (int j = 0; j < p.num_vars; ++j) {
            EXPECT_GE(r.x[j], -1e-8);
            EXPECT_LE(r.x[j], kUpper + 1e-8);
        }
        for (int i = 0; i < p.num_rows; ++i) EXPECT_NEAR(row_activity(p, r.x, i), p.rhs[i], 1e-7) << trial;

        // the dual bound never exceeds the primal value, and closes at the optimum
        EXPECT_LE(r.dual_objective, r.objective + 1e-6) << trial;
        EXPECT_NEAR(r.dual_objective, r.objective, 1e-6 * (1.0 + std::abs(expected))) << trial;
    }
}

TEST(Lp, InequalityRowsDualSigns) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        BoxLp in = random_box_lp(rng, kRows, kCols);
        const Sense sense = trial % 2 ? Sense::Le : Sense::Ge;
        auto p = in.problem(sense);
        auto r = solve_lp(p);
        ASSERT_EQ(r.status, LpStatus::Optimal) << trial;
        for (int i = 0; i < p.num_rows; ++i) {
            if (sense == Sense::Le) EXPECT_LE(r.duals[i], 1e-9);
            if (sense == Sense::Ge) EXPECT_GE(r.duals[i], -1e-9);
            // complementary slackness
            const double slack = std::abs(row_activity(p, r.x, i) - p.rhs[i]);
            EXPECT_LE(slack * std::abs(r.duals[i]), 1e-6) << trial;
        }
        EXPECT_NEAR(r.dual_objective, r.objective, 1e-6 * (1.0 + std::abs(r.objective)));
    }
}

TEST(Lp, InfeasibleInstancesCarryCertificates) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coef(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        BoxLp in{Eigen::MatrixXd(kRows, kCols), Eigen::VectorXd(kRows), Eigen::VectorXd::Ones(kCols)};
        for (int i = 0; i < kRows; ++i)
            for (int j = 0; j < kCols; ++j) in.a(i, j) = coef(rng);
        // one row demands more than the box allows
        in.b = in.a * Eigen::VectorXd::Constant(kCols, 5.0);
        const int bad = trial % kRows;
        in.b(bad) = 1.05 * kUpper * in.a.row(bad).sum();
        const auto p = in.problem();
        auto r = solve_lp(p);
        ASSERT_EQ(r.status, LpStatus::Infeasible) << trial;
        ASSERT_EQ(r.farkas.size(), static_cast<std::size_t>(kRows));
        EXPECT_GT(farkas_gap(p, r.farkas), 0.0) << trial;
        EXPECT_NEAR(r.farkas_gap, farkas_gap(p, r.farkas), 1e-9);
    }
}

TEST(Lp, FarkasGapRejectsWrongSigns) {
    LpProblem p;
    p.num_vars = 1;
    p.num_rows = 1;
    p.entries = {{0, 0, 1.0}};
    p.senses = {Sense::Le};
    p.rhs = {1.0};
    p.lb = {0.0};
    p.ub = {2.0};
    p.cost = {0.0};
    EXPECT_EQ(farkas_gap(p, {1.0}), -std::numeric_limits<double>::infinity());
}

TEST(Lp, Deterministic) {
    std::mt19937_64 rng(3);
    const auto p = random_box_lp(rng, kRows, kCols).problem();
    auto a = solve_lp(p), b = solve_lp(p);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.duals, b.duals);
    EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Lp, WithoutScalingSameOptimum) {
    std::mt19937_64 rng(4);
    const BoxLp in = random_box_lp(rng, kRows, kCols);
    const auto p = in.problem();
    LpOptions plain;
    plain.scale = false;
    EXPECT_NEAR(solve_lp(p).objective, solve_lp(p, plain).objective, 1e-7);
}

TEST(Lp, RejectsNonlinearModels) {
    ir::MathModel m;
    const int x = m.add_variable("x"), y = m.add_variable("y");
    m.add_rotated_soc("cone(x)", LinearExpr::variable(x), LinearExpr::variable(y), {LinearExpr(1.0)});
    try {
        extract(m);
        FAIL() << "expected UnsupportedError";
    } catch (const UnsupportedError& e) {
        EXPECT_NE(std::string(e.what()).find("cone(x)"), std::string::npos);
    }
    ir::MathModel q;
    const int z = q.add_variable("z");
    q.objective.add_product(z, z, 1.0);
    EXPECT_THROW(extract(q), UnsupportedError);
}

TEST(Lp, CheckRejectsBadDimensions) {
    LpProblem p;
    p.num_vars = 2;
    p.lb = {0.0};
    EXPECT_THROW(p.check(), ModelError);
}
