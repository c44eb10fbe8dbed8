#include "pgauge/errors.hpp"
#include "pgauge/linprog.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace pgauge;
using oracle::mat;
using oracle::vec;

namespace {

// Checks every claim an optimal solution makes about itself.
void expect_certified(const LpProblem& lp, const LpSolution& sol) {
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_LE(sol.primal_residual, 1e-8);
  EXPECT_LE(sol.certificate_residual, 1e-7);
  const Vector& x = sol.x;
  if (lp.eq_matrix.rows() > 0) EXPECT_LT((lp.eq_matrix * x - lp.eq_rhs).cwiseAbs().maxCoeff(), 1e-8);
  if (lp.le_matrix.rows() > 0) EXPECT_LT((lp.le_matrix * x - lp.le_rhs).maxCoeff(), 1e-8);
  EXPECT_NEAR(lp.objective.dot(x), sol.value, 1e-9 * std::max(1.0, std::abs(sol.value)));
}

}  // namespace

TEST(LpSolve, TrivialBoundedAndUnbounded) {
  LpProblem lp = LpProblem::with_variables(1);
  lp.objective(0) = 1.0;
  auto sol = lp_solve(lp);
  EXPECT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_EQ(sol.value, 0.0);

  lp.objective(0) = -1.0;
  sol = lp_solve(lp);
  EXPECT_EQ(sol.status, LpStatus::Unbounded);
  ASSERT_EQ(sol.ray.size(), 1);
  EXPECT_GT(sol.ray(0), 0.0);
}

TEST(LpSolve, SupNormEpigraphOverFiber) {
  // min t  s.t.  X b = X beta,  -t <= b_j <= t.
  const Matrix x = mat({{1, 0, 2}, {0, 1, 1}});
  const Vector beta = vec({0, 2, 2});
  LpBuilder b;
  const Index bv = b.add_variables(3, -kInf, kInf);
  const Index t = b.add_variables(1, 0.0, kInf);
  b.set_objective(t, 1.0);
  const Vector target = x * beta;
  for (Index i = 0; i < 2; ++i) {
    std::vector<LpBuilder::Term> row;
    for (Index j = 0; j < 3; ++j)
      if (x(i, j) != 0.0) row.emplace_back(bv + j, x(i, j));
    b.add_eq(row, target(i));
  }
  for (Index j = 0; j < 3; ++j) {
    b.add_le({{bv + j, 1.0}, {t, -1.0}}, 0.0);
    b.add_ge({{bv + j, 1.0}, {t, 1.0}}, 0.0);
  }
  const LpProblem lp = b.build();
  const auto sol = lp_solve(lp);
  expect_certified(lp, sol);
  EXPECT_NEAR(sol.value, 2.0, 1e-10);
}

TEST(LpFeasibility, SimpleSystems) {
  LpProblem bad = LpProblem::with_variables(1);
  bad.lower(0) = -kInf;
  bad.eq_matrix = mat({{1}});
  bad.eq_rhs = vec({1});
  bad.le_matrix = mat({{1}});
  bad.le_rhs = vec({0});
  const auto r = feasibility(bad);
  EXPECT_FALSE(r.feasible);
  // Farkas: A'y <= 0 on the standard form and b'y = 1.
  const StandardForm sf = standardize(bad);
  ASSERT_EQ(r.lp.certificate.size(), sf.a.rows());
  EXPECT_NEAR(sf.b.dot(r.lp.certificate), 1.0, 1e-9);
  EXPECT_LE((sf.a.transpose() * r.lp.certificate).maxCoeff(), 1e-7);

  LpProblem seg = LpProblem::with_variables(2);
  seg.eq_matrix = mat({{1, 1}});
  seg.eq_rhs = vec({1});
  const auto ok = feasibility(seg);
  ASSERT_TRUE(ok.feasible);
  EXPECT_NEAR(ok.witness.sum(), 1.0, 1e-12);
  EXPECT_GE(ok.witness.minCoeff(), -1e-12);
}

TEST(LpFeasibility, RowSpaceMeetsHexagonVertex) {
  // exists z: X'z = (4,2,2) for the rank-two design with rows (1,1,1), (3,1,1), (sqrt2,0,0).
  const Matrix x = mat({{1, 1, 1}, {3, 1, 1}, {std::sqrt(2.0), 0, 0}});
  const Vector vertex = vec({4, 2, 2});
  LpBuilder b;
  const Index z = b.add_variables(3, -kInf, kInf);
  for (Index j = 0; j < 3; ++j) {
    std::vector<LpBuilder::Term> row;
    for (Index i = 0; i < 3; ++i)
      if (x(i, j) != 0.0) row.emplace_back(z + i, x(i, j));
    b.add_eq(row, vertex(j));
  }
  const auto r = feasibility(b.build());
  ASSERT_TRUE(r.feasible);
  EXPECT_LT((x.transpose() * r.witness.head(3) - vertex).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LpSolve, RedundantAndDegenerateRows) {
  // Duplicate equality rows and a degenerate vertex.
  LpProblem lp = LpProblem::with_variables(3);
  lp.objective = vec({-1, -1, 0});
  lp.eq_matrix = mat({{1, 1, 1}, {2, 2, 2}, {1, 1, 1}});
  lp.eq_rhs = vec({1, 2, 1});
  lp.le_matrix = mat({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}});
  lp.le_rhs = vec({1, 1, 1});
  const auto sol = lp_solve(lp);
  expect_certified(lp, sol);
  EXPECT_NEAR(sol.value, -1.0, 1e-10);
}

TEST(LpSolve, BoundsOfEveryShape) {
  // free, lower-only, upper-only, boxed, fixed
  LpProblem lp = LpProblem::with_variables(5);
  lp.objective = vec({1, 1, -1, -1, 1});
  lp.lower = vec({-kInf, -3, -kInf, -2, 4});
  lp.upper = vec({kInf, kInf, 5, 7, 4});
  lp.le_matrix = mat({{-1, 0, 0, 0, 0}});
  lp.le_rhs = vec({2});
  const auto sol = lp_solve(lp);
  expect_certified(lp, sol);
  EXPECT_NEAR(sol.value, -2 - 3 - 5 - 7 + 4, 1e-10);
  EXPECT_NEAR(sol.x(0), -2, 1e-10);
}

TEST(LpSolve, MatchesVertexEnumerationOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nvar(1, 6);
  std::uniform_int_distribution<int> ncons(1, 8);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = nvar(rng);
    const Index m = ncons(rng);
    const Matrix a = oracle::gaussian_matrix(rng, m, n);
    Vector rhs = oracle::gaussian_vector(rng, m);
    if (trial % 3 != 0) rhs = rhs.cwiseAbs();  // origin feasible
    const Vector c = oracle::gaussian_vector(rng, n);
    const double box = 10.0;

    LpProblem lp = LpProblem::with_variables(n);
    lp.objective = c;
    lp.lower = Vector::Constant(n, -box);
    lp.upper = Vector::Constant(n, box);
    lp.le_matrix = a;
    lp.le_rhs = rhs;

    Matrix full(m + 2 * n, n);
    Vector full_rhs(m + 2 * n);
    full << a, Matrix::Identity(n, n), -Matrix::Identity(n, n);
    full_rhs << rhs, Vector::Constant(2 * n, box);
    const auto expected = oracle::lp_vertex_enumeration(full, full_rhs, c);

    const auto sol = lp_solve(lp);
    if (!expected) {
      EXPECT_EQ(sol.status, LpStatus::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    expect_certified(lp, sol);
    EXPECT_NEAR(sol.value, *expected, 1e-7) << "trial " << trial;
    ++optimal;
  }
  EXPECT_GT(optimal, 50);
  EXPECT_GT(infeasible, 0);
}

TEST(LpSolve, InfeasibleCertificatesOnRandomSystems) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    // x >= 0, sum x = 1, and a row forcing sum x >= 2.
    const Index n = 2 + trial % 4;
    LpProblem lp = LpProblem::with_variables(n);
    lp.objective = oracle::gaussian_vector(rng, n);
    lp.eq_matrix = Matrix::Ones(1, n);
    lp.eq_rhs = vec({1});
    lp.le_matrix = -Matrix::Ones(1, n) - 0.1 * oracle::gaussian_matrix(rng, 1, n).cwiseAbs();
    lp.le_rhs = vec({-3});
    const auto sol = lp_solve(lp);
    ASSERT_EQ(sol.status, LpStatus::Infeasible);
    EXPECT_LE(sol.certificate_residual, 1e-7);
  }
}

TEST(LpProblem, ValidateRejectsInconsistentShapes) {
  LpProblem lp = LpProblem::with_variables(2);
  lp.eq_matrix = Matrix::Ones(1, 3);
  lp.eq_rhs = vec({1});
  EXPECT_THROW(lp.validate(), DimensionMismatch);
  LpProblem nan = LpProblem::with_variables(1);
  nan.objective(0) = std::nan("");
  EXPECT_THROW(nan.validate(), InvalidArgument);
}
