#include "pgauge/conditions.hpp"
#include "pgauge/errors.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pgauge;
using oracle::mat;
using oracle::vec;

namespace {

// Random coefficient vector with a random support and random signs.
Vector random_sparse(std::mt19937_64& rng, Index p) {
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  Vector b = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    const int c = coin(rng);
    if (c == 1) b(j) = mag(rng);
    if (c == 2) b(j) = -mag(rng);
  }
  if (b.isZero()) b(0) = 1.0;
  return b;
}

// Random vector with at least one maximal component (value +-1) and the rest
// strictly smaller in magnitude.
Vector random_sup_pattern(std::mt19937_64& rng, Index p) {
  std::uniform_int_distribution<int> coin(0, 2);
  std::uniform_real_distribution<double> small(-0.9, 0.9);
  Vector b(p);
  for (Index j = 0; j < p; ++j) {
    const int c = coin(rng);
    b(j) = c == 0 ? 1.0 : (c == 1 ? -1.0 : small(rng));
  }
  if (b.cwiseAbs().maxCoeff() < 1.0) b(0) = 1.0;
  return b;
}

}  // namespace

// --- accessibility ----------------------------------------------------------

TEST(Accessibility, ZeroIsAlwaysAccessible) {
  std::mt19937_64 rng(1);
  const Matrix x = oracle::gaussian_matrix(rng, 2, 4);
  for (const auto& spec : {GaugeSpec::l1(4), GaugeSpec::sup_norm(4), GaugeSpec::total_variation(4)}) {
    const auto r = check_accessibility(spec, x, Vector::Zero(4));
    EXPECT_TRUE(r.verdict);
    EXPECT_GE(r.margin, 0.0);
    EXPECT_NEAR(r.value, 0.0, 1e-9);
  }
}

TEST(Accessibility, SupPathExample) {
  const auto r = check_accessibility(GaugeSpec::sup_norm(3), fixture::sup_path_x(), fixture::sup_path_beta());
  EXPECT_TRUE(r.verdict);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
  EXPECT_EQ(r.method, ConditionMethod::EpigraphLp);
}

TEST(Accessibility, OneConstraintL1) {
  const Matrix x = mat({{1, 1}});
  const auto spec = GaugeSpec::l1(2);
  const auto a = check_accessibility(spec, x, vec({1, 1}));
  EXPECT_TRUE(a.verdict);
  EXPECT_NEAR(a.value, 2.0, 1e-9);
  const auto b = check_accessibility(spec, x, vec({3, -1}));
  EXPECT_FALSE(b.verdict);
  EXPECT_NEAR(b.value, 2.0, 1e-9);
  EXPECT_NEAR(b.margin, 2.0 - 4.0 + 1e-7, 1e-9);
  // The certificate is a cheaper point of the fiber.
  EXPECT_NEAR((x * b.certificate)(0), 2.0, 1e-9);
  EXPECT_NEAR(b.certificate.lpNorm<1>(), 2.0, 1e-9);
}

TEST(Accessibility, EpigraphAndGeometricFormsAgree) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> dim(1, 5);
  int disagreements = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Index n = dim(rng);
    const Index p = dim(rng) + 1;
    const Matrix x = oracle::gaussian_matrix(rng, n, p);
    const Vector b = trial % 3 == 2 ? random_sup_pattern(rng, p) : random_sparse(rng, p);
    std::vector<GaugeSpec> specs{GaugeSpec::l1(p), GaugeSpec::sup_norm(p), GaugeSpec::slope(Vector::LinSpaced(p, 2.0, 1.0))};
    if (p >= 2) specs.push_back(GaugeSpec::total_variation(p));
    for (const auto& spec : specs) {
      const auto e = check_accessibility(spec, x, b);
      const auto g = check_accessibility_geometric(spec, x, b);
      if (e.verdict != g.verdict) ++disagreements;
    }
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(Accessibility, SlopeBeyondTenCoefficients) {
  std::mt19937_64 rng(3);
  const Index p = 12;
  const Matrix x = oracle::gaussian_matrix(rng, 20, p);
  const auto spec = GaugeSpec::slope(Vector::LinSpaced(p, 3.0, 1.0));
  // An injective design makes every pattern accessible.
  EXPECT_TRUE(check_accessibility(spec, x, random_sparse(rng, p)).verdict);
}

// --- noiseless recovery -----------------------------------------------------

TEST(NrcGeometric, ZeroAndSupPathExample) {
  std::mt19937_64 rng(4);
  const Matrix x = oracle::gaussian_matrix(rng, 3, 5);
  EXPECT_TRUE(check_nrc_geometric(GaugeSpec::l1(5), x, Vector::Zero(5)).verdict);
  EXPECT_TRUE(check_nrc_geometric(GaugeSpec::sup_norm(5), x, Vector::Zero(5)).verdict);
  const auto r = check_nrc_geometric(GaugeSpec::sup_norm(3), fixture::sup_path_x(), fixture::sup_path_beta());
  EXPECT_TRUE(r.verdict);
  EXPECT_LT((r.certificate - vec({0, 0.5, 0.5})).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(NrcGeometric, RarelyHoldsForWideGaussianSupNormDesigns) {
  std::mt19937_64 rng(5);
  const Index n = 20;
  const Index p = 30;
  const Index k = 25;
  Vector beta = Vector::Zero(p);
  beta.head(p - k).setOnes();
  int holds = 0;
  for (int draw = 0; draw < 50; ++draw) {
    const Matrix x = oracle::gaussian_matrix(rng, n, p, 1.0 / std::sqrt(static_cast<double>(n)));
    if (check_nrc_geometric(GaugeSpec::sup_norm(p), x, beta).verdict) ++holds;
  }
  EXPECT_LT(holds, 5);
}

TEST(NrcLasso, Examples) {
  const auto a = check_nrc_lasso(Matrix::Identity(2, 2), vec({1, 0}));
  EXPECT_TRUE(a.verdict);
  EXPECT_NEAR(a.value, 1.0, 1e-12);
  const Matrix x = mat({{1, 0, 0.9}, {0, 1, 0.9}});
  const auto b = check_nrc_lasso(x, vec({1, 1, 0}));
  EXPECT_FALSE(b.verdict);
  EXPECT_NEAR(b.value, 1.8, 1e-12);
  EXPECT_NEAR(b.margin, 1.0 + 1e-9 - 1.8, 1e-12);
  EXPECT_TRUE(check_nrc_lasso(x, Vector::Zero(3)).verdict);
}

TEST(NrcLasso, SignOutsideRowSpace) {
  // Two identical columns with opposite signs: sign(beta_I) = (1,-1) is not in row(X_I).
  const Matrix x = mat({{1, 1}, {2, 2}});
  const auto r = check_nrc_lasso(x, vec({1, -1}));
  EXPECT_FALSE(r.verdict);
  EXPECT_LT(r.margin, 0.0);
  EXPECT_FALSE(check_nrc_geometric(GaugeSpec::l1(2), x, vec({1, -1})).verdict);
}

TEST(NrcSup, SupPathCertificate) {
  const auto r = check_nrc_sup(fixture::sup_path_x(), fixture::sup_path_beta());
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.method, ConditionMethod::AnalyticSup);
  EXPECT_LT((r.certificate - vec({0, 0.5, 0.5})).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(r.certificate_norm, 1.0, 1e-9);
  // X~ = (col2 + col3 | col1).
  EXPECT_TRUE(sup_reduced_design(fixture::sup_path_x(), fixture::sup_path_beta()).isApprox(mat({{2, 1}, {2, 0}})));
}

TEST(NrcSup, IdentityWithAllMaximal) {
  for (Index p = 1; p <= 6; ++p) {
    const auto r = check_nrc_sup(Matrix::Identity(p, p), Vector::Ones(p));
    EXPECT_TRUE(r.verdict);
    EXPECT_TRUE(r.certificate.isApprox(Vector::Constant(p, 1.0 / static_cast<double>(p))));
    EXPECT_NEAR(r.certificate_norm, 1.0, 1e-12);
  }
  EXPECT_TRUE(check_nrc_sup(Matrix::Identity(3, 3), Vector::Zero(3)).verdict);
}

TEST(NrcCrossOracle, LassoMatchesGeometric) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> dim(1, 6);
  int disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = dim(rng);
    const Index p = dim(rng);
    const Matrix x = oracle::gaussian_matrix(rng, n, p);
    const Vector b = random_sparse(rng, p);
    const auto a = check_nrc_lasso(x, b);
    const auto g = check_nrc_geometric(GaugeSpec::l1(p), x, b);
    if (a.verdict != g.verdict) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
}

TEST(NrcCrossOracle, SupMatchesGeometric) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(1, 6);
  int disagreements = 0;
  int holds = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = dim(rng);
    const Index p = dim(rng);
    const Matrix x = oracle::gaussian_matrix(rng, n, p);
    const Vector b = random_sup_pattern(rng, p);
    const auto a = check_nrc_sup(x, b);
    const auto g = check_nrc_geometric(GaugeSpec::sup_norm(p), x, b);
    if (a.verdict != g.verdict) ++disagreements;
    if (a.verdict) ++holds;
  }
  EXPECT_EQ(disagreements, 0);
  // Both outcomes occur, so the comparison is not vacuous.
  EXPECT_GT(holds, 10);
  EXPECT_LT(holds, 190);
}

TEST(NrcCrossOracle, NrcImpliesAccessibility) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = dim(rng);
    const Index p = dim(rng) + 1;
    const Matrix x = oracle::gaussian_matrix(rng, n, p);
    const Vector b = trial % 2 ? random_sup_pattern(rng, p) : random_sparse(rng, p);
    for (const auto& spec : {GaugeSpec::l1(p), GaugeSpec::sup_norm(p), GaugeSpec::total_variation(p)}) {
      if (check_nrc_geometric(spec, x, b).verdict) {
        EXPECT_TRUE(check_accessibility(spec, x, b).verdict) << spec.describe() << " trial " << trial;
      }
    }
  }
}

TEST(NrcPath, SupPathRecoversBelowFirstBreakpoint) {
  const auto r = check_nrc_path(GaugeSpec::sup_norm(3), fixture::sup_path_x(), fixture::sup_path_beta(),
                                log_grid(0.01, 30.0, 100));
  EXPECT_TRUE(r.verdict);
  EXPECT_GT(r.value, 0.0);
  EXPECT_LT(r.value, 8.0 / 3.0);
  EXPECT_EQ(r.method, ConditionMethod::PathEmpirical);
  EXPECT_EQ(named_pattern(PatternKind::Sup, r.certificate, 1e-6).values, (std::vector<int>{0, 1, 1}));
}

TEST(NrcPath, ZeroRecoveredBeyondZeroThreshold) {
  std::mt19937_64 rng(9);
  const Matrix x = oracle::gaussian_matrix(rng, 3, 4);
  const auto r = check_nrc_path(GaugeSpec::l1(4), x, Vector::Zero(4), {1.0, 5.0});
  EXPECT_TRUE(r.verdict);
  EXPECT_EQ(r.margin, 1.0);
}

TEST(NrcPath, AgreesWithGeometricFailure) {
  const Matrix x = mat({{1, 0, 0.9}, {0, 1, 0.9}, {0, 0, 0.3}});
  const Vector b = vec({1, 1, 0});
  ASSERT_FALSE(check_nrc_geometric(GaugeSpec::l1(3), x, b).verdict);
  const auto r = check_nrc_path(GaugeSpec::l1(3), x, b, log_grid(1e-3, 10.0, 100));
  EXPECT_FALSE(r.verdict);
  EXPECT_LT(r.margin, 0.0);
}

TEST(MinLinf, Examples) {
  EXPECT_NEAR(min_linf_representation(Matrix::Identity(2, 2), vec({3, -1})), 3.0, 1e-12);
  EXPECT_NEAR(min_linf_representation(fixture::sup_path_x(), vec({4, 4})), 2.0, 1e-12);
  EXPECT_THROW((void)min_linf_representation(mat({{1, 0}, {1, 0}}), vec({1, 2})), Infeasible);
  EXPECT_THROW((void)min_linf_representation(Matrix::Identity(2, 2), vec({1, 2, 3})), DimensionMismatch);
}

TEST(MinLinf, SupAccessibilityDisplay) {
  // value 1 for X~_1 = sum of the maximal columns <=> the epigraph LP accepts.
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 4;
    const Index p = 7;
    const Index k = 1 + trial % 5;
    const Matrix x = oracle::gaussian_matrix(rng, n, p);
    Vector beta = Vector::Zero(p);
    beta.head(p - k).setOnes();
    const double v = min_linf_representation(x, x * beta.cwiseAbs().cwiseEqual(1.0).cast<double>());
    EXPECT_LE(v, 1.0 + 1e-9);
    EXPECT_EQ(v >= 1.0 - 1e-6, check_accessibility(GaugeSpec::sup_norm(p), x, beta).verdict) << trial;
  }
}

// --- uniform uniqueness ------------------------------------------------------

TEST(UniformUniqueness, InjectiveDesignIsUnique) {
  std::mt19937_64 rng(11);
  const Matrix x = oracle::gaussian_matrix(rng, 6, 4);
  for (const auto& spec : {GaugeSpec::l1(4), GaugeSpec::sup_norm(4)}) EXPECT_TRUE(check_uniform_uniqueness(spec, x).verdict);
  // Nothing is enumerated for injective designs, so huge gauges are fine too.
  const Matrix big = oracle::gaussian_matrix(rng, 40, 30);
  EXPECT_TRUE(check_uniform_uniqueness(GaugeSpec::l1(30), big).verdict);
}

TEST(UniformUniqueness, HexagonExampleFailsAtVertex) {
  const auto spec = GaugeSpec::gen_lasso(fixture::hexagon_d());
  const auto r = check_uniform_uniqueness(spec, fixture::hexagon_x());
  EXPECT_FALSE(r.verdict);
  EXPECT_LT(r.margin, 0.0);
  const Matrix& u = generators(spec);
  bool found = false;
  for (const auto& f : r.violating_faces)
    if (f.vertices.size() == 1 && u.row(f.vertices[0]).isApprox(vec({4, 2, 2}).transpose())) found = true;
  EXPECT_TRUE(found);
}

TEST(UniformUniqueness, OneRowL1DesignHitsSquareVertices) {
  const auto r = check_uniform_uniqueness(GaugeSpec::l1(2), mat({{1, 1}}));
  EXPECT_FALSE(r.verdict);
  const Matrix& u = generators(GaugeSpec::l1(2));
  int hits = 0;
  for (const auto& f : r.violating_faces) {
    ASSERT_EQ(f.vertices.size(), 1u);
    const Vector v = u.row(f.vertices[0]).transpose();
    if (v.isApprox(vec({1, 1})) || v.isApprox(vec({-1, -1}))) ++hits;
  }
  EXPECT_EQ(hits, 2);
  EXPECT_EQ(r.violating_faces.size(), 2u);
}

TEST(UniformUniqueness, UniqueDesignsGiveIdenticalMinimizers) {
  std::mt19937_64 rng(12);
  const auto spec = GaugeSpec::sup_norm(4);
  Matrix x;
  do {
    x = oracle::gaussian_matrix(rng, 3, 4);
  } while (!check_uniform_uniqueness(spec, x).verdict);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector y = oracle::gaussian_vector(rng, 3);
    SolveOptions a;
    a.tol = 1e-10;
    a.init = oracle::gaussian_vector(rng, 4, 3.0);
    SolveOptions b = a;
    b.init = oracle::gaussian_vector(rng, 4, 3.0);
    const auto ra = solve(spec, x, y, 0.3, a);
    const auto rb = solve(spec, x, y, 0.3, b);
    ASSERT_TRUE(ra.converged && rb.converged);
    EXPECT_LT((ra.beta - rb.beta).cwiseAbs().maxCoeff(), 1e-5) << trial;
  }
}

TEST(Attainability, AccessiblePatternIsRecoveredWithPositiveFrequency) {
  std::mt19937_64 rng(13);
  const auto spec = GaugeSpec::l1(3);
  const Matrix x = mat({{1.0, 0.4, -0.3}, {0.2, 1.0, 0.5}});
  ASSERT_TRUE(check_uniform_uniqueness(spec, x).verdict);
  // A support-two pattern that is accessible but not necessarily recoverable noiselessly.
  Vector beta;
  for (const Vector& cand : {vec({1, -1, 0}), vec({1, 1, 0}), vec({1, 0, 1}), vec({1, 0, -1}), vec({0, 1, 1})}) {
    if (check_accessibility(spec, x, cand).verdict) {
      beta = cand;
      break;
    }
  }
  ASSERT_EQ(beta.size(), 3);
  const auto grid = log_grid(1e-2, 10.0, 20);
  int successes = 0;
  for (int draw = 0; draw < 500 && successes == 0; ++draw) {
    const Vector y = oracle::gaussian_vector(rng, 2, 2.0);
    if (scan_recovery(spec, x, y, beta, grid).matches > 0) ++successes;
  }
  EXPECT_GE(successes, 1);
}

TEST(Conditions, DimensionChecks) {
  const Matrix x = Matrix::Identity(3, 3);
  EXPECT_THROW((void)check_accessibility(GaugeSpec::l1(2), x, vec({1, 2})), DimensionMismatch);
  EXPECT_THROW((void)check_nrc_lasso(x, vec({1, 2})), DimensionMismatch);
  EXPECT_THROW((void)check_nrc_sup(x, vec({1, 2})), DimensionMismatch);
  EXPECT_THROW((void)check_nrc_path(GaugeSpec::l1(3), x, vec({1, 2, 3}), {}), InvalidArgument);
  EXPECT_THROW((void)log_grid(0.0, 1.0, 5), InvalidArgument);
}
