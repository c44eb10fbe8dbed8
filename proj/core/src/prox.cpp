#include "pgauge/errors.hpp"
#include "pgauge/solvers.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pgauge {

namespace {

void check_step(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("proximal step must be finite and non-negative");
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

Vector prox_l1(const Vector& v, double t) {
  check_step(t);
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = sign_of(v(i)) * std::max(std::abs(v(i)) - t, 0.0);
  return out;
}

Vector prox_sorted_l1(const Vector& v, const Vector& w, double t) {
  check_step(t);
  const Index p = v.size();
  if (w.size() != p) throw DimensionMismatch("weights and vector differ in length");
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(v(a)) > std::abs(v(b)); });

  // Pool adjacent violators on |v|_(i) - t w_i to get a non-increasing fit.
  struct Block {
    Index start;
    Index end;
    double sum;
    [[nodiscard]] double mean() const { return sum / static_cast<double>(end - start); }
  };
  std::vector<Block> stack;
  for (Index i = 0; i < p; ++i) {
    const double z = std::abs(v(order[static_cast<std::size_t>(i)])) - t * w(i);
    stack.push_back({i, i + 1, z});
    while (stack.size() > 1 && stack[stack.size() - 2].mean() <= stack.back().mean()) {
      const Block top = stack.back();
      stack.pop_back();
      stack.back().end = top.end;
      stack.back().sum += top.sum;
    }
  }
  Vector out(p);
  for (const Block& b : stack) {
    const double value = std::max(b.mean(), 0.0);
    for (Index i = b.start; i < b.end; ++i) {
      const Index j = order[static_cast<std::size_t>(i)];
      out(j) = sign_of(v(j)) * value;
    }
  }
  return out;
}

Vector project_l1_ball(const Vector& v, double radius) {
  check_step(radius);
  if (v.lpNorm<1>() <= radius) return v;
  if (radius == 0.0) return Vector::Zero(v.size());
  Vector a = v.cwiseAbs();
  std::sort(a.data(), a.data() + a.size(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < a.size(); ++j) {
    cum += a(j);
    const double candidate = (cum - radius) / static_cast<double>(j + 1);
    if (a(j) - candidate > 0.0) theta = candidate;
  }
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = sign_of(v(i)) * std::max(std::abs(v(i)) - theta, 0.0);
  return out;
}

Vector prox_linf(const Vector& v, double t) {
  check_step(t);
  return v - project_l1_ball(v, t);
}

Vector min_norm_point(const Matrix& points, double tol) {
  const Index k = points.rows();
  const Index p = points.cols();
  if (k == 0) throw InvalidArgument("min-norm point of an empty set");
  const double scale = std::max(1.0, points.rowwise().squaredNorm().maxCoeff());

  Index first = 0;
  points.rowwise().squaredNorm().minCoeff(&first);
  std::vector<Index> s{first};
  Vector lambda = Vector::Ones(1);
  Vector x = points.row(first).transpose();

  const int max_major = 50 * static_cast<int>(k + p) + 100;
  for (int major = 0; major < max_major; ++major) {
    Index j = 0;
    const double best = (points * x).minCoeff(&j);
    if (x.squaredNorm() - best <= tol * scale) return x;
    if (std::find(s.begin(), s.end(), j) != s.end()) return x;  // no progress possible numerically
    s.push_back(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda(lambda.size() - 1) = 0.0;

    while (true) {
      // Affine minimizer over the current corral: [P P' 1; 1' 0][a; mu] = [0; 1].
      const auto m = static_cast<Index>(s.size());
      Matrix ps(m, p);
      for (Index i = 0; i < m; ++i) ps.row(i) = points.row(s[static_cast<std::size_t>(i)]);
      Matrix kkt = Matrix::Zero(m + 1, m + 1);
      kkt.topLeftCorner(m, m) = ps * ps.transpose();
      kkt.block(0, m, m, 1).setOnes();
      kkt.block(m, 0, 1, m).setOnes();
      Vector rhs = Vector::Zero(m + 1);
      rhs(m) = 1.0;
      const Vector alpha = kkt.completeOrthogonalDecomposition().solve(rhs).head(m);
      if ((alpha.array() > tol).all()) {
        lambda = alpha;
        x = ps.transpose() * lambda;
        break;
      }
      double theta = 1.0;
      for (Index i = 0; i < m; ++i)
        if (alpha(i) <= tol && lambda(i) - alpha(i) > 0.0) theta = std::min(theta, lambda(i) / (lambda(i) - alpha(i)));
      lambda = theta * alpha + (1.0 - theta) * lambda;
      std::vector<Index> keep_s;
      std::vector<double> keep_l;
      for (Index i = 0; i < m; ++i)
        if (lambda(i) > tol) {
          keep_s.push_back(s[static_cast<std::size_t>(i)]);
          keep_l.push_back(lambda(i));
        }
      s = std::move(keep_s);
      lambda = Eigen::Map<Vector>(keep_l.data(), static_cast<Index>(keep_l.size()));
      lambda /= lambda.sum();
      x = Vector::Zero(p);
      for (std::size_t i = 0; i < s.size(); ++i) x += lambda(static_cast<Index>(i)) * points.row(s[i]).transpose();
      if (s.size() <= 1) break;
    }
  }
  return x;
}

Vector prox_gauge(const GaugeSpec& spec, const Vector& v, double t) {
  check_step(t);
  if (v.size() != spec.dim()) throw DimensionMismatch("prox argument does not match gauge dimension");
  switch (spec.kind()) {
    case GaugeKind::L1: return prox_l1(v, t);
    case GaugeKind::Slope: return prox_sorted_l1(v, spec.weights(), t);
    case GaugeKind::SupNorm: return prox_linf(v, t);
    case GaugeKind::GenLasso:
    case GaugeKind::Custom: break;
  }
  if (t == 0.0) return v;
  // proj_{B*}(q) = q + argmin{||z|| : z in conv(U - q)}.
  const Vector q = v / t;
  const Matrix shifted = spec.generators().rowwise() - q.transpose();
  const Vector proj = q + min_norm_point(shifted);
  return v - t * proj;
}

}  // namespace pgauge
