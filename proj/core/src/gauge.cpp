#include "pgauge/gauge.hpp"

#include "pgauge/errors.hpp"
#include "pgauge/linprog.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace pgauge {

struct GaugeSpec::Cache {
  std::once_flag once;
  Matrix u;
  std::exception_ptr error;
};

namespace {

int sgn(double x, double tol = 0.0) {
  if (x > tol) return 1;
  if (x < -tol) return -1;
  return 0;
}

void check_dim(const GaugeSpec& spec, const Vector& v, const char* what) {
  if (v.size() != spec.dim()) {
    throw DimensionMismatch(std::string(what) + " has length " + std::to_string(v.size()) + ", gauge dimension is " +
                            std::to_string(spec.dim()));
  }
}

// Rows compared after rounding to 12 significant digits.
std::string row_key(const Matrix& m, Index row) {
  std::string key;
  std::array<char, 40> buf{};
  for (Index j = 0; j < m.cols(); ++j) {
    double v = m(row, j);
    if (v == 0.0) v = 0.0;  // fold -0
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 11);
    if (ec != std::errc()) throw NumericalFailure("cannot format generator entry");
    key.append(buf.data(), ptr);
    key.push_back('|');
  }
  return key;
}

double factorial(Index n) {
  double f = 1.0;
  for (Index i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

Matrix l1_generators(Index p) {
  const Index k = (Index{1} << p);
  Matrix u = Matrix::Zero(k + 1, p);
  for (Index mask = 0; mask < k; ++mask)
    for (Index j = 0; j < p; ++j) u(mask + 1, j) = ((mask >> j) & 1) ? -1.0 : 1.0;
  return u;
}

Matrix sup_generators(Index p) {
  Matrix u = Matrix::Zero(2 * p + 1, p);
  for (Index j = 0; j < p; ++j) {
    u(2 * j + 1, j) = 1.0;
    u(2 * j + 2, j) = -1.0;
  }
  return u;
}

Matrix slope_generators(const Vector& w) {
  const Index p = w.size();
  const Index signs = (Index{1} << p);
  const auto count = static_cast<Index>(factorial(p)) * signs;
  Matrix u = Matrix::Zero(count + 1, p);
  std::vector<Index> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), Index{0});
  Index row = 1;
  do {
    for (Index mask = 0; mask < signs; ++mask, ++row)
      for (Index j = 0; j < p; ++j)
        u(row, j) = (((mask >> j) & 1) ? -1.0 : 1.0) * w(perm[static_cast<std::size_t>(j)]);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return u;
}

Matrix genlasso_generators(const Matrix& d) {
  const Index m = d.rows();
  const Index p = d.cols();
  const Index masks = (Index{1} << m);
  Matrix raw(masks + 1, p);
  raw.row(0).setZero();
  for (Index mask = 0; mask < masks; ++mask) {
    Vector sigma(m);
    for (Index i = 0; i < m; ++i) sigma(i) = ((mask >> i) & 1) ? -1.0 : 1.0;
    raw.row(mask + 1) = sigma.transpose() * d;
  }
  std::unordered_set<std::string> seen;
  std::vector<Index> keep;
  for (Index r = 0; r < raw.rows(); ++r)
    if (seen.insert(row_key(raw, r)).second) keep.push_back(r);
  Matrix u(static_cast<Index>(keep.size()), p);
  for (std::size_t i = 0; i < keep.size(); ++i) u.row(static_cast<Index>(i)) = raw.row(keep[i]);
  return u;
}

// sign(D beta) for the first/second difference operators without forming D.
std::vector<int> difference_signs(const Vector& beta, int order, double tol) {
  const Index p = beta.size();
  std::vector<int> out;
  if (order == 1) {
    for (Index i = 0; i + 1 < p; ++i) out.push_back(sgn(beta(i + 1) - beta(i), tol));
  } else {
    for (Index i = 0; i + 2 < p; ++i) out.push_back(sgn(beta(i) - 2.0 * beta(i + 1) + beta(i + 2), tol));
  }
  return out;
}

std::vector<int> slope_ranks(const Vector& beta, double tol) {
  const Index p = beta.size();
  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(beta(a)) < std::abs(beta(b)); });
  std::vector<int> ranks(static_cast<std::size_t>(p), 0);
  int rank = 0;
  double prev = 0.0;
  for (Index idx : order) {
    const double a = std::abs(beta(idx));
    if (a <= tol) continue;
    if (rank == 0 || a - prev > tol) ++rank;
    prev = a;
    ranks[static_cast<std::size_t>(idx)] = rank * sgn(beta(idx));
  }
  return ranks;
}

double scale_tol(double rel_tol, double pen) { return rel_tol * std::max(1.0, pen); }

// Columns u_l - u_l0 for l in ids.
Matrix generator_differences(const Matrix& u, const std::vector<Index>& ids) {
  Matrix diffs(u.cols(), ids.empty() ? 0 : static_cast<Index>(ids.size()) - 1);
  for (std::size_t i = 1; i < ids.size(); ++i)
    diffs.col(static_cast<Index>(i) - 1) = (u.row(ids[i]) - u.row(ids[0])).transpose();
  return diffs;
}

// Rows of D whose entries of D beta vanish (within tol).
Matrix zero_rows(const Matrix& d, const Vector& beta, double tol) {
  const Vector db = d * beta;
  std::vector<Index> rows;
  for (Index i = 0; i < db.size(); ++i)
    if (std::abs(db(i)) <= tol) rows.push_back(i);
  Matrix out(static_cast<Index>(rows.size()), d.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = d.row(rows[i]);
  return out;
}

int diff_order(const GaugeSpec& spec) { return spec.diff_operator() == DiffOperator::Tv ? 1 : 2; }

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(GaugeKind k) {
  switch (k) {
    case GaugeKind::L1: return "l1";
    case GaugeKind::Slope: return "slope";
    case GaugeKind::SupNorm: return "sup";
    case GaugeKind::GenLasso: return "genlasso";
    case GaugeKind::Custom: return "custom";
  }
  return "?";
}

Matrix tv_difference_matrix(Index p) {
  if (p < 2) throw DimensionTooSmall("total variation needs p >= 2");
  Matrix d = Matrix::Zero(p - 1, p);
  for (Index i = 0; i + 1 < p; ++i) {
    d(i, i) = -1.0;
    d(i, i + 1) = 1.0;
  }
  return d;
}

Matrix tf_difference_matrix(Index p) {
  if (p < 3) throw DimensionTooSmall("trend filtering needs p >= 3");
  Matrix d = Matrix::Zero(p - 2, p);
  for (Index i = 0; i + 2 < p; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -2.0;
    d(i, i + 2) = 1.0;
  }
  return d;
}

GaugeSpec::GaugeSpec(GaugeKind kind, Index p) : kind_(kind), p_(p), cache_(std::make_shared<Cache>()) {
  if (p < 1) throw InvalidArgument("gauge dimension must be positive");
}

GaugeSpec GaugeSpec::l1(Index p) { return GaugeSpec(GaugeKind::L1, p); }

GaugeSpec GaugeSpec::slope(Vector weights) {
  if (weights.size() < 1) throw InvalidArgument("SLOPE needs at least one weight");
  if (!weights.allFinite()) throw InvalidArgument("SLOPE weights must be finite");
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights(j) <= 0.0) throw InvalidArgument("SLOPE weights must be positive");
    if (j > 0 && !(weights(j) < weights(j - 1))) throw InvalidArgument("SLOPE weights must be strictly decreasing");
  }
  GaugeSpec g(GaugeKind::Slope, weights.size());
  g.weights_ = std::move(weights);
  return g;
}

GaugeSpec GaugeSpec::sup_norm(Index p) { return GaugeSpec(GaugeKind::SupNorm, p); }

GaugeSpec GaugeSpec::gen_lasso(Matrix d) {
  if (d.rows() < 1 || d.cols() < 1) throw InvalidArgument("difference matrix must be nonempty");
  if (!d.allFinite()) throw InvalidArgument("difference matrix must be finite");
  GaugeSpec g(GaugeKind::GenLasso, d.cols());
  g.d_ = std::move(d);
  return g;
}

GaugeSpec GaugeSpec::total_variation(Index p) {
  GaugeSpec g = gen_lasso(tv_difference_matrix(p));
  g.diff_op_ = DiffOperator::Tv;
  return g;
}

GaugeSpec GaugeSpec::trend_filtering(Index p) {
  GaugeSpec g = gen_lasso(tf_difference_matrix(p));
  g.diff_op_ = DiffOperator::Tf;
  return g;
}

GaugeSpec GaugeSpec::custom(Matrix u) {
  if (u.rows() < 1 || u.cols() < 1) throw InvalidArgument("generator matrix must be nonempty");
  if (!u.allFinite()) throw InvalidArgument("generators must be finite");
  if (u.row(0).cwiseAbs().maxCoeff() != 0.0) throw InvalidArgument("first generator must be the zero vector");
  std::unordered_set<std::string> seen;
  for (Index r = 0; r < u.rows(); ++r)
    if (!seen.insert(row_key(u, r)).second) throw InvalidArgument("generators must be pairwise distinct");
  GaugeSpec g(GaugeKind::Custom, u.cols());
  std::call_once(g.cache_->once, [&] { g.cache_->u = std::move(u); });
  return g;
}

double GaugeSpec::expanded_generator_count() const {
  const auto p = static_cast<double>(p_);
  switch (kind_) {
    case GaugeKind::L1: return std::exp2(p) + 1.0;
    case GaugeKind::Slope: return std::exp2(p) * factorial(p_) + 1.0;
    case GaugeKind::SupNorm: return 2.0 * p + 1.0;
    case GaugeKind::GenLasso: return std::exp2(static_cast<double>(d_.rows())) + 1.0;
    case GaugeKind::Custom: return static_cast<double>(cache_->u.rows());
  }
  return 0.0;
}

bool GaugeSpec::has_named_pattern() const {
  switch (kind_) {
    case GaugeKind::L1:
    case GaugeKind::Slope:
    case GaugeKind::SupNorm: return true;
    case GaugeKind::GenLasso: return diff_op_ != DiffOperator::General;
    case GaugeKind::Custom: return false;
  }
  return false;
}

bool GaugeSpec::uses_generator_route() const {
  if (kind_ == GaugeKind::Custom) return true;
  if (kind_ == GaugeKind::GenLasso && diff_op_ == DiffOperator::General) return materializable();
  return expanded_generator_count() <= kExpansionThreshold;
}

const Matrix& GaugeSpec::generators() const {
  std::call_once(cache_->once, [this] {
    try {
      if (!materializable()) {
        std::ostringstream msg;
        msg << describe() << " would expand to " << expanded_generator_count() << " generators (cap "
            << kGeneratorCap << ")";
        throw GeneratorBlowup(msg.str());
      }
      switch (kind_) {
        case GaugeKind::L1: cache_->u = l1_generators(p_); break;
        case GaugeKind::Slope: cache_->u = slope_generators(weights_); break;
        case GaugeKind::SupNorm: cache_->u = sup_generators(p_); break;
        case GaugeKind::GenLasso: cache_->u = genlasso_generators(d_); break;
        case GaugeKind::Custom: break;
      }
    } catch (...) {
      cache_->error = std::current_exception();
    }
  });
  if (cache_->error) std::rethrow_exception(cache_->error);
  return cache_->u;
}

std::string GaugeSpec::describe() const {
  std::ostringstream out;
  out << to_string(kind_) << "(p=" << p_;
  if (kind_ == GaugeKind::GenLasso) {
    out << ", m=" << d_.rows();
    if (diff_op_ == DiffOperator::Tv) out << ", tv";
    if (diff_op_ == DiffOperator::Tf) out << ", tf";
  }
  if (kind_ == GaugeKind::Custom) out << ", k=" << cache_->u.rows();
  out << ')';
  return out.str();
}

const Matrix& generators(const GaugeSpec& spec) { return spec.generators(); }

// ---------------------------------------------------------------------------

double pen_eval(const GaugeSpec& spec, const Vector& b) {
  check_dim(spec, b, "argument");
  switch (spec.kind()) {
    case GaugeKind::L1: return b.lpNorm<1>();
    case GaugeKind::SupNorm: return b.lpNorm<Eigen::Infinity>();
    case GaugeKind::Slope: {
      Vector a = b.cwiseAbs();
      std::sort(a.data(), a.data() + a.size(), std::greater<>());
      return spec.weights().dot(a);
    }
    case GaugeKind::GenLasso: return (spec.difference_matrix() * b).lpNorm<1>();
    case GaugeKind::Custom: return pen_eval_generators(spec, b);
  }
  return 0.0;
}

double pen_eval_generators(const GaugeSpec& spec, const Vector& b) {
  check_dim(spec, b, "argument");
  return (spec.generators() * b).maxCoeff();
}

double dual_feasibility(const GaugeSpec& spec, const Vector& s) {
  check_dim(spec, s, "dual vector");
  const Index p = spec.dim();
  switch (spec.kind()) {
    case GaugeKind::L1: return s.lpNorm<Eigen::Infinity>() - 1.0;
    case GaugeKind::SupNorm: return s.lpNorm<1>() - 1.0;
    case GaugeKind::Slope: {
      Vector a = s.cwiseAbs();
      std::sort(a.data(), a.data() + a.size(), std::greater<>());
      double cs = 0.0;
      double cw = 0.0;
      double worst = 0.0;
      for (Index j = 0; j < p; ++j) {
        cs += a(j);
        cw += spec.weights()(j);
        worst = std::max(worst, cs / cw);
      }
      return worst - 1.0;
    }
    case GaugeKind::GenLasso: {
      const Matrix& d = spec.difference_matrix();
      const Index m = d.rows();
      // Dual gauge: min r  s.t.  D'mu = s,  |mu_i| <= r.
      LpBuilder g;
      const Index mu = g.add_variables(m, -kInf, kInf);
      const Index r = g.add_variables(1, 0.0, kInf);
      g.set_objective(r, 1.0);
      for (Index j = 0; j < p; ++j) {
        std::vector<LpBuilder::Term> row;
        for (Index i = 0; i < m; ++i)
          if (d(i, j) != 0.0) row.emplace_back(mu + i, d(i, j));
        g.add_eq(std::move(row), s(j));
      }
      for (Index i = 0; i < m; ++i) {
        g.add_le({{mu + i, 1.0}, {r, -1.0}}, 0.0);
        g.add_le({{mu + i, -1.0}, {r, -1.0}}, 0.0);
      }
      const LpSolution sol = lp_solve(g.build());
      if (sol.status == LpStatus::Optimal) return sol.value - 1.0;
      // s is outside row(D): report the sup-norm distance to B*.
      LpBuilder dist;
      const Index sig = dist.add_variables(m, -1.0, 1.0);
      const Index t = dist.add_variables(1, 0.0, kInf);
      dist.set_objective(t, 1.0);
      for (Index j = 0; j < p; ++j) {
        std::vector<LpBuilder::Term> row;
        for (Index i = 0; i < m; ++i)
          if (d(i, j) != 0.0) row.emplace_back(sig + i, d(i, j));
        auto lo = row;
        row.emplace_back(t, -1.0);
        dist.add_le(std::move(row), s(j));
        lo.emplace_back(t, 1.0);
        dist.add_ge(std::move(lo), s(j));
      }
      const LpSolution ds = lp_solve(dist.build());
      return std::max(ds.value, std::numeric_limits<double>::min());
    }
    case GaugeKind::Custom: {
      const Matrix& u = spec.generators();
      const Index k = u.rows();
      LpBuilder g;
      const Index alpha = g.add_variables(k - 1, 0.0, kInf);
      for (Index l = 0; l + 1 < k; ++l) g.set_objective(alpha + l, 1.0);
      for (Index j = 0; j < p; ++j) {
        std::vector<LpBuilder::Term> row;
        for (Index l = 1; l < k; ++l)
          if (u(l, j) != 0.0) row.emplace_back(alpha + l - 1, u(l, j));
        g.add_eq(std::move(row), s(j));
      }
      const LpSolution sol = lp_solve(g.build());
      if (sol.status == LpStatus::Optimal) return sol.value - 1.0;
      LpBuilder dist;
      const Index a = dist.add_variables(k, 0.0, kInf);
      const Index t = dist.add_variables(1, 0.0, kInf);
      dist.set_objective(t, 1.0);
      std::vector<LpBuilder::Term> simplex;
      for (Index l = 0; l < k; ++l) simplex.emplace_back(a + l, 1.0);
      dist.add_eq(std::move(simplex), 1.0);
      for (Index j = 0; j < p; ++j) {
        std::vector<LpBuilder::Term> row;
        for (Index l = 0; l < k; ++l)
          if (u(l, j) != 0.0) row.emplace_back(a + l, u(l, j));
        auto lo = row;
        row.emplace_back(t, -1.0);
        dist.add_le(std::move(row), s(j));
        lo.emplace_back(t, 1.0);
        dist.add_ge(std::move(lo), s(j));
      }
      const LpSolution ds = lp_solve(dist.build());
      return std::max(ds.value, std::numeric_limits<double>::min());
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

std::string_view to_string(PatternKind k) {
  switch (k) {
    case PatternKind::Sign: return "sign";
    case PatternKind::SlopeRank: return "slope-rank";
    case PatternKind::Sup: return "sup";
    case PatternKind::TvSign: return "tv-sign";
    case PatternKind::TfSign: return "tf-sign";
  }
  return "?";
}

std::string NamedPattern::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(values[i]);
  }
  return out + ')';
}

NamedPattern named_pattern(PatternKind kind, const Vector& beta, double tol) {
  if (tol < 0.0) throw InvalidArgument("pattern tolerance must be non-negative");
  NamedPattern out{kind, {}};
  const Index p = beta.size();
  switch (kind) {
    case PatternKind::Sign:
      for (Index j = 0; j < p; ++j) out.values.push_back(sgn(beta(j), tol));
      break;
    case PatternKind::SlopeRank: out.values = slope_ranks(beta, tol); break;
    case PatternKind::Sup: {
      const double m = p > 0 ? beta.lpNorm<Eigen::Infinity>() : 0.0;
      for (Index j = 0; j < p; ++j) {
        const bool is_max = m > tol && std::abs(beta(j)) >= m - tol;
        out.values.push_back(is_max ? sgn(beta(j)) : 0);
      }
      break;
    }
    case PatternKind::TvSign:
      if (p < 2) throw DimensionTooSmall("TV pattern needs p >= 2");
      out.values = difference_signs(beta, 1, tol);
      break;
    case PatternKind::TfSign:
      if (p < 3) throw DimensionTooSmall("trend filtering pattern needs p >= 3");
      out.values = difference_signs(beta, 2, tol);
      break;
  }
  return out;
}

PatternKind pattern_kind_for(const GaugeSpec& spec) {
  switch (spec.kind()) {
    case GaugeKind::L1: return PatternKind::Sign;
    case GaugeKind::Slope: return PatternKind::SlopeRank;
    case GaugeKind::SupNorm: return PatternKind::Sup;
    case GaugeKind::GenLasso:
      if (spec.diff_operator() == DiffOperator::Tv) return PatternKind::TvSign;
      if (spec.diff_operator() == DiffOperator::Tf) return PatternKind::TfSign;
      break;
    case GaugeKind::Custom: break;
  }
  throw InvalidArgument("no named pattern for " + spec.describe());
}

// ---------------------------------------------------------------------------

std::string PatternFingerprint::str() const {
  if (named) return std::string(to_string(named->kind)) + named->str();
  std::string out = "{";
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(active[i]);
  }
  return out + '}';
}

std::vector<Index> active_generators(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  check_dim(spec, beta, "coefficient vector");
  const Matrix& u = spec.generators();
  const Vector vals = u * beta;
  const double pen = vals.maxCoeff();
  const double cut = pen - scale_tol(rel_tol, pen);
  std::vector<Index> ids;
  for (Index l = 0; l < vals.size(); ++l)
    if (vals(l) >= cut) ids.push_back(l);
  return ids;
}

PatternFingerprint active_set(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  check_dim(spec, beta, "coefficient vector");
  PatternFingerprint fp;
  fp.pen = pen_eval(spec, beta);
  const double tol = scale_tol(rel_tol, fp.pen);
  if (spec.has_named_pattern()) fp.named = named_pattern(pattern_kind_for(spec), beta, tol);
  if (spec.uses_generator_route()) {
    fp.active = active_generators(spec, beta, rel_tol);
    return fp;
  }
  if (!fp.named) throw GeneratorBlowup(spec.describe() + " has too many generators and no closed-form pattern");
  fp.virtual_indices = true;
  const auto p = static_cast<Index>(fp.named->values.size());
  for (Index j = 0; j < p; ++j) fp.active.push_back(j * (2 * p + 1) + fp.named->values[static_cast<std::size_t>(j)] + p);
  return fp;
}

Index face_dimension(const Matrix& u, const std::vector<Index>& ids) {
  if (ids.empty()) throw InvalidArgument("a face needs at least one generator");
  if (ids.size() == 1) return 0;
  return rank(generator_differences(u, ids));
}

Face subdifferential_face(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  Face f;
  f.vertices = active_generators(spec, beta, rel_tol);
  f.dimension = face_dimension(spec.generators(), f.vertices);
  f.codimension = spec.dim() - f.dimension;
  return f;
}

Index complexity_from_face(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  return subdifferential_face(spec, beta, rel_tol).codimension;
}

Index complexity_closed_form(const GaugeSpec& spec, const Vector& beta, double tol) {
  check_dim(spec, beta, "coefficient vector");
  switch (spec.kind()) {
    case GaugeKind::L1: {
      const auto pat = named_pattern(PatternKind::Sign, beta, tol);
      return std::count_if(pat.values.begin(), pat.values.end(), [](int v) { return v != 0; });
    }
    case GaugeKind::Slope: {
      const auto pat = named_pattern(PatternKind::SlopeRank, beta, tol);
      int m = 0;
      for (int v : pat.values) m = std::max(m, std::abs(v));
      return m;
    }
    case GaugeKind::SupNorm: {
      const auto pat = named_pattern(PatternKind::Sup, beta, tol);
      const auto nmax = std::count_if(pat.values.begin(), pat.values.end(), [](int v) { return v != 0; });
      if (nmax == 0) return 0;
      return spec.dim() - nmax + 1;
    }
    case GaugeKind::GenLasso: {
      if (spec.diff_operator() != DiffOperator::General) {
        const auto pat = named_pattern(pattern_kind_for(spec), beta, tol);
        const auto nnz = std::count_if(pat.values.begin(), pat.values.end(), [](int v) { return v != 0; });
        return diff_order(spec) + nnz;
      }
      const Matrix dz = zero_rows(spec.difference_matrix(), beta, tol);
      return spec.dim() - (dz.rows() == 0 ? 0 : rank(dz));
    }
    case GaugeKind::Custom: break;
  }
  throw InvalidArgument("no closed-form complexity for " + spec.describe());
}

Index complexity(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  if (spec.uses_generator_route()) return complexity_from_face(spec, beta, rel_tol);
  return complexity_closed_form(spec, beta, scale_tol(rel_tol, pen_eval(spec, beta)));
}

SubspaceBasis pattern_subspace_closed_form(const GaugeSpec& spec, const Vector& beta, double tol) {
  check_dim(spec, beta, "coefficient vector");
  const Index p = spec.dim();
  std::vector<Vector> span;
  switch (spec.kind()) {
    case GaugeKind::L1: {
      const auto pat = named_pattern(PatternKind::Sign, beta, tol);
      for (Index j = 0; j < p; ++j)
        if (pat.values[static_cast<std::size_t>(j)] != 0) span.push_back(Vector::Unit(p, j));
      break;
    }
    case GaugeKind::SupNorm: {
      const auto pat = named_pattern(PatternKind::Sup, beta, tol);
      Vector top = Vector::Zero(p);
      for (Index j = 0; j < p; ++j) {
        const int v = pat.values[static_cast<std::size_t>(j)];
        if (v != 0) top(j) = v;
      }
      if (top.squaredNorm() == 0.0) break;
      span.push_back(top);
      for (Index j = 0; j < p; ++j)
        if (top(j) == 0.0) span.push_back(Vector::Unit(p, j));
      break;
    }
    case GaugeKind::Slope: {
      const auto pat = named_pattern(PatternKind::SlopeRank, beta, tol);
      int m = 0;
      for (int v : pat.values) m = std::max(m, std::abs(v));
      for (int r = 1; r <= m; ++r) {
        Vector c = Vector::Zero(p);
        for (Index j = 0; j < p; ++j) {
          const int v = pat.values[static_cast<std::size_t>(j)];
          if (std::abs(v) == r) c(j) = sgn(v);
        }
        span.push_back(c);
      }
      break;
    }
    case GaugeKind::GenLasso: {
      const Matrix dz = zero_rows(spec.difference_matrix(), beta, tol);
      if (dz.rows() == 0) return SubspaceBasis(Matrix::Identity(p, p));
      return null_space_basis(dz);
    }
    case GaugeKind::Custom: throw InvalidArgument("no closed-form pattern subspace for " + spec.describe());
  }
  Matrix cols(p, static_cast<Index>(span.size()));
  for (std::size_t i = 0; i < span.size(); ++i) cols.col(static_cast<Index>(i)) = span[i];
  return span_basis(cols, p);
}

SubspaceBasis pattern_subspace(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  if (!spec.uses_generator_route()) {
    return pattern_subspace_closed_form(spec, beta, scale_tol(rel_tol, pen_eval(spec, beta)));
  }
  const auto ids = active_generators(spec, beta, rel_tol);
  const Matrix diffs = generator_differences(spec.generators(), ids);
  return orthogonal_complement(span_basis(diffs, spec.dim()));
}

Vector subgradient_element(const GaugeSpec& spec, const Vector& beta, double rel_tol) {
  check_dim(spec, beta, "coefficient vector");
  const Index p = spec.dim();
  if (spec.uses_generator_route()) {
    const auto ids = active_generators(spec, beta, rel_tol);
    const Matrix& u = spec.generators();
    Vector s = Vector::Zero(p);
    for (Index l : ids) s += u.row(l).transpose();
    return s / static_cast<double>(ids.size());
  }
  const double tol = scale_tol(rel_tol, pen_eval(spec, beta));
  Vector s = Vector::Zero(p);
  switch (spec.kind()) {
    case GaugeKind::L1: {
      const auto pat = named_pattern(PatternKind::Sign, beta, tol);
      for (Index j = 0; j < p; ++j) s(j) = pat.values[static_cast<std::size_t>(j)];
      return s;
    }
    case GaugeKind::SupNorm: {
      const auto pat = named_pattern(PatternKind::Sup, beta, tol);
      const auto nmax = std::count_if(pat.values.begin(), pat.values.end(), [](int v) { return v != 0; });
      if (nmax == 0) return s;
      for (Index j = 0; j < p; ++j) s(j) = pat.values[static_cast<std::size_t>(j)] / static_cast<double>(nmax);
      return s;
    }
    case GaugeKind::Slope: {
      // Each cluster receives the mean of the weights at its sorted positions.
      const auto pat = named_pattern(PatternKind::SlopeRank, beta, tol);
      int m = 0;
      for (int v : pat.values) m = std::max(m, std::abs(v));
      const Vector& w = spec.weights();
      Index pos = 0;
      for (int r = m; r >= 1; --r) {
        std::vector<Index> members;
        for (Index j = 0; j < p; ++j)
          if (std::abs(pat.values[static_cast<std::size_t>(j)]) == r) members.push_back(j);
        const auto size = static_cast<Index>(members.size());
        const double mean = w.segment(pos, size).mean();
        for (Index j : members) s(j) = sgn(pat.values[static_cast<std::size_t>(j)]) * mean;
        pos += size;
      }
      return s;
    }
    case GaugeKind::GenLasso: {
      const Matrix& d = spec.difference_matrix();
      const Vector db = d * beta;
      Vector sigma(db.size());
      for (Index i = 0; i < db.size(); ++i) sigma(i) = sgn(db(i), tol);
      return d.transpose() * sigma;
    }
    case GaugeKind::Custom: break;
  }
  throw InvalidArgument("cannot build a subgradient for " + spec.describe());
}

bool subdifferential_contains(const GaugeSpec& spec, const Vector& outer, const Vector& inner, double rel_tol) {
  check_dim(spec, outer, "outer vector");
  // A face containing a relative-interior point of another face contains all of it.
  const Vector s = subgradient_element(spec, inner, rel_tol);
  const double pen = pen_eval(spec, outer);
  return s.dot(outer) >= pen - scale_tol(rel_tol, pen);
}

// ---------------------------------------------------------------------------

double exposure_margin(const Matrix& u, const std::vector<Index>& ids) {
  const Index k = u.rows();
  const Index p = u.cols();
  std::vector<char> in(static_cast<std::size_t>(k), 0);
  for (Index l : ids) {
    if (l < 0 || l >= k) throw InvalidArgument("generator index out of range");
    in[static_cast<std::size_t>(l)] = 1;
  }
  LpBuilder b;
  const Index a = b.add_variables(p, -1.0, 1.0);
  const Index c = b.add_variables(1, -kInf, kInf);
  const Index delta = b.add_variables(1, -kInf, 1.0);
  b.set_objective(delta, -1.0);
  for (Index l = 0; l < k; ++l) {
    std::vector<LpBuilder::Term> row;
    for (Index j = 0; j < p; ++j)
      if (u(l, j) != 0.0) row.emplace_back(a + j, u(l, j));
    row.emplace_back(c, -1.0);
    if (in[static_cast<std::size_t>(l)]) {
      b.add_eq(std::move(row), 0.0);
    } else {
      row.emplace_back(delta, 1.0);
      b.add_le(std::move(row), 0.0);
    }
  }
  const LpSolution sol = lp_solve(b.build());
  if (sol.status != LpStatus::Optimal) return -kInf;
  return -sol.value;
}

std::vector<Face> enumerate_faces(const GaugeSpec& spec, Index max_generators) {
  if (max_generators > kFaceEnumerationCap) {
    throw InvalidArgument("face enumeration is limited to " + std::to_string(kFaceEnumerationCap) + " generators");
  }
  if (spec.expanded_generator_count() > static_cast<double>(max_generators) && spec.kind() != GaugeKind::GenLasso) {
    throw GeneratorBlowup(spec.describe() + " has more than " + std::to_string(max_generators) + " generators");
  }
  const Matrix& u = spec.generators();
  const Index k = u.rows();
  if (k > max_generators) {
    throw GeneratorBlowup(spec.describe() + " has " + std::to_string(k) + " generators, more than " +
                          std::to_string(max_generators));
  }
  std::vector<Face> faces;
  for (Index mask = 1; mask < (Index{1} << k); ++mask) {
    std::vector<Index> ids;
    for (Index l = 0; l < k; ++l)
      if ((mask >> l) & 1) ids.push_back(l);
    if (exposure_margin(u, ids) <= 1e-9) continue;
    Face f;
    f.vertices = std::move(ids);
    f.dimension = face_dimension(u, f.vertices);
    f.codimension = spec.dim() - f.dimension;
    faces.push_back(std::move(f));
  }
  return faces;
}

}  // namespace pgauge
