#pragma once

#include "pgauge/numerics.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pgauge {

/// Hard cap on the number of materialized generator rows.
inline constexpr double kGeneratorCap = 1048576.0;  // 2^20

/// Above this generator count the named kinds switch to closed-form pattern
/// calculus instead of scanning generators.
inline constexpr double kExpansionThreshold = 4096.0;

/// Face enumeration scans all vertex subsets, so it is capped hard.
inline constexpr Index kFaceEnumerationCap = 16;

enum class GaugeKind { L1, Slope, SupNorm, GenLasso, Custom };

/// Which difference operator a GenLasso gauge was built from.
enum class DiffOperator { General, Tv, Tf };

[[nodiscard]] std::string_view to_string(GaugeKind k);

/// First-order difference matrix, (p-1) x p, rows (-1, 1).
[[nodiscard]] Matrix tv_difference_matrix(Index p);
/// Second-order difference matrix, (p-2) x p, rows (1, -2, 1).
[[nodiscard]] Matrix tf_difference_matrix(Index p);

/// A real-valued polyhedral gauge pen(b) = max_l u_l'b with u_1 = 0.
///
/// Named kinds carry closed forms; the generator matrix U (k x p, first row
/// zero, rows distinct) is materialized lazily on first request and shared
/// between copies. Instances are immutable and safe to share across threads.
class GaugeSpec {
 public:
  static GaugeSpec l1(Index p);
  /// Weights must be strictly decreasing and positive.
  static GaugeSpec slope(Vector weights);
  static GaugeSpec sup_norm(Index p);
  /// pen(b) = ||D b||_1 for an arbitrary m x p matrix D.
  static GaugeSpec gen_lasso(Matrix d);
  static GaugeSpec total_variation(Index p);
  static GaugeSpec trend_filtering(Index p);
  /// Rows of `u` are the generators; the first row must be zero and rows distinct.
  static GaugeSpec custom(Matrix u);

  [[nodiscard]] GaugeKind kind() const { return kind_; }
  [[nodiscard]] Index dim() const { return p_; }
  [[nodiscard]] const Vector& weights() const { return weights_; }
  [[nodiscard]] const Matrix& difference_matrix() const { return d_; }
  [[nodiscard]] DiffOperator diff_operator() const { return diff_op_; }

  /// Generator count before deduplication (2^p, 2^p p!, 2p, 2^m, plus the zero row).
  [[nodiscard]] double expanded_generator_count() const;
  [[nodiscard]] bool materializable() const { return expanded_generator_count() <= kGeneratorCap; }
  /// True when pattern questions are answered by scanning generators.
  [[nodiscard]] bool uses_generator_route() const;
  /// True when named-pattern closed forms exist (L1, Slope, SupNorm, TV, TF).
  [[nodiscard]] bool has_named_pattern() const;

  /// Throws GeneratorBlowup when the cap is exceeded.
  [[nodiscard]] const Matrix& generators() const;

  [[nodiscard]] std::string describe() const;

 private:
  struct Cache;
  GaugeSpec(GaugeKind kind, Index p);

  GaugeKind kind_;
  Index p_;
  Vector weights_;
  Matrix d_;
  DiffOperator diff_op_ = DiffOperator::General;
  std::shared_ptr<Cache> cache_;
};

/// Generator matrix of the gauge (rows u_1 = 0, ..., u_k).
[[nodiscard]] const Matrix& generators(const GaugeSpec& spec);

/// pen(b), closed form for named kinds.
[[nodiscard]] double pen_eval(const GaugeSpec& spec, const Vector& b);

/// pen(b) as max_l u_l'b; used to cross-check the closed forms.
[[nodiscard]] double pen_eval_generators(const GaugeSpec& spec, const Vector& b);

/// A number that is <= 0 exactly when s lies in B* = conv(u_1..u_k).
/// Closed forms for named kinds; LP based for GenLasso and Custom, where the
/// value is the sup-norm distance to B* outside and (dual gauge - 1) inside.
[[nodiscard]] double dual_feasibility(const GaugeSpec& spec, const Vector& s);

// ---------------------------------------------------------------------------
// Named patterns

enum class PatternKind { Sign, SlopeRank, Sup, TvSign, TfSign };

[[nodiscard]] std::string_view to_string(PatternKind k);

struct NamedPattern {
  PatternKind kind = PatternKind::Sign;
  std::vector<int> values;

  bool operator==(const NamedPattern&) const = default;
  [[nodiscard]] std::string str() const;
};

/// Pattern extractors. `tol` = 0 means exact component comparisons; a positive
/// tol treats magnitudes/differences within tol as equal (or zero).
[[nodiscard]] NamedPattern named_pattern(PatternKind kind, const Vector& beta, double tol = 0.0);

/// The pattern kind that matches a spec; throws InvalidArgument for General
/// GenLasso and Custom gauges.
[[nodiscard]] PatternKind pattern_kind_for(const GaugeSpec& spec);

// ---------------------------------------------------------------------------
// Active sets, faces, complexity

inline constexpr double kActiveRelTol = 1e-8;

/// Canonical identifier of a pattern equivalence class.
///
/// When the spec uses its generator route, `active` holds the indices l with
/// u_l'beta >= pen(beta) - rel_tol * max(1, pen(beta)). Otherwise (large named
/// kinds) `active` is a virtual index set in bijection with the named pattern:
/// entry j with value v maps to j * (2p + 1) + (v + p).
struct PatternFingerprint {
  std::vector<Index> active;
  double pen = 0.0;
  bool virtual_indices = false;
  std::optional<NamedPattern> named;

  bool operator==(const PatternFingerprint& o) const {
    return virtual_indices == o.virtual_indices && active == o.active;
  }
  [[nodiscard]] std::string str() const;
};

[[nodiscard]] PatternFingerprint active_set(const GaugeSpec& spec, const Vector& beta,
                                            double rel_tol = kActiveRelTol);

/// Active generator indices, always by scanning generators.
[[nodiscard]] std::vector<Index> active_generators(const GaugeSpec& spec, const Vector& beta,
                                                   double rel_tol = kActiveRelTol);

/// A face of B*, identified by the generators lying on it.
struct Face {
  std::vector<Index> vertices;
  Index dimension = 0;
  Index codimension = 0;

  bool operator==(const Face&) const = default;
};

/// Affine dimension of conv{u_l : l in ids}.
[[nodiscard]] Index face_dimension(const Matrix& generators, const std::vector<Index>& ids);

[[nodiscard]] Face subdifferential_face(const GaugeSpec& spec, const Vector& beta,
                                        double rel_tol = kActiveRelTol);

/// Dimension of lin(C_beta) = codimension of the subdifferential face.
[[nodiscard]] Index complexity(const GaugeSpec& spec, const Vector& beta, double rel_tol = kActiveRelTol);

/// Complexity from the face rank computation only.
[[nodiscard]] Index complexity_from_face(const GaugeSpec& spec, const Vector& beta,
                                         double rel_tol = kActiveRelTol);

/// Complexity from the named-pattern formulas (L1, Slope, SupNorm, TV, TF).
[[nodiscard]] Index complexity_closed_form(const GaugeSpec& spec, const Vector& beta, double tol = 0.0);

/// Orthonormal basis of lin(C_beta) = aff(subdifferential)^perp.
[[nodiscard]] SubspaceBasis pattern_subspace(const GaugeSpec& spec, const Vector& beta,
                                             double rel_tol = kActiveRelTol);

/// Same subspace built directly from the named pattern.
[[nodiscard]] SubspaceBasis pattern_subspace_closed_form(const GaugeSpec& spec, const Vector& beta,
                                                         double tol = 0.0);

/// A point in the relative interior of the subdifferential of pen at beta.
[[nodiscard]] Vector subgradient_element(const GaugeSpec& spec, const Vector& beta,
                                         double rel_tol = kActiveRelTol);

/// True when the subdifferential at `inner` is contained in the one at `outer`.
[[nodiscard]] bool subdifferential_contains(const GaugeSpec& spec, const Vector& outer, const Vector& inner,
                                            double rel_tol = kActiveRelTol);

/// All nonempty faces of B*, each certified by an exposing direction.
/// Requires generator count <= max_generators <= kFaceEnumerationCap.
[[nodiscard]] std::vector<Face> enumerate_faces(const GaugeSpec& spec, Index max_generators = kFaceEnumerationCap);

/// Exposure test: is `ids` exactly the set of generators on some face?
/// Returns the margin delta of the best exposing direction (face iff > 1e-9).
[[nodiscard]] double exposure_margin(const Matrix& generators, const std::vector<Index>& ids);

}  // namespace pgauge
