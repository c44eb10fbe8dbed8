#pragma once

// Small designs that appear in several test binaries.

#include "oracles.hpp"

#include <cmath>

namespace pgauge::fixture {

/// Two observations, three coefficients; the sup-norm path example.
inline Matrix sup_path_x() { return oracle::mat({{1, 0, 2}, {0, 1, 1}}); }
inline Vector sup_path_beta() { return oracle::vec({0, 2, 2}); }

/// Generalized LASSO example whose dual ball is a planar hexagon.
inline Matrix hexagon_x() { return oracle::mat({{1, 1, 1}, {3, 1, 1}, {std::sqrt(2.0), 0, 0}}); }
inline Matrix hexagon_d() { return oracle::mat({{1, 1, 0}, {1, 0, 1}, {2, 1, 1}}); }

}  // namespace pgauge::fixture
