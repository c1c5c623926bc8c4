#pragma once

#include <span>

#include "efgce/deviations.hpp"
#include "efgce/game.hpp"

namespace efgce {

struct FixedPointOptions {
  double tol = 1e-6;       // power-iteration residual, Euclidean norm
  int max_iter = 100000;
};

// Power iteration for a column-stochastic m x m matrix M (row-major,
// M[r*m+c]), uniform initialization, stopped when ||M pi - pi||_2 <= tol.
// Throws on the degenerate identity chain (no unique stationary
// distribution) and when max_iter is exceeded (reducible/periodic chain).
Vec stationary_distribution(std::span<const double> matrix, int m, double tol = 1e-6,
                            int max_iter = 100000);

// Promotes a partial fixed point: x is flow-conserving and phi-fixed on the
// trunk of infosets preceding j_star; on return the entries of j_star's
// sequences are filled so the property extends to j_star. Touches only
// those entries.
void extend_partial_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi, int j_star,
                                Vec& x, const FixedPointOptions& opt = {});

// Fixed point of a trigger-deviation mixture: top-down promotion over all
// infosets, one small stationary distribution per infoset.
Vec efce_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi,
                     const FixedPointOptions& opt = {});

// Closed-form fixed point of a coarse mixture; exact, no eigen-solve,
// O(|Sigma| * depth).
Vec efcce_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi);

Vec fixed_point(const PlayerIndex& idx, const DeviationProfile& phi,
                const FixedPointOptions& opt = {});

}  // namespace efgce
