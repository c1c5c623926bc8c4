#include "efgce/fixed_point.hpp"

#include <cmath>
#include <stdexcept>

namespace efgce {

Vec stationary_distribution(std::span<const double> matrix, int m, double tol, int max_iter) {
  if (static_cast<int>(matrix.size()) != m * m)
    throw std::runtime_error("stationary_distribution: matrix size mismatch");
  bool identity = true;
  for (int r = 0; r < m && identity; ++r)
    for (int c = 0; c < m; ++c)
      if (matrix[r * m + c] != (r == c ? 1.0 : 0.0)) {
        identity = false;
        break;
      }
  if (identity)
    throw std::runtime_error(
        "stationary_distribution: identity chain, stationary distribution is not unique");

  // stopping on the l1 residual also certifies the Euclidean one; each step
  // renormalizes, which absorbs slightly sub-stochastic inputs coming from
  // upstream fixed-point tolerance
  Vec pi(m, 1.0 / m), next(m);
  for (int it = 0; it < max_iter; ++it) {
    double mass = 0;
    for (int r = 0; r < m; ++r) {
      double v = 0;
      for (int c = 0; c < m; ++c) v += matrix[r * m + c] * pi[c];
      next[r] = v;
      mass += v;
    }
    if (!(mass > 0)) throw std::runtime_error("stationary_distribution: chain lost all mass");
    double res = 0;
    for (int r = 0; r < m; ++r) {
      next[r] /= mass;
      res += std::abs(next[r] - pi[r]);
    }
    if (res <= tol) return next;
    pi.swap(next);
  }
  throw std::runtime_error("stationary_distribution: no convergence after " +
                           std::to_string(max_iter) + " iterations (chain not ergodic?)");
}

void extend_partial_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi, int j_star,
                                Vec& x, const FixedPointOptions& opt) {
  if (phi.kind != DeviationKind::trigger)
    throw std::runtime_error("extend_partial_fixed_point expects trigger deviations");
  int na = idx.num_actions[j_star];
  int parent = idx.parent_seq[j_star];

  // inflow from triggers at strict ancestors of j_star
  Vec r(na, 0.0);
  double ancestor_mass = 0;  // lambda mass of triggers weakly preceding parent
  for (int j = idx.parent_infoset[j_star]; j >= 0; j = idx.parent_infoset[j]) {
    int base = idx.subtree_seq_begin(j);
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int s = idx.seq_of(j, a);
      double lam = phi.lambda[s - 1];
      if (lam == 0) continue;
      const Vec& q = phi.continuation[s - 1];
      for (int b = 0; b < na; ++b) r[b] += lam * x[s] * q[idx.seq_of(j_star, b) - base];
    }
  }
  for (int s = parent; s != 0; s = idx.parent_seq[idx.seq_infoset[s]]) ancestor_mass += phi.lambda[s - 1];

  if (x[parent] <= 0.0) {
    for (int a = 0; a < na; ++a) x[idx.seq_of(j_star, a)] = 0.0;
    return;
  }

  int base_star = idx.subtree_seq_begin(j_star);
  Vec w(static_cast<size_t>(na) * na);
  for (int c = 0; c < na; ++c) {
    int sc = idx.seq_of(j_star, c);
    double lam_c = phi.lambda[sc - 1];
    const Vec& qc = phi.continuation[sc - 1];
    double keep = 1.0 - ancestor_mass - lam_c;
    for (int a = 0; a < na; ++a) {
      double v = r[a] + lam_c * qc[idx.seq_of(j_star, a) - base_star] * x[parent];
      if (a == c) v += keep * x[parent];
      w[a * na + c] = v / x[parent];
    }
  }
  Vec b = stationary_distribution(w, na, opt.tol, opt.max_iter);
  for (int a = 0; a < na; ++a) x[idx.seq_of(j_star, a)] = x[parent] * b[a];
}

Vec efce_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi,
                     const FixedPointOptions& opt) {
  Vec x(idx.num_sequences, 0.0);
  x[0] = 1.0;
  for (int j = 0; j < idx.num_infosets; ++j) extend_partial_fixed_point(idx, phi, j, x, opt);
  return x;
}

Vec efcce_fixed_point(const PlayerIndex& idx, const DeviationProfile& phi) {
  if (phi.kind != DeviationKind::coarse)
    throw std::runtime_error("efcce_fixed_point expects coarse deviations");
  Vec x(idx.num_sequences, 0.0);
  x[0] = 1.0;
  // d[j] = sum of lambda over infosets weakly preceding j
  Vec d(idx.num_infosets, 0.0);
  for (int j = 0; j < idx.num_infosets; ++j) {
    int pj = idx.parent_infoset[j];
    d[j] = (pj >= 0 ? d[pj] : 0.0) + phi.lambda[j];
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int s = idx.seq_of(j, a);
      if (d[j] == 0.0) {
        x[s] = x[idx.parent_seq[j]] / idx.num_actions[j];
        continue;
      }
      double acc = 0;
      for (int jp = j; jp >= 0; jp = idx.parent_infoset[jp]) {
        if (phi.lambda[jp] == 0.0) continue;
        const Vec& q = phi.continuation[jp];
        acc += phi.lambda[jp] * q[s - idx.subtree_seq_begin(jp)] * x[idx.parent_seq[jp]];
      }
      x[s] = acc / d[j];
    }
  }
  return x;
}

Vec fixed_point(const PlayerIndex& idx, const DeviationProfile& phi,
                const FixedPointOptions& opt) {
  return phi.kind == DeviationKind::trigger ? efce_fixed_point(idx, phi, opt)
                                            : efcce_fixed_point(idx, phi);
}

}  // namespace efgce
