#pragma once

#include <cmath>
#include <span>

#include "efgce/game.hpp"

namespace efgce {

// eta_t = tau * t^{-exponent}; exponent 0 gives a constant step size
struct StepSchedule {
  double tau = 1.0;
  double exponent = 0.0;
  double eta(int t) const { return exponent == 0.0 ? tau : tau * std::pow(double(t), -exponent); }
};

enum class LocalAlgo { omwu, mwu, rmplus };

// gamma[j] = 1 + max_a sum_{j': parent_seq(j') = (j,a)} gamma[j']
// w[(j,a)] = gamma[j] - sum_{j' under (j,a)} gamma[j'],  w[empty] = 1
struct DgeWeights {
  Vec gamma;  // per infoset
  Vec w;      // per sequence
};
DgeWeights dge_weights(const PlayerIndex& idx);

// dilatable global entropy d(x) = sum_s w[s] x[s] log x[s] over the given
// sequence range (offset into w)
double dge_value(const DgeWeights& dge, int seq_first, std::span<const double> x);

// Optimistic multiplicative weights in FTRL form:
//   x^t[k] proportional to exp(eta_t (S^{t-1}[k] + m^t[k])),
// with the one-recency prediction m^t = l^{t-1} unless a prediction is
// passed explicitly. MWU is the same update with m = 0.
class OmwuSimplex {
 public:
  OmwuSimplex(int m, StepSchedule sched, bool predictive = true)
      : sum_(m, 0.0), last_(m, 0.0), x_(m, 0.0), sched_(sched), predictive_(predictive) {}

  const Vec& next() { return next(predictive_ ? last_ : Vec(dim(), 0.0)); }
  const Vec& next(std::span<const double> prediction);
  void observe(std::span<const double> utility);
  int dim() const { return static_cast<int>(sum_.size()); }
  int time() const { return t_; }

 private:
  Vec sum_, last_, x_;
  StepSchedule sched_;
  bool predictive_;
  int t_ = 0;
};

// Regret matching+ on the simplex.
class RmPlusSimplex {
 public:
  explicit RmPlusSimplex(int m) : regret_(m, 0.0), x_(m, 1.0 / m) {}
  const Vec& next();
  void observe(std::span<const double> utility);
  int dim() const { return static_cast<int>(regret_.size()); }

 private:
  Vec regret_, x_;
};

// View of a sequence-form polytope: either a whole player's Q_i (vectors
// indexed by all sequences, entry 0 the empty sequence) or the subtree Q_j
// rooted at an infoset (vectors over the subtree's contiguous range, with
// an implicit unit of mass feeding the root infoset).
struct TreeplexScope {
  const PlayerIndex* idx = nullptr;
  int root = -1;
  int seq_first = 0, seq_count = 0;
  int inf_first = 0, inf_count = 0;

  static TreeplexScope whole(const PlayerIndex& idx);
  static TreeplexScope subtree(const PlayerIndex& idx, int root_infoset);
  bool contains_seq(int s) const { return s >= seq_first && s < seq_first + seq_count; }
};

// OFTRL with the dilatable global entropy DGF; the update is the exact
// argmax of <x, eta_t (S + m)> - d(x), computed in one bottom-up value pass,
// one local softmax per infoset, and one top-down product.
class OftrlTreeplex {
 public:
  OftrlTreeplex(TreeplexScope scope, const DgeWeights& dge, StepSchedule sched,
                bool predictive = true);

  const Vec& next();
  void observe(std::span<const double> utility);
  const TreeplexScope& scope() const { return scope_; }
  int time() const { return t_; }

 private:
  TreeplexScope scope_;
  Vec gamma_;  // per scope infoset
  Vec sum_, last_, x_, locals_;
  StepSchedule sched_;
  bool predictive_;
  int t_ = 0;
};

// Stable-predictive CFR: one local minimizer per infoset fed counterfactual
// utilities; decision points mix with the convex-hull circuit. With omwu
// locals the mixers use the advanced prediction
//   m^t[a] = l^{t-1}[(j,a)] + sum_child <l^{t-1}|_child, x_child^t>.
class CfrTreeplex {
 public:
  CfrTreeplex(TreeplexScope scope, LocalAlgo algo, StepSchedule sched);

  const Vec& next();
  void observe(std::span<const double> utility);
  const TreeplexScope& scope() const { return scope_; }

 private:
  TreeplexScope scope_;
  LocalAlgo algo_;
  StepSchedule sched_;
  Vec sum_, last_, regret_, locals_, x_;
  Vec values_;  // per scope infoset, scratch
  int t_ = 0;
};

}  // namespace efgce
