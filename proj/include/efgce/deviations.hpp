#pragma once

#include <memory>
#include <span>
#include <variant>

#include "efgce/game.hpp"
#include "efgce/regret.hpp"

namespace efgce {

// trigger: deviations triggered by a recommended sequence (j,a), continuation
//   in Q_j (EFCE); coarse: triggered on reaching an infoset j before seeing
//   the recommendation, continuation in Q_j (EFCCE)
enum class DeviationKind { trigger, coarse };

// Element of co Psi_i (or co Psi~_i): mixture weights over the trigger set
// plus one continuation strategy per trigger, each over the contiguous
// sequence range of its subtree.
struct DeviationProfile {
  DeviationKind kind = DeviationKind::trigger;
  Vec lambda;
  std::vector<Vec> continuation;
};

// trigger enumeration: for `trigger` the k-th trigger is sequence k+1; for
// `coarse` it is infoset k
int num_triggers(const PlayerIndex& idx, DeviationKind kind);
int trigger_infoset(const PlayerIndex& idx, DeviationKind kind, int k);
// the sequence whose realization weight scales the deviation: the trigger
// sequence itself, or the parent sequence of the triggered infoset
int trigger_scale_seq(const PlayerIndex& idx, DeviationKind kind, int k);

// phi(x), evaluated matrix-free in O(sum_k |subtree_k|)
Vec apply_deviation(const PlayerIndex& idx, const DeviationProfile& phi,
                    std::span<const double> x);

// ||phi(x) - x||_1
double deviation_residual(const PlayerIndex& idx, const DeviationProfile& phi,
                          std::span<const double> x);

// The rank-one slice of L = (l (x) x)^flat seen by trigger k:
//   g[s] = l[s] * x[scale_seq(k)] over the subtree range, and the constant
//   part offset = <l, x> - sum_{s >= trigger point} l[s] x[s], so that
//   <g, q> + offset = <l, phi_{k -> q}(x)> for every continuation q.
struct LocalTriggerUtility {
  Vec g;
  double offset = 0;
};
LocalTriggerUtility local_trigger_utility(const PlayerIndex& idx, DeviationKind kind, int k,
                                          std::span<const double> loss,
                                          std::span<const double> x);

enum class ContinuationAlgo { oftrl, cfr_omwu, cfr_mwu, cfr_rmplus };

// Predictive Psi-regret minimizer: one continuation minimizer per trigger
// plus an OMWU mixer over triggers. The mixer always runs with the advanced
// prediction m^t[k] = <l^{t-1}, phi_{k -> q_k^t}(x^{t-1})>.
class PsiRegretMinimizer {
 public:
  PsiRegretMinimizer(const PlayerIndex& idx, DeviationKind kind, ContinuationAlgo algo,
                     StepSchedule sched);

  const DeviationProfile& next();
  // loss = player's counterfactual utility, played = the fixed point that
  // was actually played for the profile returned by the last next()
  void observe(std::span<const double> loss, std::span<const double> played);

  int time() const { return t_; }
  const PlayerIndex& player_index() const { return *idx_; }
  DeviationKind kind() const { return kind_; }

 private:
  using Sub = std::variant<OftrlTreeplex, CfrTreeplex>;
  const Vec& sub_next(int k);

  const PlayerIndex* idx_;
  DeviationKind kind_;
  DgeWeights dge_;
  std::vector<Sub> subs_;
  OmwuSimplex mixer_;
  DeviationProfile profile_;
  Vec prev_loss_, prev_played_;
  int t_ = 0;
};

}  // namespace efgce
