#include "efgce/deviations.hpp"

#include <stdexcept>

namespace efgce {

int num_triggers(const PlayerIndex& idx, DeviationKind kind) {
  return kind == DeviationKind::trigger ? idx.num_sequences - 1 : idx.num_infosets;
}

int trigger_infoset(const PlayerIndex& idx, DeviationKind kind, int k) {
  return kind == DeviationKind::trigger ? idx.seq_infoset[k + 1] : k;
}

int trigger_scale_seq(const PlayerIndex& idx, DeviationKind kind, int k) {
  return kind == DeviationKind::trigger ? k + 1 : idx.parent_seq[k];
}

namespace {

// lambda mass on the path to each sequence: for trigger deviations the
// triggers weakly preceding s, for coarse deviations the infosets weakly
// preceding s's infoset
Vec path_mass(const PlayerIndex& idx, const DeviationProfile& phi) {
  Vec cum(idx.num_sequences, 0.0);
  for (int j = 0; j < idx.num_infosets; ++j) {
    double above = cum[idx.parent_seq[j]];
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int s = idx.seq_of(j, a);
      cum[s] = above + (phi.kind == DeviationKind::trigger ? phi.lambda[s - 1] : phi.lambda[j]);
    }
  }
  return cum;
}

void check_profile(const PlayerIndex& idx, const DeviationProfile& phi) {
  int nt = num_triggers(idx, phi.kind);
  if (static_cast<int>(phi.lambda.size()) != nt ||
      static_cast<int>(phi.continuation.size()) != nt)
    throw std::runtime_error("deviation profile dimension mismatch");
}

}  // namespace

Vec apply_deviation(const PlayerIndex& idx, const DeviationProfile& phi,
                    std::span<const double> x) {
  check_profile(idx, phi);
  if (static_cast<int>(x.size()) != idx.num_sequences)
    throw std::runtime_error("strategy dimension mismatch");
  Vec cum = path_mass(idx, phi);
  Vec out(idx.num_sequences);
  out[0] = x[0];
  for (int s = 1; s < idx.num_sequences; ++s) out[s] = x[s] * (1.0 - cum[s]);
  for (int k = 0; k < num_triggers(idx, phi.kind); ++k) {
    double scale = phi.lambda[k] * x[trigger_scale_seq(idx, phi.kind, k)];
    if (scale == 0) continue;
    int j = trigger_infoset(idx, phi.kind, k);
    int base = idx.subtree_seq_begin(j), end = idx.subtree_seq_end(j);
    const Vec& q = phi.continuation[k];
    for (int s = base; s < end; ++s) out[s] += scale * q[s - base];
  }
  return out;
}

double deviation_residual(const PlayerIndex& idx, const DeviationProfile& phi,
                          std::span<const double> x) {
  Vec y = apply_deviation(idx, phi, x);
  double r = 0;
  for (int s = 0; s < idx.num_sequences; ++s) r += std::abs(y[s] - x[s]);
  return r;
}

LocalTriggerUtility local_trigger_utility(const PlayerIndex& idx, DeviationKind kind, int k,
                                          std::span<const double> loss,
                                          std::span<const double> x) {
  int j = trigger_infoset(idx, kind, k);
  int base = idx.subtree_seq_begin(j), end = idx.subtree_seq_end(j);
  double scale = x[trigger_scale_seq(idx, kind, k)];

  LocalTriggerUtility out;
  out.g.resize(end - base);
  for (int s = base; s < end; ++s) out.g[s - base] = scale * loss[s];

  double dot = 0;
  for (int s = 0; s < idx.num_sequences; ++s) dot += loss[s] * x[s];
  double triggered = 0;
  if (kind == DeviationKind::coarse) {
    for (int s = base; s < end; ++s) triggered += loss[s] * x[s];
  } else {
    int ts = k + 1;
    triggered = loss[ts] * x[ts];
    for (int c : idx.children_of_seq(ts))
      for (int s = idx.subtree_seq_begin(c); s < idx.subtree_seq_end(c); ++s)
        triggered += loss[s] * x[s];
  }
  out.offset = dot - triggered;
  return out;
}

PsiRegretMinimizer::PsiRegretMinimizer(const PlayerIndex& idx, DeviationKind kind,
                                       ContinuationAlgo algo, StepSchedule sched)
    : idx_(&idx),
      kind_(kind),
      dge_(dge_weights(idx)),
      mixer_(num_triggers(idx, kind), sched),
      prev_loss_(idx.num_sequences, 0.0),
      prev_played_(idx.num_sequences, 0.0) {
  int nt = num_triggers(idx, kind);
  subs_.reserve(nt);
  for (int k = 0; k < nt; ++k) {
    TreeplexScope scope = TreeplexScope::subtree(idx, trigger_infoset(idx, kind, k));
    switch (algo) {
      case ContinuationAlgo::oftrl:
        subs_.emplace_back(std::in_place_type<OftrlTreeplex>, scope, dge_, sched);
        break;
      case ContinuationAlgo::cfr_omwu:
        subs_.emplace_back(std::in_place_type<CfrTreeplex>, scope, LocalAlgo::omwu, sched);
        break;
      case ContinuationAlgo::cfr_mwu:
        subs_.emplace_back(std::in_place_type<CfrTreeplex>, scope, LocalAlgo::mwu, sched);
        break;
      case ContinuationAlgo::cfr_rmplus:
        subs_.emplace_back(std::in_place_type<CfrTreeplex>, scope, LocalAlgo::rmplus, sched);
        break;
    }
  }
  profile_.kind = kind;
  profile_.lambda.assign(nt, 0.0);
  profile_.continuation.resize(nt);
}

const Vec& PsiRegretMinimizer::sub_next(int k) {
  return std::visit([](auto& s) -> const Vec& { return s.next(); }, subs_[k]);
}

const DeviationProfile& PsiRegretMinimizer::next() {
  int nt = num_triggers(*idx_, kind_);
  for (int k = 0; k < nt; ++k) profile_.continuation[k] = sub_next(k);

  // advanced prediction: previous L evaluated at the fresh continuations
  Vec m(nt, 0.0);
  if (t_ > 0) {
    for (int k = 0; k < nt; ++k) {
      LocalTriggerUtility u = local_trigger_utility(*idx_, kind_, k, prev_loss_, prev_played_);
      double dot = u.offset;
      const Vec& q = profile_.continuation[k];
      for (size_t s = 0; s < q.size(); ++s) dot += u.g[s] * q[s];
      m[k] = dot;
    }
  }
  profile_.lambda = mixer_.next(m);
  ++t_;
  return profile_;
}

void PsiRegretMinimizer::observe(std::span<const double> loss, std::span<const double> played) {
  if (t_ == 0) throw std::runtime_error("observe called before next");
  int nt = num_triggers(*idx_, kind_);
  Vec mixer_utility(nt);
  for (int k = 0; k < nt; ++k) {
    LocalTriggerUtility u = local_trigger_utility(*idx_, kind_, k, loss, played);
    double dot = u.offset;
    const Vec& q = profile_.continuation[k];
    for (size_t s = 0; s < q.size(); ++s) dot += u.g[s] * q[s];
    mixer_utility[k] = dot;
    std::visit([&](auto& s) { s.observe(u.g); }, subs_[k]);
  }
  mixer_.observe(mixer_utility);
  prev_loss_.assign(loss.begin(), loss.end());
  prev_played_.assign(played.begin(), played.end());
}

}  // namespace efgce
