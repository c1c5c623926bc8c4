#include "efgce/regret.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace efgce {
namespace {

void check_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::runtime_error("non-finite utility");
}

// softmax of e into out, max-subtracted
void softmax(std::span<const double> e, std::span<double> out) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : e) mx = std::max(mx, v);
  double sum = 0;
  for (size_t k = 0; k < e.size(); ++k) {
    out[k] = std::exp(e[k] - mx);
    sum += out[k];
  }
  for (size_t k = 0; k < e.size(); ++k) out[k] /= sum;
}

}  // namespace

DgeWeights dge_weights(const PlayerIndex& idx) {
  DgeWeights d;
  d.gamma.assign(idx.num_infosets, 0.0);
  d.w.assign(idx.num_sequences, 0.0);
  d.w[0] = 1.0;
  for (int j = idx.num_infosets - 1; j >= 0; --j) {
    double best = 0;
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int s = idx.seq_of(j, a);
      double child_sum = 0;
      for (int c : idx.children_of_seq(s)) child_sum += d.gamma[c];
      d.w[s] = -child_sum;  // gamma[j] added below
      best = std::max(best, child_sum);
    }
    d.gamma[j] = 1.0 + best;
    for (int a = 0; a < idx.num_actions[j]; ++a) d.w[idx.seq_of(j, a)] += d.gamma[j];
  }
  return d;
}

double dge_value(const DgeWeights& dge, int seq_first, std::span<const double> x) {
  double d = 0;
  for (size_t k = 0; k < x.size(); ++k)
    if (x[k] > 0) d += dge.w[seq_first + k] * x[k] * std::log(x[k]);
  return d;
}

const Vec& OmwuSimplex::next(std::span<const double> prediction) {
  double eta = sched_.eta(++t_);
  Vec e(dim());
  for (int k = 0; k < dim(); ++k) e[k] = eta * (sum_[k] + prediction[k]);
  softmax(e, x_);
  return x_;
}

void OmwuSimplex::observe(std::span<const double> utility) {
  check_finite(utility);
  for (int k = 0; k < dim(); ++k) {
    sum_[k] += utility[k];
    last_[k] = utility[k];
  }
}

const Vec& RmPlusSimplex::next() {
  double total = 0;
  for (double r : regret_) total += r;
  if (total <= 0) {
    std::fill(x_.begin(), x_.end(), 1.0 / dim());
  } else {
    for (int k = 0; k < dim(); ++k) x_[k] = regret_[k] / total;
  }
  return x_;
}

void RmPlusSimplex::observe(std::span<const double> utility) {
  check_finite(utility);
  double played = 0;
  for (int k = 0; k < dim(); ++k) played += utility[k] * x_[k];
  for (int k = 0; k < dim(); ++k) regret_[k] = std::max(0.0, regret_[k] + utility[k] - played);
}

TreeplexScope TreeplexScope::whole(const PlayerIndex& idx) {
  TreeplexScope s;
  s.idx = &idx;
  s.root = -1;
  s.seq_first = 0;
  s.seq_count = idx.num_sequences;
  s.inf_first = 0;
  s.inf_count = idx.num_infosets;
  return s;
}

TreeplexScope TreeplexScope::subtree(const PlayerIndex& idx, int root_infoset) {
  TreeplexScope s;
  s.idx = &idx;
  s.root = root_infoset;
  s.seq_first = idx.subtree_seq_begin(root_infoset);
  s.seq_count = idx.subtree_seq_end(root_infoset) - s.seq_first;
  s.inf_first = root_infoset;
  s.inf_count = idx.subtree_end[root_infoset] - root_infoset;
  return s;
}

OftrlTreeplex::OftrlTreeplex(TreeplexScope scope, const DgeWeights& dge, StepSchedule sched,
                             bool predictive)
    : scope_(scope),
      gamma_(dge.gamma.begin() + scope.inf_first,
             dge.gamma.begin() + scope.inf_first + scope.inf_count),
      sum_(scope.seq_count, 0.0),
      last_(scope.seq_count, 0.0),
      x_(scope.seq_count, 0.0),
      locals_(scope.seq_count, 0.0),
      sched_(sched),
      predictive_(predictive) {}

const Vec& OftrlTreeplex::next() {
  const PlayerIndex& idx = *scope_.idx;
  double eta = sched_.eta(++t_);
  int jb = scope_.inf_first, je = scope_.inf_first + scope_.inf_count;
  int base = scope_.seq_first;

  // bottom-up soft values r[j] = gamma[j] * logsumexp_a((eta u + sum_child r) / gamma[j])
  Vec r(scope_.inf_count, 0.0);
  for (int j = je - 1; j >= jb; --j) {
    int na = idx.num_actions[j];
    Vec e(na);
    for (int a = 0; a < na; ++a) {
      int s = idx.seq_of(j, a);
      int k = s - base;
      double u = eta * (sum_[k] + (predictive_ ? last_[k] : 0.0));
      for (int c : idx.children_of_seq(s)) u += r[c - jb];
      e[a] = u / gamma_[j - jb];
    }
    double mx = *std::max_element(e.begin(), e.end());
    double lse = 0;
    for (int a = 0; a < na; ++a) {
      double v = std::exp(e[a] - mx);
      locals_[idx.seq_of(j, a) - base] = v;
      lse += v;
    }
    for (int a = 0; a < na; ++a) locals_[idx.seq_of(j, a) - base] /= lse;
    r[j - jb] = gamma_[j - jb] * (mx + std::log(lse));
  }

  // top-down product to sequence form
  if (scope_.root < 0) x_[0] = 1.0;
  for (int j = jb; j < je; ++j) {
    double mass = 1.0;
    if (j != scope_.root && idx.parent_seq[j] >= base) mass = x_[idx.parent_seq[j] - base];
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int k = idx.seq_of(j, a) - base;
      x_[k] = mass * locals_[k];
    }
  }
  return x_;
}

void OftrlTreeplex::observe(std::span<const double> utility) {
  if (static_cast<int>(utility.size()) != scope_.seq_count)
    throw std::runtime_error("utility dimension mismatch");
  check_finite(utility);
  for (int k = 0; k < scope_.seq_count; ++k) {
    sum_[k] += utility[k];
    last_[k] = utility[k];
  }
}

CfrTreeplex::CfrTreeplex(TreeplexScope scope, LocalAlgo algo, StepSchedule sched)
    : scope_(scope),
      algo_(algo),
      sched_(sched),
      sum_(scope.seq_count, 0.0),
      last_(scope.seq_count, 0.0),
      regret_(scope.seq_count, 0.0),
      locals_(scope.seq_count, 0.0),
      x_(scope.seq_count, 0.0),
      values_(scope.inf_count, 0.0) {}

const Vec& CfrTreeplex::next() {
  const PlayerIndex& idx = *scope_.idx;
  double eta = sched_.eta(++t_);
  int jb = scope_.inf_first, je = scope_.inf_first + scope_.inf_count;
  int base = scope_.seq_first;

  // bottom-up: new local iterates; with omwu locals the prediction is the
  // previous counterfactual loss evaluated at the fresh child iterates
  for (int j = je - 1; j >= jb; --j) {
    int na = idx.num_actions[j];
    Vec e(na), m(na, 0.0);
    for (int a = 0; a < na; ++a) {
      int s = idx.seq_of(j, a);
      int k = s - base;
      switch (algo_) {
        case LocalAlgo::omwu: {
          m[a] = last_[k];
          for (int c : idx.children_of_seq(s)) m[a] += values_[c - jb];
          e[a] = eta * (sum_[k] + m[a]);
          break;
        }
        case LocalAlgo::mwu:
          e[a] = eta * sum_[k];
          break;
        case LocalAlgo::rmplus:
          e[a] = regret_[k];
          break;
      }
    }
    std::span<double> b(locals_.data() + idx.seq_of(j, 0) - base, na);
    if (algo_ == LocalAlgo::rmplus) {
      double total = 0;
      for (double v : e) total += v;
      if (total > 0)
        for (int a = 0; a < na; ++a) b[a] = e[a] / total;
      else
        for (int a = 0; a < na; ++a) b[a] = 1.0 / na;
    } else {
      softmax(e, b);
    }
    if (algo_ == LocalAlgo::omwu) {
      double v = 0;
      for (int a = 0; a < na; ++a) v += b[a] * m[a];
      values_[j - jb] = v;
    }
  }

  if (scope_.root < 0) x_[0] = 1.0;
  for (int j = jb; j < je; ++j) {
    double mass = 1.0;
    if (j != scope_.root && idx.parent_seq[j] >= base) mass = x_[idx.parent_seq[j] - base];
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int k = idx.seq_of(j, a) - base;
      x_[k] = mass * locals_[k];
    }
  }
  return x_;
}

void CfrTreeplex::observe(std::span<const double> utility) {
  if (static_cast<int>(utility.size()) != scope_.seq_count)
    throw std::runtime_error("utility dimension mismatch");
  check_finite(utility);
  const PlayerIndex& idx = *scope_.idx;
  int jb = scope_.inf_first, je = scope_.inf_first + scope_.inf_count;
  int base = scope_.seq_first;

  // counterfactual utilities routed bottom-up through the played locals
  for (int j = je - 1; j >= jb; --j) {
    int na = idx.num_actions[j];
    double played = 0;
    Vec u(na);
    for (int a = 0; a < na; ++a) {
      int s = idx.seq_of(j, a);
      double q = utility[s - base];
      for (int c : idx.children_of_seq(s)) q += values_[c - jb];
      u[a] = q;
      played += locals_[s - base] * q;
    }
    for (int a = 0; a < na; ++a) {
      int k = idx.seq_of(j, a) - base;
      if (algo_ == LocalAlgo::rmplus)
        regret_[k] = std::max(0.0, regret_[k] + u[a] - played);
      else
        sum_[k] += u[a];
    }
    values_[j - jb] = played;
  }
  for (int k = 0; k < scope_.seq_count; ++k) last_[k] = utility[k];
}

}  // namespace efgce
