#include "efgce/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace efgce {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

struct OwnHistory {
  // per player, the (infoset key, action index) pairs taken so far
  std::vector<std::vector<std::pair<int, int>>> per_player;
};

}  // namespace

// Traverses the raw tree once, checking structure and collecting, per
// player-scoped infoset, the owner's history of (infoset, action) pairs.
// The same walk drives perfect-recall validation and index construction,
// so the two can never disagree.
struct TreeWalk {
  const RawGame& raw;
  // (player, label) -> dense infoset key, in first-encounter order
  std::vector<std::map<std::string, int>> infoset_key;
  std::vector<std::vector<std::string>> key_label;            // per player
  std::vector<std::vector<std::vector<std::string>>> key_actions;
  std::vector<std::vector<std::vector<std::pair<int, int>>>> key_history;
  std::vector<int> terminal_nodes;                            // preorder
  std::vector<std::vector<std::pair<int, int>>> terminal_last;  // per terminal, per player
  Vec terminal_reach;
  RecallViolation violation;

  explicit TreeWalk(const RawGame& r)
      : raw(r),
        infoset_key(r.num_players),
        key_label(r.num_players),
        key_actions(r.num_players),
        key_history(r.num_players) {}

  void run() {
    if (raw.nodes.empty()) fail("game has no nodes");
    if (raw.num_players < 1) fail("game must declare at least one player");
    std::vector<int> seen(raw.nodes.size(), 0);
    OwnHistory hist;
    hist.per_player.resize(raw.num_players);
    visit(0, 1.0, hist, seen);
    for (size_t i = 0; i < raw.nodes.size(); ++i)
      if (!seen[i]) fail("node " + std::to_string(i) + " is unreachable from the root");
  }

  void visit(int id, double reach, OwnHistory& hist, std::vector<int>& seen) {
    if (id < 0 || id >= static_cast<int>(raw.nodes.size()))
      fail("child id " + std::to_string(id) + " out of range");
    if (seen[id]++) fail("cyclic structure: node " + std::to_string(id) + " reached twice");
    const RawGame::Node& n = raw.nodes[id];
    switch (n.kind) {
      case RawGame::Kind::terminal: {
        if (static_cast<int>(n.payoffs.size()) != raw.num_players)
          fail("leaf " + std::to_string(id) + " must list one payoff per player");
        terminal_nodes.push_back(id);
        terminal_reach.push_back(reach);
        std::vector<std::pair<int, int>> last(raw.num_players, {-1, -1});
        for (int p = 0; p < raw.num_players; ++p)
          if (!hist.per_player[p].empty()) last[p] = hist.per_player[p].back();
        terminal_last.push_back(std::move(last));
        return;
      }
      case RawGame::Kind::chance: {
        if (n.probs.size() != n.children.size() || n.children.empty())
          fail("chance node " + std::to_string(id) + " has mismatched probs/children");
        double sum = 0;
        for (double p : n.probs) {
          if (!(p > 0)) fail("chance node " + std::to_string(id) + " has a non-positive probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
          fail("chance probabilities at node " + std::to_string(id) + " sum to " +
               std::to_string(sum));
        for (size_t k = 0; k < n.children.size(); ++k)
          visit(n.children[k], reach * n.probs[k], hist, seen);
        return;
      }
      case RawGame::Kind::decision: {
        if (n.player < 0 || n.player >= raw.num_players)
          fail("node " + std::to_string(id) + " names an unknown player");
        if (n.actions.empty() || n.actions.size() != n.children.size())
          fail("node " + std::to_string(id) + " has mismatched actions/children");
        auto [it, fresh] = infoset_key[n.player].try_emplace(
            n.infoset, static_cast<int>(key_label[n.player].size()));
        int key = it->second;
        if (fresh) {
          key_label[n.player].push_back(n.infoset);
          key_actions[n.player].push_back(n.actions);
          key_history[n.player].push_back(hist.per_player[n.player]);
        } else {
          if (key_actions[n.player][key] != n.actions)
            fail("inconsistent action sets at infoset '" + n.infoset + "' of player " +
                 std::to_string(n.player));
          if (violation.ok && key_history[n.player][key] != hist.per_player[n.player]) {
            violation.ok = false;
            violation.player = n.player;
            violation.infoset = n.infoset;
            violation.detail = "nodes reach infoset '" + n.infoset +
                               "' with different own action sequences";
          }
        }
        for (size_t a = 0; a < n.children.size(); ++a) {
          hist.per_player[n.player].push_back({key, static_cast<int>(a)});
          visit(n.children[a], reach, hist, seen);
          hist.per_player[n.player].pop_back();
        }
        return;
      }
    }
    fail("node " + std::to_string(id) + " has an unknown kind");
  }
};

RecallViolation validate_perfect_recall(const RawGame& raw) {
  TreeWalk walk(raw);
  walk.run();
  return walk.violation;
}

Game Game::build(RawGame raw, bool normalize_payoffs) {
  TreeWalk walk(raw);
  walk.run();
  if (!walk.violation.ok)
    fail("perfect-recall violation at infoset '" + walk.violation.infoset + "' of player " +
         std::to_string(walk.violation.player));

  Game g;
  g.raw_ = std::move(raw);
  const RawGame& r = g.raw_;

  double max_abs = 0;
  for (int id : walk.terminal_nodes)
    for (double u : r.nodes[id].payoffs) max_abs = std::max(max_abs, std::abs(u));
  if (max_abs > 1.0 + 1e-12) {
    if (!normalize_payoffs)
      fail("payoff magnitude " + std::to_string(max_abs) +
           " outside [-1,1]; enable payoff normalization to rescale");
    g.payoff_scale_ = max_abs;
  }

  // per-player index: order infosets in DFS preorder of the infoset forest
  g.index_.resize(r.num_players);
  // final id of each (player, key) infoset, filled below
  std::vector<std::vector<int>> final_id(r.num_players);
  for (int p = 0; p < r.num_players; ++p) {
    int nj = static_cast<int>(walk.key_label[p].size());
    PlayerIndex& idx = g.index_[p];
    final_id[p].assign(nj, -1);

    // forest structure in first-encounter keys
    std::vector<int> parent_key(nj, -1), parent_act(nj, -1);
    std::vector<std::vector<std::vector<int>>> kids(nj);  // [key][action] -> child keys
    std::vector<int> roots;
    for (int k = 0; k < nj; ++k) {
      const auto& h = walk.key_history[p][k];
      kids[k].assign(walk.key_actions[p][k].size(), {});
      if (h.empty()) {
        roots.push_back(k);
      } else {
        parent_key[k] = h.back().first;
        parent_act[k] = h.back().second;
      }
    }
    for (int k = 0; k < nj; ++k)
      if (parent_key[k] >= 0) kids[parent_key[k]][parent_act[k]].push_back(k);

    idx.num_infosets = nj;
    idx.seq_begin.resize(nj);
    idx.num_actions.resize(nj);
    idx.parent_seq.resize(nj);
    idx.parent_infoset.resize(nj);
    idx.subtree_end.resize(nj);
    idx.depth.resize(nj);
    idx.infoset_label.resize(nj);

    int next_seq = 1;
    int next_id = 0;
    // preorder over the forest, roots and siblings in first-encounter order
    struct Frame { int key; };
    std::vector<Frame> stack;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.push_back({*it});
    std::vector<int> order;
    while (!stack.empty()) {
      int k = stack.back().key;
      stack.pop_back();
      int j = next_id++;
      final_id[p][k] = j;
      order.push_back(k);
      int na = static_cast<int>(walk.key_actions[p][k].size());
      idx.num_actions[j] = na;
      idx.seq_begin[j] = next_seq;
      next_seq += na;
      idx.infoset_label[j] = walk.key_label[p][k];
      if (parent_key[k] < 0) {
        idx.parent_infoset[j] = -1;
        idx.parent_seq[j] = 0;
        idx.depth[j] = 1;
      } else {
        int pj = final_id[p][parent_key[k]];
        idx.parent_infoset[j] = pj;
        idx.parent_seq[j] = idx.seq_of(pj, parent_act[k]);
        idx.depth[j] = idx.depth[pj] + 1;
      }
      for (auto ka = kids[k].rbegin(); ka != kids[k].rend(); ++ka)
        for (auto kc = ka->rbegin(); kc != ka->rend(); ++kc) stack.push_back({*kc});
    }
    idx.num_sequences = next_seq;

    // subtree_end: in preorder, e belongs to subtree(j) iff its parent does
    for (int j = nj - 1; j >= 0; --j) {
      int e = j + 1;
      while (e < nj && idx.parent_infoset[e] >= j && idx.parent_infoset[e] < e)
        e = idx.subtree_end[e];
      idx.subtree_end[j] = e;
    }

    idx.seq_infoset.assign(idx.num_sequences, -1);
    for (int j = 0; j < nj; ++j)
      for (int a = 0; a < idx.num_actions[j]; ++a) idx.seq_infoset[idx.seq_of(j, a)] = j;

    idx.seq_child_begin.assign(idx.num_sequences + 1, 0);
    for (int j = 0; j < nj; ++j) idx.seq_child_begin[idx.parent_seq[j] + 1]++;
    for (int s = 0; s < idx.num_sequences; ++s)
      idx.seq_child_begin[s + 1] += idx.seq_child_begin[s];
    idx.seq_children.assign(nj, -1);
    std::vector<int> cursor(idx.seq_child_begin.begin(), idx.seq_child_begin.end() - 1);
    for (int j = 0; j < nj; ++j) idx.seq_children[cursor[idx.parent_seq[j]]++] = j;
  }

  // terminal tables
  int nz = static_cast<int>(walk.terminal_nodes.size());
  g.chance_reach_ = walk.terminal_reach;
  g.payoffs_.resize(static_cast<size_t>(nz) * r.num_players);
  g.terminal_seq_.resize(static_cast<size_t>(nz) * r.num_players);
  for (int z = 0; z < nz; ++z) {
    RawGame::Node& n = g.raw_.nodes[walk.terminal_nodes[z]];
    for (int p = 0; p < r.num_players; ++p) {
      n.payoffs[p] /= g.payoff_scale_;  // raw() always reflects the built game
      g.payoffs_[static_cast<size_t>(z) * r.num_players + p] = n.payoffs[p];
      auto [key, act] = walk.terminal_last[z][p];
      int s = 0;
      if (key >= 0) s = g.index_[p].seq_of(final_id[p][key], act);
      g.terminal_seq_[static_cast<size_t>(z) * r.num_players + p] = s;
    }
  }
  return g;
}

int Game::total_infosets() const {
  int n = 0;
  for (const auto& idx : index_) n += idx.num_infosets;
  return n;
}

int Game::total_sequences() const {
  int n = 0;
  for (const auto& idx : index_) n += idx.num_sequences;
  return n;
}

Vec behavioral_to_sequence_form(const PlayerIndex& idx, const std::vector<Vec>& behavioral) {
  if (static_cast<int>(behavioral.size()) != idx.num_infosets)
    fail("behavioral strategy must cover every infoset");
  Vec x(idx.num_sequences, 0.0);
  x[0] = 1.0;
  for (int j = 0; j < idx.num_infosets; ++j) {
    const Vec& b = behavioral[j];
    if (static_cast<int>(b.size()) != idx.num_actions[j])
      fail("behavioral distribution size mismatch at infoset " + std::to_string(j));
    double sum = 0;
    for (double v : b) {
      if (v < -1e-12) fail("behavioral distribution has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("behavioral distribution does not sum to 1");
    for (int a = 0; a < idx.num_actions[j]; ++a) x[idx.seq_of(j, a)] = x[idx.parent_seq[j]] * b[a];
  }
  return x;
}

bool is_sequence_form_strategy(const PlayerIndex& idx, std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != idx.num_sequences) return false;
  if (std::abs(x[0] - 1.0) > tol) return false;
  for (double v : x)
    if (v < -tol || !std::isfinite(v)) return false;
  for (int j = 0; j < idx.num_infosets; ++j) {
    double sum = 0;
    for (int a = 0; a < idx.num_actions[j]; ++a) sum += x[idx.seq_of(j, a)];
    if (std::abs(sum - x[idx.parent_seq[j]]) > tol) return false;
  }
  return true;
}

Vec expected_utilities(const Game& g, const std::vector<Vec>& profile) {
  int n = g.num_players();
  if (static_cast<int>(profile.size()) != n) fail("profile must contain one strategy per player");
  for (int p = 0; p < n; ++p)
    if (static_cast<int>(profile[p].size()) != g.index(p).num_sequences)
      fail("strategy dimension mismatch for player " + std::to_string(p));
  Vec u(n, 0.0);
  for (int z = 0; z < g.num_terminals(); ++z) {
    double w = g.chance_reach(z);
    for (int p = 0; p < n; ++p) w *= profile[p][g.terminal_seq(z, p)];
    if (w == 0) continue;
    for (int p = 0; p < n; ++p) u[p] += w * g.payoff(z, p);
  }
  return u;
}

Vec counterfactual_utility(const Game& g, int player, const std::vector<Vec>& profile) {
  int n = g.num_players();
  for (int p = 0; p < n; ++p)
    if (p != player && static_cast<int>(profile[p].size()) != g.index(p).num_sequences)
      fail("strategy dimension mismatch for player " + std::to_string(p));
  Vec cf(g.index(player).num_sequences, 0.0);
  for (int z = 0; z < g.num_terminals(); ++z) {
    double w = g.chance_reach(z) * g.payoff(z, player);
    if (w == 0) continue;
    for (int p = 0; p < n; ++p)
      if (p != player) w *= profile[p][g.terminal_seq(z, p)];
    cf[g.terminal_seq(z, player)] += w;
  }
  return cf;
}

BestResponse best_response(const PlayerIndex& idx, int root_infoset, std::span<const double> v) {
  if (root_infoset < 0 || root_infoset >= idx.num_infosets)
    fail("best_response: infoset out of range");
  int base = idx.subtree_seq_begin(root_infoset);
  int last = idx.subtree_seq_end(root_infoset);
  if (static_cast<int>(v.size()) != last - base)
    fail("best_response: utility vector does not span the subtree");

  int jb = root_infoset, je = idx.subtree_end[root_infoset];
  std::vector<double> value(je - jb, 0.0);
  std::vector<int> choice(je - jb, 0);
  for (int j = je - 1; j >= jb; --j) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      int s = idx.seq_of(j, a);
      double q = v[s - base];
      for (int c : idx.children_of_seq(s)) q += value[c - jb];
      if (q > best) { best = q; arg = a; }
    }
    value[j - jb] = best;
    choice[j - jb] = arg;
  }

  BestResponse br;
  br.value = value[0];
  br.strategy.assign(last - base, 0.0);
  std::vector<int> stack = {root_infoset};
  while (!stack.empty()) {
    int j = stack.back();
    stack.pop_back();
    int s = idx.seq_of(j, choice[j - jb]);
    br.strategy[s - base] = 1.0;
    for (int c : idx.children_of_seq(s)) stack.push_back(c);
  }
  return br;
}

PolytopeMetrics polytope_metrics(const PlayerIndex& idx) {
  PolytopeMetrics m;
  std::vector<double> mass(idx.num_infosets, 0.0);
  for (int j = idx.num_infosets - 1; j >= 0; --j) {
    double best = 0;
    for (int a = 0; a < idx.num_actions[j]; ++a) {
      double s = 0;
      for (int c : idx.children_of_seq(idx.seq_of(j, a))) s += mass[c];
      best = std::max(best, s);
    }
    mass[j] = 1.0 + best;
    m.depth = std::max(m.depth, idx.depth[j]);
    m.max_branching = std::max(m.max_branching, idx.num_actions[j]);
  }
  m.q_l1 = 1.0;
  for (int c : idx.children_of_seq(0)) m.q_l1 += mass[c];
  m.entropy_range =
      m.max_branching > 0 ? m.q_l1 * m.q_l1 * std::log(static_cast<double>(m.max_branching)) : 0.0;
  return m;
}

}  // namespace efgce
