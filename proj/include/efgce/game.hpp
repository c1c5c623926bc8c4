#pragma once

#include <span>
#include <string>
#include <vector>

namespace efgce {

using Vec = std::vector<double>;

// Unprocessed game description: a rooted tree of decision, chance and
// terminal nodes. Node 0 is the root. Infoset labels are scoped per player.
struct RawGame {
  enum class Kind { decision, chance, terminal };
  struct Node {
    Kind kind = Kind::terminal;
    int player = -1;                   // decision nodes
    std::string infoset;               // decision nodes
    std::vector<std::string> actions;  // decision nodes
    Vec probs;                         // chance nodes
    std::vector<int> children;         // decision/chance, parallel to actions/probs
    Vec payoffs;                       // terminal nodes, one entry per player
  };
  int num_players = 0;
  std::vector<Node> nodes;
};

// Sequence-form indexing for one player.
//
// Infosets are numbered in depth-first preorder of the infoset forest, so
// the infosets of the subtree rooted at j occupy [j, subtree_end[j]).
// Sequence 0 is the empty sequence; the sequences of infoset j occupy
// [seq_begin[j], seq_begin[j] + num_actions[j]), and the sequences of the
// whole subtree rooted at j are contiguous as well.
struct PlayerIndex {
  int num_infosets = 0;
  int num_sequences = 1;

  std::vector<int> seq_begin;       // infoset -> first sequence id
  std::vector<int> num_actions;     // infoset -> |A_j|
  std::vector<int> parent_seq;      // infoset -> parent sequence (0 = empty)
  std::vector<int> parent_infoset;  // infoset -> parent infoset, -1 at roots
  std::vector<int> subtree_end;     // infoset -> one past last infoset of subtree
  std::vector<int> seq_infoset;     // sequence -> infoset (-1 for the empty sequence)
  std::vector<int> depth;           // infoset -> own infosets on root chain (>= 1)
  std::vector<std::string> infoset_label;

  // child infosets hanging under each sequence
  std::vector<int> seq_child_begin;  // sequence -> offset into seq_children
  std::vector<int> seq_children;

  int seq_of(int infoset, int action) const { return seq_begin[infoset] + action; }
  int seq_end(int infoset) const { return seq_begin[infoset] + num_actions[infoset]; }
  // contiguous sequence range [first, last) covering the subtree rooted at j
  int subtree_seq_begin(int j) const { return seq_begin[j]; }
  int subtree_seq_end(int j) const {
    int e = subtree_end[j];
    return e < num_infosets ? seq_begin[e] : num_sequences;
  }
  std::span<const int> children_of_seq(int seq) const {
    return {seq_children.data() + seq_child_begin[seq],
            seq_children.data() + seq_child_begin[seq + 1]};
  }
};

struct PolytopeMetrics {
  int depth = 0;            // max own infosets on any root-to-leaf chain
  double q_l1 = 1.0;        // max_{q in Q} ||q||_1 (includes the empty sequence)
  int max_branching = 0;    // max_j |A_j|
  double entropy_range = 0; // ||Q||_1^2 * max_j log|A_j|
};

struct RecallViolation {
  bool ok = true;
  int player = -1;
  std::string infoset;
  std::string detail;
};

// Immutable game: raw tree plus per-player sequence-form indices and flat
// terminal tables. Safe to share across threads once built.
class Game {
 public:
  // Validates the raw description and builds all indices. Throws
  // std::runtime_error with a descriptive message on any violation.
  // With normalize_payoffs, out-of-range payoffs are rescaled by the same
  // positive constant for every player instead of rejected.
  static Game build(RawGame raw, bool normalize_payoffs = false);

  int num_players() const { return raw_.num_players; }
  const RawGame& raw() const { return raw_; }
  const PlayerIndex& index(int player) const { return index_[player]; }

  int num_terminals() const { return static_cast<int>(chance_reach_.size()); }
  double chance_reach(int z) const { return chance_reach_[z]; }
  double payoff(int z, int player) const { return payoffs_[z * raw_.num_players + player]; }
  // last sequence of `player` on the path to terminal z
  int terminal_seq(int z, int player) const { return terminal_seq_[z * raw_.num_players + player]; }

  int total_infosets() const;
  int total_sequences() const;  // counts one empty sequence per player
  double payoff_scale() const { return payoff_scale_; }

 private:
  RawGame raw_;
  std::vector<PlayerIndex> index_;
  Vec chance_reach_;
  Vec payoffs_;                  // terminal-major, then player
  std::vector<int> terminal_seq_;
  double payoff_scale_ = 1.0;
};

RecallViolation validate_perfect_recall(const RawGame& raw);
inline RecallViolation validate_perfect_recall(const Game& g) {
  return validate_perfect_recall(g.raw());
}

// q[(j,a)] = q[parent_seq(j)] * behavioral[j][a]; behavioral[j] must be a
// distribution over A_j.
Vec behavioral_to_sequence_form(const PlayerIndex& idx, const std::vector<Vec>& behavioral);

// Checks x in Q_i up to `tol` flow-conservation slack.
bool is_sequence_form_strategy(const PlayerIndex& idx, std::span<const double> x,
                               double tol = 1e-9);

// u_i = sum_z p_c(z) u_i(z) prod_k q_k[seq_{k,z}]
Vec expected_utilities(const Game& g, const std::vector<Vec>& profile);

// cf[s] = sum_{z: seq_{i,z}=s} p_c(z) u_i(z) prod_{k != i} q_k[seq_{k,z}]
Vec counterfactual_utility(const Game& g, int player, const std::vector<Vec>& profile);

struct BestResponse {
  double value = 0;
  Vec strategy;  // deterministic, over the subtree sequence range
};

// max_{pi in Pi_j} <v, pi> by backward induction; ties resolve to the lowest
// action index. `v` spans the subtree sequence range of root_infoset.
BestResponse best_response(const PlayerIndex& idx, int root_infoset, std::span<const double> v);

PolytopeMetrics polytope_metrics(const PlayerIndex& idx);

}  // namespace efgce
