#include "efgce/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "efgce/game_io.hpp"

namespace efgce {
namespace {

int add_node(RawGame& raw, RawGame::Node n) {
  raw.nodes.push_back(std::move(n));
  return static_cast<int>(raw.nodes.size()) - 1;
}

int add_leaf(RawGame& raw, Vec payoffs) {
  RawGame::Node n;
  n.kind = RawGame::Kind::terminal;
  n.payoffs = std::move(payoffs);
  return add_node(raw, std::move(n));
}

int add_decision(RawGame& raw, int player, std::string infoset,
                 std::vector<std::string> actions) {
  RawGame::Node n;
  n.kind = RawGame::Kind::decision;
  n.player = player;
  n.infoset = std::move(infoset);
  n.actions = std::move(actions);
  n.children.assign(n.actions.size(), -1);
  return add_node(raw, std::move(n));
}

std::vector<std::array<int, 3>> three_perms() {
  std::vector<std::array<int, 3>> out;
  std::array<int, 3> v = {0, 1, 2};
  std::sort(v.begin(), v.end());
  do out.push_back(v);
  while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Kuhn poker, three players. Deck {0,1,2}; one card each; one bet per hand.
// Betting: players 0,1,2 check or bet in order; after a bet by player i the
// remaining players respond fold/call in cyclic order i+1, i+2.
RawGame kuhn3_raw() {
  RawGame raw;
  raw.num_players = 3;
  auto perms = three_perms();

  // next actor, or -1 when the hand is over; history uses k/b/f/c
  auto next_actor = [](const std::string& h) -> int {
    size_t bet = h.find('b');
    if (bet == std::string::npos) return h.size() < 3 ? static_cast<int>(h.size()) : -1;
    size_t responses = h.size() - bet - 1;
    if (responses >= 2) return -1;
    return static_cast<int>((bet + 1 + responses) % 3);
  };

  std::function<int(const std::array<int, 3>&, const std::string&)> grow =
      [&](const std::array<int, 3>& deal, const std::string& h) -> int {
    int actor = next_actor(h);
    if (actor < 0) {
      Vec contrib = {1, 1, 1};
      std::vector<bool> in = {true, true, true};
      size_t bet = h.find('b');
      if (bet != std::string::npos) {
        int bettor = static_cast<int>(bet);
        contrib[bettor] += 1;
        in = {false, false, false};
        in[bettor] = true;
        for (size_t k = bet + 1; k < h.size(); ++k) {
          int resp = static_cast<int>((bet + 1 + (k - bet - 1)) % 3);
          if (h[k] == 'c') {
            contrib[resp] += 1;
            in[resp] = true;
          }
        }
      }
      double pot = contrib[0] + contrib[1] + contrib[2];
      int winner = -1;
      for (int p = 0; p < 3; ++p)
        if (in[p] && (winner < 0 || deal[p] > deal[winner])) winner = p;
      Vec u(3);
      for (int p = 0; p < 3; ++p) u[p] = (p == winner ? pot : 0.0) - contrib[p];
      return add_leaf(raw, u);
    }
    bool facing_bet = h.find('b') != std::string::npos;
    std::vector<std::string> actions =
        facing_bet ? std::vector<std::string>{"f", "c"} : std::vector<std::string>{"k", "b"};
    int id = add_decision(raw, actor, std::to_string(deal[actor]) + "|" + h, actions);
    for (size_t a = 0; a < actions.size(); ++a)
      raw.nodes[id].children[a] = grow(deal, h + actions[a]);
    return id;
  };

  RawGame::Node root;
  root.kind = RawGame::Kind::chance;
  int root_id = add_node(raw, std::move(root));
  for (const auto& deal : perms) {
    raw.nodes[root_id].probs.push_back(1.0 / 6.0);
    int child = grow(deal, "");
    raw.nodes[root_id].children.push_back(child);
  }
  return raw;
}

// ---------------------------------------------------------------------------
// Sheriff. Player 0 smuggles n in {0..3} items worth 1 each, then 2 rounds of
// bargaining: player 0 proposes a bribe 0..3, player 1 answers accept/inspect.
// Only the final answer binds.
RawGame sheriff_raw() {
  RawGame raw;
  raw.num_players = 2;
  const int kRounds = 2;
  const std::vector<std::string> bribes = {"0", "1", "2", "3"};
  const std::vector<std::string> replies = {"a", "i"};

  // h: public bargaining transcript like "b2i b0a"
  std::function<int(int, const std::string&, int)> round =
      [&](int n, const std::string& h, int r) -> int {
    int bribe_node = add_decision(raw, 0, "n" + std::to_string(n) + "|" + h, bribes);
    for (int b = 0; b <= 3; ++b) {
      std::string hb = h + "b" + bribes[b];
      int reply_node = add_decision(raw, 1, hb, replies);
      raw.nodes[bribe_node].children[b] = reply_node;
      for (int a = 0; a < 2; ++a) {
        std::string hr = hb + replies[a];
        if (r + 1 < kRounds) {
          raw.nodes[reply_node].children[a] = round(n, hr, r + 1);
        } else if (a == 0) {  // accept: bribe b is paid
          raw.nodes[reply_node].children[a] = add_leaf(raw, {double(n - b), double(b)});
        } else {  // inspect
          Vec u = n == 0 ? Vec{3.0, -3.0} : Vec{-2.0 * n, 2.0 * n};
          raw.nodes[reply_node].children[a] = add_leaf(raw, u);
        }
      }
    }
    return bribe_node;
  };

  int root = add_decision(raw, 0, "load", {"n0", "n1", "n2", "n3"});
  for (int n = 0; n <= 3; ++n) raw.nodes[root].children[n] = round(n, "", 0);
  // root must be node 0: it is, decisions are added before their subtrees
  return raw;
}

// ---------------------------------------------------------------------------
// Liar's dice, three players, one 3-face die each. Bids are (count, face)
// pairs ordered lexicographically; "liar" challenges the previous bid.
RawGame liars_dice3_raw() {
  RawGame raw;
  raw.num_players = 3;
  const int kBids = 9;  // bid k: count k/3+1 of face k%3+1

  std::function<int(const std::array<int, 3>&, const std::vector<int>&)> grow =
      [&](const std::array<int, 3>& dice, const std::vector<int>& bids) -> int {
    int turn = static_cast<int>(bids.size()) % 3;
    int last = bids.empty() ? -1 : bids.back();
    std::vector<std::string> actions;
    for (int b = last + 1; b < kBids; ++b) actions.push_back("b" + std::to_string(b));
    if (!bids.empty()) actions.push_back("liar");
    std::string hist;
    for (int b : bids) hist += "-" + std::to_string(b);
    int id = add_decision(raw, turn, "d" + std::to_string(dice[turn]) + "|" + hist, actions);
    for (size_t a = 0; a < actions.size(); ++a) {
      if (actions[a] == "liar") {
        int bidder = (turn + 2) % 3;
        int count = last / 3 + 1, face = last % 3;
        int shown = (dice[0] == face) + (dice[1] == face) + (dice[2] == face);
        Vec u(3, 0.0);
        u[bidder] = shown >= count ? 1.0 : -1.0;
        u[turn] = -u[bidder];
        raw.nodes[id].children[a] = add_leaf(raw, u);
      } else {
        std::vector<int> nb = bids;
        nb.push_back(last + 1 + static_cast<int>(a));
        raw.nodes[id].children[a] = grow(dice, nb);
      }
    }
    return id;
  };

  // one chance node per roll
  std::function<int(std::array<int, 3>&, int)> roll = [&](std::array<int, 3>& dice,
                                                          int p) -> int {
    if (p == 3) return grow(dice, {});
    RawGame::Node c;
    c.kind = RawGame::Kind::chance;
    int id = add_node(raw, std::move(c));
    for (int f = 0; f < 3; ++f) {
      dice[p] = f;
      raw.nodes[id].probs.push_back(1.0 / 3.0);
      int child = roll(dice, p + 1);
      raw.nodes[id].children.push_back(child);
    }
    return id;
  };

  std::array<int, 3> dice{};
  roll(dice, 0);
  return raw;
}

// ---------------------------------------------------------------------------
// Goofspiel, three players, rank 3, limited information: bids stay hidden;
// after each turn every player observes only their own win/loss/tie outcome
// (W: won the prize alone, T: tied at the top and the prize was discarded,
// L: otherwise). The prize order is a uniformly shuffled stack.
RawGame goofspiel3_raw() {
  RawGame raw;
  raw.num_players = 3;
  const int kRank = 3;
  auto perms = three_perms();  // prize values perm[t]+1

  struct Turn {
    std::array<int, 3> bids{};
  };

  auto outcome_char = [](int viewer, const std::array<int, 3>& bids) -> char {
    int mx = std::max({bids[0], bids[1], bids[2]});
    int tops = (bids[0] == mx) + (bids[1] == mx) + (bids[2] == mx);
    if (bids[viewer] != mx) return 'L';
    return tops == 1 ? 'W' : 'T';
  };

  // state: prize perm, per-player bids so far, bids of the current turn
  std::function<int(const std::array<int, 3>&, std::vector<Turn>&, int, std::array<int, 3>&)>
      grow = [&](const std::array<int, 3>& prize, std::vector<Turn>& done, int seat,
                 std::array<int, 3>& cur) -> int {
    int t = static_cast<int>(done.size());
    if (seat == 3) {  // turn complete
      done.push_back({cur});
      int id;
      if (t + 1 == kRank) {
        Vec score(3, 0.0);
        for (int u = 0; u < kRank; ++u) {
          const auto& b = done[u].bids;
          int mx = std::max({b[0], b[1], b[2]});
          int tops = (b[0] == mx) + (b[1] == mx) + (b[2] == mx);
          if (tops == 1)
            for (int p = 0; p < 3; ++p)
              if (b[p] == mx) score[p] += prize[u] + 1;
        }
        id = add_leaf(raw, score);
      } else {
        std::array<int, 3> next{};
        id = grow(prize, done, 0, next);
      }
      done.pop_back();
      return id;
    }
    // label: prizes seen | own bids | own outcomes
    std::string label = "p";
    for (int u = 0; u <= t; ++u) label += std::to_string(prize[u] + 1);
    label += "|";
    for (const Turn& turn : done) label += std::to_string(turn.bids[seat]);
    label += "|";
    for (const Turn& turn : done) label += outcome_char(seat, turn.bids);

    std::vector<int> hand;
    for (int c = 1; c <= kRank; ++c) {
      bool used = false;
      for (const Turn& turn : done) used |= turn.bids[seat] == c;
      if (!used) hand.push_back(c);
    }
    std::vector<std::string> actions;
    for (int c : hand) actions.push_back(std::to_string(c));
    int id = add_decision(raw, seat, label, actions);
    for (size_t a = 0; a < hand.size(); ++a) {
      cur[seat] = hand[a];
      raw.nodes[id].children[a] = grow(prize, done, seat + 1, cur);
    }
    return id;
  };

  RawGame::Node root;
  root.kind = RawGame::Kind::chance;
  int root_id = add_node(raw, std::move(root));
  for (const auto& prize : perms) {
    raw.nodes[root_id].probs.push_back(1.0 / 6.0);
    std::vector<Turn> done;
    std::array<int, 3> cur{};
    int child = grow(prize, done, 0, cur);
    raw.nodes[root_id].children.push_back(child);
  }
  return raw;
}

Game generate_benchmark(const std::string& name) {
  if (name == "kuhn3") return Game::build(kuhn3_raw(), true);
  if (name == "sheriff") return Game::build(sheriff_raw(), true);
  if (name == "liars_dice3") return Game::build(liars_dice3_raw(), true);
  if (name == "goofspiel3") return Game::build(goofspiel3_raw(), true);
  if (name.rfind("file:", 0) == 0) return Game::build(load_game_file(name.substr(5)), true);
  throw std::runtime_error("unknown game '" + name +
                           "' (expected kuhn3|sheriff|liars_dice3|goofspiel3|file:<path>)");
}

std::vector<std::string> benchmark_names() {
  return {"kuhn3", "sheriff", "liars_dice3", "goofspiel3"};
}

}  // namespace efgce
