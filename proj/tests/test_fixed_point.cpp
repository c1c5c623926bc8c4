#include "efgce/fixed_point.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "efgce/benchmarks.hpp"
#include "oracles.hpp"

using namespace efgce;

namespace {

RawGame one_infoset_raw(int actions) {
  RawGame raw;
  raw.num_players = 1;
  RawGame::Node d;
  d.kind = RawGame::Kind::decision;
  d.player = 0;
  d.infoset = "j";
  for (int a = 0; a < actions; ++a) {
    d.actions.push_back("a" + std::to_string(a));
    d.children.push_back(a + 1);
  }
  raw.nodes.push_back(d);
  for (int a = 0; a < actions; ++a) {
    RawGame::Node t;
    t.kind = RawGame::Kind::terminal;
    t.payoffs = {0.0};
    raw.nodes.push_back(t);
  }
  return raw;
}

RawGame chained_two_infosets_raw() {
  RawGame raw;
  raw.num_players = 1;
  auto leaf = [&]() {
    RawGame::Node t;
    t.kind = RawGame::Kind::terminal;
    t.payoffs = {0.0};
    raw.nodes.push_back(t);
    return static_cast<int>(raw.nodes.size()) - 1;
  };
  RawGame::Node root;
  root.kind = RawGame::Kind::decision;
  root.player = 0;
  root.infoset = "j1";
  root.actions = {"a", "b"};
  root.children = {-1, -1};
  raw.nodes.push_back(root);
  RawGame::Node inner;
  inner.kind = RawGame::Kind::decision;
  inner.player = 0;
  inner.infoset = "j2";
  inner.actions = {"c", "d"};
  inner.children = {-1, -1};
  raw.nodes.push_back(inner);
  raw.nodes[0].children = {1, leaf()};
  raw.nodes[1].children = {leaf(), leaf()};
  return raw;
}

}  // namespace

TEST_CASE("stationary distribution") {
  SUBCASE("doubly stochastic 2-state chain is uniform") {
    Vec m = {0.5, 0.5, 0.5, 0.5};
    Vec pi = stationary_distribution(m, 2);
    CHECK(pi[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("two-state balance equation") {
    // columns sum to 1: stay 0.9 in state 0, flow 0.5 both ways from 1
    Vec m = {0.9, 0.5, 0.1, 0.5};
    Vec pi = stationary_distribution(m, 2, 1e-10);
    CHECK(pi[0] == doctest::Approx(5.0 / 6).epsilon(1e-8));
    CHECK(pi[1] == doctest::Approx(1.0 / 6).epsilon(1e-8));
  }
  SUBCASE("identity chain is a contract violation") {
    Vec m = {1, 0, 0, 1};
    CHECK_THROWS_WITH_AS(stationary_distribution(m, 2), doctest::Contains("identity"),
                         std::runtime_error);
  }
  SUBCASE("a nearly reducible chain hits the iteration cap") {
    double a = 1e-9, b = 2e-9;
    Vec slow = {1 - a, b, a, 1 - b};  // stationary (2/3, 1/3), mixing ~ 1/(a+b)
    CHECK_THROWS_WITH_AS(stationary_distribution(slow, 2, 1e-12, 50),
                         doctest::Contains("convergence"), std::runtime_error);
  }
}

TEST_CASE("extend: explicit zero-reach branch") {
  Game g = Game::build(chained_two_infosets_raw());
  const PlayerIndex& idx = g.index(0);
  oracle::Rng rng(3);
  DeviationProfile phi = oracle::random_profile(idx, DeviationKind::trigger, rng);
  Vec x(idx.num_sequences, 0.0);
  x[0] = 1.0;
  x[idx.seq_of(0, 0)] = 0.0;  // no flow into j2
  x[idx.seq_of(0, 1)] = 1.0;
  extend_partial_fixed_point(idx, phi, 1, x);
  CHECK(x[idx.seq_of(1, 0)] == 0.0);
  CHECK(x[idx.seq_of(1, 1)] == 0.0);
}

TEST_CASE("extend: symmetric swap on one infoset") {
  Game g = Game::build(one_infoset_raw(2));
  const PlayerIndex& idx = g.index(0);
  DeviationProfile phi;
  phi.kind = DeviationKind::trigger;
  phi.lambda = {0.5, 0.5};
  phi.continuation = {Vec{0.0, 1.0}, Vec{1.0, 0.0}};  // each trigger swaps
  Vec x = efce_fixed_point(idx, phi);
  CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(x[2] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(deviation_residual(idx, phi, x) < 1e-6);
}

TEST_CASE("efce fixed point: identity chain is the documented error path") {
  Game g = Game::build(one_infoset_raw(2));
  const PlayerIndex& idx = g.index(0);
  DeviationProfile phi;
  phi.kind = DeviationKind::trigger;
  phi.lambda = {0.5, 0.5};
  // each continuation keeps playing the trigger action itself
  phi.continuation = {Vec{1.0, 0.0}, Vec{0.0, 1.0}};
  CHECK_THROWS_AS(efce_fixed_point(idx, phi), std::runtime_error);
}

TEST_CASE("efce fixed point matches the dense solve") {
  SUBCASE("single infoset against the stationary chain") {
    Game g = Game::build(one_infoset_raw(3));
    const PlayerIndex& idx = g.index(0);
    oracle::Rng rng(5);
    for (int it = 0; it < 25; ++it) {
      DeviationProfile phi = oracle::random_profile(idx, DeviationKind::trigger, rng);
      Vec x = efce_fixed_point(idx, phi);
      Vec ref = oracle::brute_force_fixed_point(idx, phi);
      for (int s = 0; s < idx.num_sequences; ++s)
        CHECK(x[s] == doctest::Approx(ref[s]).epsilon(1e-5));
      CHECK(deviation_residual(idx, phi, x) < idx.num_infosets * 1e-6);
    }
  }
  SUBCASE("random interior mixtures on kuhn3 players") {
    Game g = generate_benchmark("kuhn3");
    oracle::Rng rng(7);
    for (int p = 0; p < 3; ++p) {
      const PlayerIndex& idx = g.index(p);
      for (int it = 0; it < 10; ++it) {
        DeviationProfile phi = oracle::random_profile(idx, DeviationKind::trigger, rng);
        Vec x = efce_fixed_point(idx, phi);
        CHECK(is_sequence_form_strategy(idx, x, 1e-6));
        Vec ref = oracle::brute_force_fixed_point(idx, phi);
        double l1 = 0;
        for (int s = 0; s < idx.num_sequences; ++s) l1 += std::abs(x[s] - ref[s]);
        CHECK(l1 < 1e-5);
        CHECK(deviation_residual(idx, phi, x) < idx.num_infosets * 1e-6);
      }
    }
  }
}

TEST_CASE("efcce fixed point") {
  SUBCASE("all mass on a root infoset copies its continuation") {
    Game g = Game::build(chained_two_infosets_raw());
    const PlayerIndex& idx = g.index(0);
    oracle::Rng rng(9);
    DeviationProfile phi;
    phi.kind = DeviationKind::coarse;
    phi.lambda = {1.0, 0.0};
    phi.continuation.resize(2);
    phi.continuation[0] = oracle::random_scope_strategy(TreeplexScope::whole(idx), rng);
    // subtree at the root infoset covers every nonempty sequence
    phi.continuation[0].erase(phi.continuation[0].begin());
    phi.continuation[1] = oracle::random_scope_strategy(TreeplexScope::subtree(idx, 1), rng);
    Vec x = efcce_fixed_point(idx, phi);
    for (int s = 1; s < idx.num_sequences; ++s)
      CHECK(x[s] == doctest::Approx(phi.continuation[0][s - 1]).epsilon(1e-12));
  }
  SUBCASE("zero mass on a branch falls back to uniform locals") {
    Game g = Game::build(chained_two_infosets_raw());
    const PlayerIndex& idx = g.index(0);
    oracle::Rng rng(11);
    DeviationProfile phi;
    phi.kind = DeviationKind::coarse;
    phi.lambda = {0.0, 0.0};  // no trigger mass anywhere
    phi.continuation.resize(2);
    phi.continuation[0] = oracle::random_scope_strategy(TreeplexScope::subtree(idx, 0), rng);
    phi.continuation[1] = oracle::random_scope_strategy(TreeplexScope::subtree(idx, 1), rng);
    Vec x = efcce_fixed_point(idx, phi);
    CHECK(x[idx.seq_of(0, 0)] == doctest::Approx(0.5));
    CHECK(x[idx.seq_of(0, 1)] == doctest::Approx(0.5));
    CHECK(x[idx.seq_of(1, 0)] == doctest::Approx(0.25));
    CHECK(x[idx.seq_of(1, 1)] == doctest::Approx(0.25));
  }
  SUBCASE("uniform mixture over chained infosets matches the dense solve") {
    Game g = Game::build(chained_two_infosets_raw());
    const PlayerIndex& idx = g.index(0);
    oracle::Rng rng(13);
    for (int it = 0; it < 25; ++it) {
      DeviationProfile phi = oracle::random_profile(idx, DeviationKind::coarse, rng);
      phi.lambda = {0.5, 0.5};
      Vec x = efcce_fixed_point(idx, phi);
      Vec ref = oracle::brute_force_fixed_point(idx, phi);
      double l1 = 0;
      for (int s = 0; s < idx.num_sequences; ++s) l1 += std::abs(x[s] - ref[s]);
      CHECK(l1 < 1e-10);
    }
  }
  SUBCASE("exactness on kuhn3: in the polytope and fixed to 1e-10") {
    Game g = generate_benchmark("kuhn3");
    oracle::Rng rng(15);
    for (int p = 0; p < 3; ++p) {
      const PlayerIndex& idx = g.index(p);
      for (int it = 0; it < 20; ++it) {
        DeviationProfile phi = oracle::random_profile(idx, DeviationKind::coarse, rng);
        Vec x = efcce_fixed_point(idx, phi);
        CHECK(is_sequence_form_strategy(idx, x, 1e-12));
        CHECK(deviation_residual(idx, phi, x) < 1e-10);
      }
    }
  }
}

TEST_CASE("dense oracle accepts any feasible point for the identity map") {
  Game g = Game::build(one_infoset_raw(2));
  const PlayerIndex& idx = g.index(0);
  DeviationProfile phi;
  phi.kind = DeviationKind::coarse;
  phi.lambda = {0.0};
  phi.continuation = {Vec{0.5, 0.5}};
  // phi acts as the identity (no trigger mass); the stacked solve still
  // returns a feasible strategy with tiny residual
  Vec x = oracle::brute_force_fixed_point(idx, phi);
  CHECK(is_sequence_form_strategy(idx, x, 1e-8));
  CHECK(deviation_residual(idx, phi, x) < 1e-8);
}
