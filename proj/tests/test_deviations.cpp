#include "efgce/deviations.hpp"

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

}  // namespace

TEST_CASE("apply_deviation basics") {
  Game g = generate_benchmark("kuhn3");
  const PlayerIndex& idx = g.index(0);
  oracle::Rng rng(7);

  SUBCASE("coarse transformation replaying x's own play fixes x") {
    Vec x = oracle::random_interior_strategy(idx, rng);
    DeviationProfile phi;
    phi.kind = DeviationKind::coarse;
    phi.lambda = oracle::random_simplex(idx.num_infosets, rng);
    phi.continuation.resize(idx.num_infosets);
    for (int j = 0; j < idx.num_infosets; ++j) {
      int b = idx.subtree_seq_begin(j), e = idx.subtree_seq_end(j);
      Vec q(e - b);
      double mass = x[idx.parent_seq[j]];
      for (int s = b; s < e; ++s) q[s - b] = x[s] / mass;
      phi.continuation[j] = q;
    }
    Vec y = apply_deviation(idx, phi, x);
    for (int s = 0; s < idx.num_sequences; ++s)
      CHECK(y[s] == doctest::Approx(x[s]).epsilon(1e-12));
  }

  SUBCASE("a trigger that x never plays leaves x unchanged") {
    int trig = 3;
    int j = trigger_infoset(idx, DeviationKind::trigger, trig);
    int a = trig + 1 - idx.seq_begin[j];
    // strategy that avoids the trigger action entirely
    std::vector<Vec> b = oracle::random_behavioral(idx, rng);
    double rest = 1.0 - b[j][a];
    for (int k = 0; k < idx.num_actions[j]; ++k) b[j][k] /= rest;
    b[j][a] = 0.0;
    Vec x = behavioral_to_sequence_form(idx, b);
    REQUIRE(x[trig + 1] == 0.0);

    DeviationProfile phi;
    phi.kind = DeviationKind::trigger;
    phi.lambda.assign(idx.num_sequences - 1, 0.0);
    phi.lambda[trig] = 1.0;
    phi.continuation.resize(idx.num_sequences - 1);
    phi.continuation[trig] = oracle::random_scope_strategy(TreeplexScope::subtree(idx, j), rng);
    Vec y = apply_deviation(idx, phi, x);
    for (int s = 0; s < idx.num_sequences; ++s)
      CHECK(y[s] == doctest::Approx(x[s]).epsilon(1e-12));
  }
}

TEST_CASE("apply_deviation moves mass between actions on one infoset") {
  Game g = Game::build(one_infoset_raw(2));
  const PlayerIndex& idx = g.index(0);
  DeviationProfile phi;
  phi.kind = DeviationKind::trigger;
  phi.lambda = {1.0, 0.0};                              // trigger on (j, a0)
  phi.continuation = {Vec{0.0, 1.0}, Vec{1.0, 0.0}};    // continuation plays a1
  Vec x = {1.0, 0.5, 0.5};
  Vec y = apply_deviation(idx, phi, x);
  CHECK(y[0] == 1.0);
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(1.0));
}

TEST_CASE("deviations map the polytope into itself") {
  for (const std::string& name : {std::string("kuhn3"), std::string("sheriff")}) {
    Game g = generate_benchmark(name);
    oracle::Rng rng(11);
    for (int p = 0; p < g.num_players(); ++p) {
      const PlayerIndex& idx = g.index(p);
      for (DeviationKind kind : {DeviationKind::trigger, DeviationKind::coarse}) {
        for (int it = 0; it < 50; ++it) {
          DeviationProfile phi = oracle::random_profile(idx, kind, rng);
          Vec x = oracle::random_interior_strategy(idx, rng);
          Vec y = apply_deviation(idx, phi, x);
          CHECK(is_sequence_form_strategy(idx, y, 1e-9));
        }
      }
    }
  }
}

TEST_CASE("coarse deviation equals the all-action sum of trigger deviations") {
  // phi~_{j->q}(x) = x + sum_a (phi_{(j,a)->q}(x) - x): realized by a trigger
  // profile with unit weight on every action of j and the same continuation
  Game g = generate_benchmark("kuhn3");
  oracle::Rng rng(13);
  for (int p = 0; p < 3; ++p) {
    const PlayerIndex& idx = g.index(p);
    for (int it = 0; it < 30; ++it) {
      Vec x = oracle::random_interior_strategy(idx, rng);
      int j = std::uniform_int_distribution<int>(0, idx.num_infosets - 1)(rng);
      Vec q = oracle::random_scope_strategy(TreeplexScope::subtree(idx, j), rng);

      DeviationProfile coarse;
      coarse.kind = DeviationKind::coarse;
      coarse.lambda.assign(idx.num_infosets, 0.0);
      coarse.lambda[j] = 1.0;
      coarse.continuation.resize(idx.num_infosets);
      coarse.continuation[j] = q;

      DeviationProfile triggers;
      triggers.kind = DeviationKind::trigger;
      triggers.lambda.assign(idx.num_sequences - 1, 0.0);
      triggers.continuation.resize(idx.num_sequences - 1);
      for (int a = 0; a < idx.num_actions[j]; ++a) {
        triggers.lambda[idx.seq_of(j, a) - 1] = 1.0;
        triggers.continuation[idx.seq_of(j, a) - 1] = q;
      }

      Vec lhs = apply_deviation(idx, coarse, x);
      Vec rhs = apply_deviation(idx, triggers, x);
      for (int s = 0; s < idx.num_sequences; ++s)
        CHECK(lhs[s] == doctest::Approx(rhs[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("local trigger utility is the rank-one slice") {
  Game g = generate_benchmark("kuhn3");
  const PlayerIndex& idx = g.index(2);
  oracle::Rng rng(17);
  std::uniform_real_distribution<double> uni(-1, 1);

  SUBCASE("zero realization weight gives the zero vector") {
    Vec x(idx.num_sequences, 0.0);
    x[0] = 1.0;
    Vec l(idx.num_sequences);
    for (double& v : l) v = uni(rng);
    LocalTriggerUtility u = local_trigger_utility(idx, DeviationKind::trigger, 4, l, x);
    for (double v : u.g) CHECK(v == 0.0);
  }

  SUBCASE("unit weight passes the loss through") {
    // deterministic x that plays through trigger 0
    Vec x(idx.num_sequences, 0.0);
    x[0] = 1.0;
    x[1] = 1.0;
    Vec l(idx.num_sequences);
    for (double& v : l) v = uni(rng);
    LocalTriggerUtility u = local_trigger_utility(idx, DeviationKind::trigger, 0, l, x);
    int j = trigger_infoset(idx, DeviationKind::trigger, 0);
    int b = idx.subtree_seq_begin(j);
    for (size_t s = 0; s < u.g.size(); ++s)
      CHECK(u.g[s] == doctest::Approx(l[b + s]).epsilon(1e-15));
  }

  SUBCASE("definition unwinding on random pairs") {
    for (DeviationKind kind : {DeviationKind::trigger, DeviationKind::coarse}) {
      int nt = num_triggers(idx, kind);
      for (int it = 0; it < 20; ++it) {
        Vec x = oracle::random_interior_strategy(idx, rng);
        Vec l(idx.num_sequences);
        for (double& v : l) v = uni(rng);
        int k = std::uniform_int_distribution<int>(0, nt - 1)(rng);
        LocalTriggerUtility u = local_trigger_utility(idx, kind, k, l, x);
        for (int rep = 0; rep < 20; ++rep) {
          int j = trigger_infoset(idx, kind, k);
          Vec q = oracle::random_scope_strategy(TreeplexScope::subtree(idx, j), rng);
          double lhs = u.offset;
          for (size_t s = 0; s < q.size(); ++s) lhs += u.g[s] * q[s];
          DeviationProfile phi;
          phi.kind = kind;
          phi.lambda.assign(nt, 0.0);
          phi.lambda[k] = 1.0;
          phi.continuation.resize(nt);
          phi.continuation[k] = q;
          Vec y = apply_deviation(idx, phi, x);
          double rhs = 0;
          for (int s = 0; s < idx.num_sequences; ++s) rhs += l[s] * y[s];
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("psi minimizer initialization and invariants") {
  Game g = generate_benchmark("kuhn3");
  const PlayerIndex& idx = g.index(0);
  PolytopeMetrics met = polytope_metrics(idx);
  oracle::Rng rng(19);
  std::uniform_real_distribution<double> uni(-1, 1);

  for (DeviationKind kind : {DeviationKind::trigger, DeviationKind::coarse}) {
    PsiRegretMinimizer psi(idx, kind, ContinuationAlgo::oftrl, {0.5, 0.25});
    CHECK_THROWS_AS(psi.observe(Vec(idx.num_sequences, 0.0), Vec(idx.num_sequences, 0.0)),
                    std::runtime_error);
    const DeviationProfile& phi = psi.next();
    int nt = num_triggers(idx, kind);
    for (double v : phi.lambda) CHECK(v == doctest::Approx(1.0 / nt).epsilon(1e-12));
    DgeWeights dge = dge_weights(idx);
    for (int k = 0; k < nt; ++k) {
      TreeplexScope scope = TreeplexScope::subtree(idx, trigger_infoset(idx, kind, k));
      Vec zero(scope.seq_count, 0.0);
      CHECK(oracle::oftrl_optimality_gap(scope, dge, 0.5, zero, phi.continuation[k]) < 1e-9);
    }
    for (int t = 0; t < 20; ++t) {
      Vec l(idx.num_sequences);
      for (double& v : l) v = uni(rng);
      Vec x = oracle::random_interior_strategy(idx, rng);
      psi.observe(l, x);
      const DeviationProfile& p2 = psi.next();
      double sum = 0;
      for (double v : p2.lambda) {
        CHECK(v > 0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      for (int k = 0; k < nt; ++k) {
        int j = trigger_infoset(idx, kind, k);
        double head = 0;
        for (int a = 0; a < idx.num_actions[j]; ++a)
          head += p2.continuation[k][idx.seq_of(j, a) - idx.subtree_seq_begin(j)];
        CHECK(head == doctest::Approx(1.0).epsilon(1e-9));
      }
      // mixer utilities bounded by ||Q||_1 ||l||_inf
      for (int k = 0; k < nt; ++k) {
        LocalTriggerUtility u = local_trigger_utility(idx, kind, k, l, x);
        double dot = u.offset;
        for (size_t s = 0; s < p2.continuation[k].size(); ++s)
          dot += u.g[s] * p2.continuation[k][s];
        CHECK(std::abs(dot) <= met.q_l1 + 1e-9);
      }
    }
  }
}

TEST_CASE("psi minimizer on one infoset matches a direct simplex build") {
  Game g = Game::build(one_infoset_raw(3));
  const PlayerIndex& idx = g.index(0);
  StepSchedule sched{0.7, 0.25};
  PsiRegretMinimizer psi(idx, DeviationKind::trigger, ContinuationAlgo::oftrl, sched);

  // reference: three per-trigger OMWU instances (OFTRL on one infoset is
  // OMWU) plus the OMWU mixer with the advanced prediction
  std::vector<OmwuSimplex> subs(3, OmwuSimplex(3, sched));
  OmwuSimplex mixer(3, sched);
  Vec prev_l(4, 0.0), prev_x(4, 0.0);
  bool first = true;

  oracle::Rng rng(23);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const DeviationProfile& phi = psi.next();
    std::vector<Vec> q(3);
    for (int k = 0; k < 3; ++k) q[k] = subs[k].next();
    Vec m(3, 0.0);
    if (!first) {
      for (int k = 0; k < 3; ++k) {
        double dot = prev_l[0] * prev_x[0];
        for (int s = 1; s < 4; ++s)
          if (s != k + 1) dot += prev_l[s] * prev_x[s];
        for (int a = 0; a < 3; ++a) dot += prev_l[1 + a] * q[k][a] * prev_x[k + 1];
        m[k] = dot;
      }
    }
    Vec lam = mixer.next(m);
    for (int k = 0; k < 3; ++k) {
      CHECK(phi.lambda[k] == doctest::Approx(lam[k]).epsilon(1e-12));
      for (int a = 0; a < 3; ++a)
        CHECK(phi.continuation[k][a] == doctest::Approx(q[k][a]).epsilon(1e-12));
    }

    Vec l(4);
    for (double& v : l) v = uni(rng);
    Vec x = oracle::random_interior_strategy(idx, rng);
    psi.observe(l, x);
    Vec lam_u(3);
    for (int k = 0; k < 3; ++k) {
      Vec gk(3);
      for (int a = 0; a < 3; ++a) gk[a] = l[1 + a] * x[k + 1];
      subs[k].observe(gk);
      double dot = l[0] * x[0];
      for (int s = 1; s < 4; ++s)
        if (s != k + 1) dot += l[s] * x[s];
      for (int a = 0; a < 3; ++a) dot += l[1 + a] * q[k][a] * x[k + 1];
      lam_u[k] = dot;
    }
    mixer.observe(lam_u);
    prev_l = l;
    prev_x = x;
    first = false;
  }
}
