#include <doctest.h>

#include <cmath>

#include "bnmon/error.hpp"
#include "bnmon/random.hpp"
#include "bnmon/scoring.hpp"
#include "corpus.hpp"
#include "oracle.hpp"

using namespace bnmon;
using namespace bnmon::testing;

namespace {
constexpr int M = Observation::kMissing;
}

TEST_SUITE("scoring") {
  TEST_CASE("log score examples") {
    CHECK(log_score(fair_coin(), Observation({0})).value == doctest::Approx(-0.693147).epsilon(1e-6));
    CHECK(log_score(ab_net(), Observation({0, 0})).value == doctest::Approx(-0.798508).epsilon(1e-6));
    CHECK(log_score(ab_net(), Observation({0, 1})).value == doctest::Approx(-2.995732).epsilon(1e-6));
    const ScoredModel scored(ab_net());
    CHECK(log_score(scored, Observation({0, 1})).value == log_score(ab_net(), Observation({0, 1})).value);
  }

  TEST_CASE("expected log score examples") {
    const ScoredModel scored(ab_net());
    const double b0 = std::log(0.5) + 0.9 * std::log(0.9) + 0.1 * std::log(0.1);
    const auto v = expected_log_score(scored, Observation({M, 0}));
    CHECK(v.kind == ScoreKind::kExpected);
    CHECK(v.value == doctest::Approx(-1.018231).epsilon(1e-6));
    CHECK(std::abs(v.value - b0) < 1e-12);

    const auto joint = brute_joint(ab_net());
    CHECK(std::abs(expected_log_score(scored, Observation({0, M})).value -
                   brute_expected_log_score(ab_net(), joint, Observation({0, M}))) < 1e-12);
    CHECK(expected_log_score(scored, Observation({1, 0})).value == log_score(ab_net(), Observation({1, 0})).value);
    CHECK_THROWS_AS(expected_log_score(scored, Observation({M, M})), Error);
  }

  TEST_CASE("expected score matches enumeration over completions") {
    CounterRng rng(31);
    for (const auto& e : corpus()) {
      const ScoredModel scored(e.model);
      const auto joint = brute_joint(e.model);
      for (int trial = 0; trial < 30; ++trial) {
        auto x = Observation::empty(e.model.size());
        for (std::size_t r = 0; r < x.values.size(); ++r) {
          if (rng.uniform() < 0.5) x.values[r] = static_cast<int>(rng.next() % e.model.cardinality(r));
        }
        if (x.observed_count() == 0) x.values[0] = 1;
        CHECK(std::abs(expected_log_score(scored, x).value - brute_expected_log_score(e.model, joint, x)) <= 1e-9);
      }
      for (std::size_t k = 0; k < joint.size(); k += 5) {
        const auto x = cell_assignment(e.model, k);
        CHECK(std::abs(expected_log_score(scored, x).value - log_score(scored, x).value) <= 1e-12);
      }
    }
  }

  TEST_CASE("conditional score examples") {
    const ScoredModel scored(ab_net());
    CHECK(conditional_log_score(scored, Observation({0, 0}), 0).value == doctest::Approx(std::log(0.9)));
    CHECK(conditional_log_score(scored, Observation({0, 0}), 1).value == doctest::Approx(std::log(0.9)));
    CHECK(conditional_log_score(ab_net(), Observation({0, 0}), 1).value == doctest::Approx(-0.105361).epsilon(1e-6));

    const NetworkModel three({var("A", 2), var("C", 3)}, {{}, {}}, {{0.3, 0.7}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
    CHECK(conditional_log_score(three, Observation({1, 2}), 0).value == doctest::Approx(std::log(1.0 / 3)));
  }

  TEST_CASE("expected conditional score against enumeration") {
    CounterRng rng(91);
    for (const auto& e : corpus()) {
      const auto& m = e.model;
      const ScoredModel scored(m);
      const auto joint = brute_joint(m);
      for (int trial = 0; trial < 20; ++trial) {
        auto x = Observation::empty(m.size());
        for (std::size_t r = 0; r < x.values.size(); ++r) {
          if (rng.uniform() < 0.5) x.values[r] = static_cast<int>(rng.next() % m.cardinality(r));
        }
        const std::size_t r = rng.next() % m.size();
        x.values[r] = static_cast<int>(rng.next() % m.cardinality(r));
        // E[ln p(X_{-r} | q_r) | x] = E[ln p(X) | x] - ln P(q_r)
        auto ev = Observation::empty(m.size());
        ev.values[r] = x.values[r];
        const double pq = brute_evidence_probability(m, joint, ev);
        const double want = brute_expected_log_score(m, joint, x) - std::log(pq);
        CHECK(std::abs(expected_conditional_log_score(scored, x, r).value - want) <= 1e-9);
        if (x.complete()) {
          CHECK(std::abs(conditional_log_score(scored, x, r).value - want) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("negative entropy examples") {
    CHECK(negative_entropy(fair_coin()) == doctest::Approx(-0.693147).epsilon(1e-6));
    CHECK(negative_entropy(biased_coin()) == doctest::Approx(-0.500402).epsilon(1e-6));
    CHECK(negative_entropy(ab_net()) == doctest::Approx(-1.018230).epsilon(1e-6));
    CHECK(conditional_negative_entropy(ab_net(), 0, 0) == doctest::Approx(-0.325083).epsilon(1e-6));
    CHECK(conditional_negative_entropy(ab_net(), 1, 0) == doctest::Approx(-0.325083).epsilon(1e-6));

    // Conditioning an independent variable leaves the rest.
    const NetworkModel indep({var("A", 2), var("B", 2), var("C", 3)}, {{}, {0}, {}},
                             {{0.5, 0.5}, {0.9, 0.1, 0.1, 0.9}, {0.2, 0.3, 0.5}});
    CHECK(conditional_negative_entropy(indep, 2, 1) == doctest::Approx(negative_entropy(ab_net())).epsilon(1e-12));
  }

  TEST_CASE("chain rule identity on every corpus net") {
    for (const auto& e : corpus()) {
      CAPTURE(e.name);
      const ScoredModel scored(e.model);
      for (std::size_t r = 0; r < e.model.size(); ++r) {
        double total = 0.0;
        for (std::size_t q = 0; q < e.model.cardinality(r); ++q) {
          const double pq = scored.marginal(r, q);
          total += pq * (scored.conditional_negative_entropy(r, q) + std::log(pq));
        }
        CHECK(std::abs(total - scored.negative_entropy()) <= 1e-9);
      }
    }
  }

  TEST_CASE("cross mean") {
    CHECK(cross_mean(ab_net(), ab_net()) == doctest::Approx(negative_entropy(ab_net())).epsilon(1e-12));
    CHECK(cross_mean(two_coins(), ab_net()) == doctest::Approx(-1.897120).epsilon(1e-6));
    CHECK(cross_mean(ab_net(), ab_net(0.7)) < negative_entropy(ab_net()));

    // Structures may differ between the two models.
    CHECK(std::abs(cross_mean(xor_collider(), xor_collider_missing_arc()) -
                   brute_cross_mean(brute_joint(xor_collider()), brute_joint(xor_collider_missing_arc()))) < 1e-12);
    for (const auto& e : corpus()) {
      const auto other = reparameterize(e.model, 4242);
      CHECK(std::abs(cross_mean(e.model, other) - brute_cross_mean(brute_joint(e.model), brute_joint(other))) <= 1e-9);
      CHECK(std::abs(cross_mean(other, e.model) - brute_cross_mean(brute_joint(other), brute_joint(e.model))) <= 1e-9);
    }
  }
}
