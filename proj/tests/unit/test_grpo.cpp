#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "deskrl/grpo.hpp"

using namespace deskrl;

namespace {

// 20 parameters: 1 input, 1 hidden unit, 9 outputs.
PolicyShape tiny_shape() {
  PolicyShape s;
  s.input_dim = 1;
  s.hidden = 1;
  s.heads = {2, 1, 1, 2, 1, 2};
  return s;
}

std::vector<PolicySample> make_samples(const Policy& p, int n, std::mt19937_64& rng, double old_jitter) {
  std::normal_distribution<double> n01;
  std::vector<PolicySample> out;
  for (int i = 0; i < n; ++i) {
    PolicySample s;
    s.x = Vec::Constant(p.shape().input_dim, n01(rng));
    s.num_boxes = 2;
    s.action = p.sample(s.x, 2, 1.0, rng);
    const double lp = p.log_prob(s.x, 2, s.action, 1.0);
    s.old_logp = lp + old_jitter * n01(rng);
    s.ref_logp = lp + 0.3 * n01(rng);
    s.advantage = n01(rng);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_SUITE("grpo") {
  TEST_CASE("advantage examples") {
    const auto a = compute_advantages({1, 2, 3});
    CHECK(a[0] == doctest::Approx(-1.2247).epsilon(1e-4));
    CHECK(a[1] == doctest::Approx(0.0));
    CHECK(a[2] == doctest::Approx(1.2247).epsilon(1e-4));
    const auto b = compute_advantages({0, 4});
    CHECK(b[0] == doctest::Approx(-1.0));
    CHECK(b[1] == doctest::Approx(1.0));
    for (double v : compute_advantages({0.7, 0.7, 0.7, 0.7})) CHECK(v == 0.0);
    CHECK_THROWS_AS(compute_advantages({1.0}), Error);
  }

  TEST_CASE("advantages are z-scores") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 9.0);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> r(80);
      for (auto& x : r) x = u(rng);
      const auto a = compute_advantages(r);
      CHECK(std::abs(oracle::mean(a)) < 1e-6);
      CHECK(std::abs(oracle::population_std(a) - 1.0) < 1e-6);
    }
  }

  TEST_CASE("k3 estimator values") {
    CHECK(kl_k3(-1.3, -1.3) == 0.0);
    CHECK(kl_k3(0.0, std::log(2.0)) == doctest::Approx(2 - std::log(2.0) - 1).epsilon(1e-12));
    CHECK(kl_k3(0.0, std::log(2.0)) == doctest::Approx(0.3069).epsilon(1e-4));
    CHECK(kl_k3(0.0, std::log(0.5)) == doctest::Approx(0.1931).epsilon(1e-4));
  }

  TEST_CASE("clip arms") {
    CHECK(clipped_surrogate(2.0, 1.5, 0.2, 0.28) == doctest::Approx(1.28 * 1.5));
    CHECK(clipped_surrogate(0.5, -2.0, 0.2, 0.28) == doctest::Approx(0.8 * -2.0));
    CHECK(clipped_surrogate(1.1, 0.5, 0.2, 0.28) == doctest::Approx(0.55));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> rho(0.0, 3.0), adv(-3.0, 3.0);
    for (int i = 0; i < 10000; ++i) {
      const double r = rho(rng);
      const double a = adv(rng);
      const double s = clipped_surrogate(r, a, 0.2, 0.28);
      CHECK(s <= r * a + 1e-15);
      CHECK(s <= std::clamp(r, 0.8, 1.28) * a + 1e-15);
    }
  }

  TEST_CASE("objective is zero at the reference point") {
    Policy p(tiny_shape(), 3, 1.0, 1.0);
    std::mt19937_64 rng(3);
    auto samples = make_samples(p, 12, rng, 0.0);
    std::vector<double> adv;
    for (auto& s : samples) {
      s.ref_logp = s.old_logp;
      adv.push_back(s.advantage);
    }
    const auto z = compute_advantages(adv);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i].advantage = z[i];
    CHECK(std::abs(surrogate_objective(p, samples, GrpoConfig{})) < 1e-12);
  }

  TEST_CASE("surrogate gradient matches finite differences") {
    Policy p(tiny_shape(), 4, 1.0, 1.0);
    REQUIRE(p.params().size() == 20);
    std::mt19937_64 rng(4);
    const auto samples = make_samples(p, 16, rng, 0.4);
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    GrpoConfig cfg;
    Vec grad = Vec::Zero(p.params().size());
    surrogate_objective(p, samples, idx, cfg, &grad);
    const Vec numeric = oracle::numeric_gradient(
        [&](const Vec& t) {
          Policy q = p;
          q.params() = t;
          return surrogate_objective(q, samples, idx, cfg, nullptr);
        },
        p.params());
    CHECK(oracle::relative_error(grad, numeric) < 1e-4);
  }

  TEST_CASE("positive advantage raises the chosen action") {
    Policy p(tiny_shape(), 5, 1.0, 1.0);
    std::mt19937_64 rng(5);
    auto samples = make_samples(p, 1, rng, 0.0);
    samples[0].advantage = 1.0;
    samples[0].ref_logp = samples[0].old_logp;
    const double before = p.log_prob(samples[0].x, 2, samples[0].action, 1.0);
    const auto probs_before = p.head_probs(samples[0].x, 2, 1.0);
    AdamState opt;
    GrpoConfig cfg;
    cfg.lr = 1e-3;
    grpo_update(p, opt, samples, cfg, rng);
    const auto probs_after = p.head_probs(samples[0].x, 2, 1.0);
    for (int h = 0; h < kNumHeads; ++h) {
      const int c = samples[0].action.choice(h);
      CHECK(probs_after[h][c] >= probs_before[h][c] - 1e-12);
    }
    CHECK(p.log_prob(samples[0].x, 2, samples[0].action, 1.0) > before);
  }

  TEST_CASE("KL penalty keeps the policy closer to the reference") {
    Policy start(tiny_shape(), 6, 1.0, 1.0);
    std::mt19937_64 rng(6);
    auto samples = make_samples(start, 32, rng, 0.0);
    for (auto& s : samples) s.ref_logp = s.old_logp;
    double kl[2];
    for (int arm = 0; arm < 2; ++arm) {
      Policy p = start;
      AdamState opt;
      GrpoConfig cfg;
      cfg.beta = arm == 0 ? 0.0 : 0.04;
      cfg.lr = 1e-2;
      std::mt19937_64 order(7);
      UpdateStats stats;
      for (int i = 0; i < 100; ++i) stats = grpo_update(p, opt, samples, cfg, order);
      kl[arm] = stats.kl_after;
    }
    CHECK(kl[1] < kl[0]);
  }

  TEST_CASE("update accounting") {
    Policy p(tiny_shape(), 8, 1.0, 1.0);
    std::mt19937_64 rng(8);
    const auto samples = make_samples(p, 40, rng, 0.0);
    AdamState opt;
    GrpoConfig cfg;
    const auto stats = grpo_update(p, opt, samples, cfg, rng);
    CHECK(stats.steps == 3);  // ceil(40 / 16)
    CHECK(opt.t == 3);
    CHECK(p.params().allFinite());
  }
}
