#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "deskrl/metrics.hpp"

using namespace deskrl;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec random_state(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = u(rng) < 0.3 ? u(rng) : 0.0;
  return v;
}

Trajectory random_traj(int T, int dim, std::mt19937_64& rng) {
  Trajectory t;
  for (int i = 0; i < T; ++i) {
    t.o.push_back(random_state(dim, rng));
    t.e.push_back(random_state(dim, rng));
    t.format_ok.push_back(rng() % 4 != 0);
  }
  return t;
}

double round2(double x) { return std::round(x * 100) / 100; }

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("trajectory diversity examples") {
    Trajectory same;
    same.o.assign(4, v2(1, 0));
    same.e.assign(4, v2(0, 1));
    CHECK(traj_diversity(same) == std::pair<double, double>{0.0, 0.0});

    Trajectory three;
    three.o = {v2(1, 0), v2(0, 1), v2(1, 0)};
    three.e = three.o;
    CHECK(traj_diversity(three).first == doctest::Approx(2.0 / 6.0).epsilon(1e-12));

    Trajectory two;
    two.o = {v2(1, 0), v2(0, 1)};
    two.e = two.o;
    CHECK(traj_diversity(two).first == doctest::Approx(0.5));

    Trajectory one;
    one.o = {v2(1, 0)};
    one.e = one.o;
    CHECK_THROWS_AS(traj_diversity(one), Error);
  }

  TEST_CASE("group diversity") {
    Trajectory same;
    same.o.assign(3, v2(1, 0));
    same.e.assign(3, v2(1, 0));
    CHECK(group_diversity({same, same}) == std::pair<double, double>{0.0, 0.0});

    std::mt19937_64 rng(1);
    const auto t = random_traj(7, 8, rng);
    const auto g = group_diversity({t});
    const auto d = traj_diversity(t);
    CHECK(g.first == doctest::Approx(d.first).epsilon(1e-12));
    CHECK(g.second == doctest::Approx(d.second).epsilon(1e-12));

    Trajectory short_one;
    short_one.o = {v2(1, 0)};
    short_one.e = short_one.o;
    CHECK_THROWS_AS(group_diversity({short_one, short_one}), Error);
  }

  TEST_CASE("matches the brute-force oracle") {
    std::mt19937_64 rng(2);
    std::vector<Trajectory> group;
    for (int m = 0; m < 4; ++m) group.push_back(random_traj(5, 12, rng));
    std::vector<Vec> all_o;
    for (const auto& t : group) {
      CHECK(std::abs(traj_diversity(t).first - oracle::diversity(t.o)) < 1e-9);
      CHECK(std::abs(traj_diversity(t).second - oracle::diversity(t.e)) < 1e-9);
      all_o.insert(all_o.end(), t.o.begin(), t.o.end());
    }
    CHECK(all_o.size() == 20);
    CHECK(std::abs(group_diversity(group).first - oracle::diversity(all_o)) < 1e-9);
  }

  TEST_CASE("order does not matter") {
    std::mt19937_64 rng(3);
    auto t = random_traj(12, 6, rng);
    const auto before = traj_diversity(t);
    std::shuffle(t.o.begin(), t.o.end(), rng);
    std::shuffle(t.e.begin(), t.e.end(), rng);
    const auto after = traj_diversity(t);
    CHECK(after.first == doctest::Approx(before.first).epsilon(1e-12));
    CHECK(after.second == doctest::Approx(before.second).epsilon(1e-12));
    CHECK(before.first >= 0.0);
    CHECK(before.first <= 0.5);
  }

  TEST_CASE("correct format rate") {
    CHECK(correct_format_rate(std::vector<bool>(10, true)) == 1.0);
    std::vector<bool> flags(100, false);
    std::fill(flags.begin(), flags.begin() + 62, true);
    CHECK(correct_format_rate(flags) == doctest::Approx(0.62));
    try {
      correct_format_rate({});
      FAIL("expected EmptySample");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptySample);
    }
  }

  TEST_CASE("average diversity column") {
    CHECK(avg_diversity(0.25, 0.16, 0.35, 0.25) == doctest::Approx(0.2525));
    CHECK(round2(avg_diversity(0.25, 0.16, 0.35, 0.25)) == doctest::Approx(0.25));
    CHECK(avg_diversity(0.57, 0.33, 0.68, 0.45) == doctest::Approx(0.5075));
    CHECK(round2(avg_diversity(0.57, 0.33, 0.68, 0.45)) == doctest::Approx(0.51));
    CHECK(avg_diversity(0, 0, 0, 0) == 0.0);
  }

  TEST_CASE("diversity report") {
    std::mt19937_64 rng(4);
    std::vector<Trajectory> group{random_traj(10, 8, rng), random_traj(10, 8, rng)};
    const auto r = diversity_report(group);
    const double d_vis = (traj_diversity(group[0]).first + traj_diversity(group[1]).first) / 2;
    CHECK(r.d_vis == doctest::Approx(d_vis));
    CHECK(r.D_vis == doctest::Approx(group_diversity(group).first));
    CHECK(r.avg == doctest::Approx(avg_diversity(r.d_vis, r.d_text, r.D_vis, r.D_text)));
    int ok = 0;
    for (const auto& t : group) ok += static_cast<int>(std::count(t.format_ok.begin(), t.format_ok.end(), true));
    CHECK(r.correct_format == doctest::Approx(ok / 20.0));
  }
}
