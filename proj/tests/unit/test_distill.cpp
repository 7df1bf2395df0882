#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "deskrl/distill.hpp"
#include "deskrl/rollout.hpp"
#include "tempdir.hpp"

using namespace deskrl;
namespace fs = std::filesystem;

namespace {

PolicyShape small_shape() {
  PolicyShape s;
  s.input_dim = 4;
  s.hidden = 6;
  s.heads = {3, 3, 3, 3, 3, 3};
  return s;
}

DistillRecord record(int episode, bool format_ok, double advantage, std::string intent,
                     std::vector<std::string> screen) {
  DistillRecord r;
  r.run = "run_0001";
  r.episode = episode;
  r.env = 0;
  r.step = 1;
  r.id = std::to_string(episode) + ":0:1";
  r.format_ok = format_ok;
  r.advantage = advantage;
  r.intent = std::move(intent);
  r.screen_tokens = std::move(screen);
  r.x = Vec::Zero(4);
  return r;
}

double joint_prob(const Policy& p, const DistillRecord& r) {
  return std::exp(p.log_prob(r.x, r.num_boxes, r.choice, 1.0));
}

}  // namespace

TEST_SUITE("distill") {
  TEST_CASE("intent clarity rule") {
    CHECK(intent_clarity_check("click the Firefox icon", {"firefox", "mail"}));
    CHECK_FALSE(intent_clarity_check("explore explore the the page", {"page"}));
    CHECK_FALSE(intent_clarity_check("do something", {"something"}));
    CHECK_FALSE(intent_clarity_check("open the browser", {"mail"}));
    CHECK_FALSE(intent_clarity_check("", {"mail"}));
    CHECK(intent_clarity_check("open open the mail", {"mail"}) == false);
  }

  TEST_CASE("each predicate rejects on its own") {
    const std::vector<std::string> screen{"mail"};
    FilterConfig cfg;
    CHECK(first_failure(record(10, true, 1.0, "open mail", screen), cfg) == Predicate::Episode);
    CHECK(first_failure(record(40, false, 1.0, "open mail", screen), cfg) == Predicate::Format);
    CHECK(first_failure(record(40, true, 0.0, "open mail", screen), cfg) == Predicate::Advantage);
    CHECK(first_failure(record(40, true, 1.0, "mail mail", screen), cfg) == Predicate::Intent);
    CHECK_FALSE(first_failure(record(30, true, 1.0, "open mail", screen), cfg));
    cfg.accept_list = std::set<std::string>{"31:0:1"};
    CHECK(first_failure(record(30, true, 1.0, "open mail", screen), cfg) == Predicate::AcceptList);
    CHECK_FALSE(first_failure(record(31, true, 1.0, "open mail", screen), cfg));
  }

  TEST_CASE("report accounting and monotonicity") {
    std::mt19937_64 rng(1);
    const char* intents[] = {"open mail", "click the news", "mail mail", "look around", "scroll news"};
    std::vector<DistillRecord> recs;
    for (int i = 0; i < 400; ++i) {
      recs.push_back(record(static_cast<int>(rng() % 60), rng() % 3 != 0, static_cast<double>(rng() % 5) - 2.0,
                            intents[rng() % 5], {"mail", "news"}));
    }
    FilterConfig loose;
    loose.min_episode = 0;
    loose.require_format = false;
    loose.require_positive_advantage = false;
    loose.intent_check_enabled = false;
    FilterReport rep;
    const auto all = filter_stream(recs, loose, &rep);
    CHECK(all.pairs.size() == recs.size());

    const auto full = filter_stream(recs, FilterConfig{}, &rep);
    std::size_t rejected = 0;
    for (auto r : rep.rejected) rejected += r;
    CHECK(rep.total == recs.size());
    CHECK(rep.kept == full.pairs.size());
    CHECK(rejected == rep.total - rep.kept);

    // Tightening any one predicate never adds samples.
    for (int which = 0; which < 4; ++which) {
      FilterConfig tight = loose;
      if (which == 0) tight.min_episode = 30;
      if (which == 1) tight.require_format = true;
      if (which == 2) tight.require_positive_advantage = true;
      if (which == 3) tight.intent_check_enabled = true;
      CHECK(filter_stream(recs, tight, nullptr).pairs.size() <= all.pairs.size());
      FilterConfig tighter = tight;
      tighter.min_episode = 45;
      CHECK(filter_stream(recs, tighter, nullptr).pairs.size() <= filter_stream(recs, tight, nullptr).pairs.size());
    }
  }

  TEST_CASE("accept list file") {
    TempDir tmp("accept");
    const auto path = tmp.path() / "ids.txt";
    std::ofstream(path) << "# reviewed\n31:0:1\n\n  40:2:7  \n";
    const auto ids = read_accept_list(path.string());
    CHECK(ids == std::set<std::string>{"31:0:1", "40:2:7"});
    CHECK_THROWS_AS(read_accept_list((tmp.path() / "missing").string()), Error);
  }

  TEST_CASE("fine-tuning on one repeated pair") {
    Policy p(small_shape(), 1);
    DistillSet set;
    auto r = record(40, true, 1.0, "open mail", {"mail"});
    r.x << 0.5, -0.2, 0.1, 0.9;
    r.num_boxes = 2;
    r.choice = {2, 1, 0, 2, 1, 1};
    set.pairs.assign(5, r);
    const auto losses = sft_train(p, set, SftConfig{});
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-6);
    CHECK(joint_prob(p, r) >= 0.99);
    CHECK(sft_loss(p, set, 1.0) == doctest::Approx(losses.back()));
  }

  TEST_CASE("fine-tuning on two actions converges to the empirical split") {
    Policy p(small_shape(), 2);
    DistillSet set;
    auto a = record(40, true, 1.0, "open mail", {"mail"});
    a.x << 0.3, 0.3, -0.4, 0.2;
    a.num_boxes = 3;
    a.choice = {0, 1, 1, 0, 0, 2};
    auto b = a;
    b.choice.kind = 2;
    set.pairs = {a, b, a, b};
    sft_train(p, set, SftConfig{});
    CHECK(joint_prob(p, a) == doctest::Approx(0.5).epsilon(0.04));
    CHECK(joint_prob(p, b) == doctest::Approx(0.5).epsilon(0.04));
  }

  TEST_CASE("empty distill set") {
    Policy p(small_shape(), 3);
    try {
      sft_train(p, DistillSet{}, SftConfig{});
      FAIL("expected EmptyDataset");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyDataset);
    }
  }

  TEST_CASE("trajectory logs round-trip into records") {
    TempDir tmp("distill_run");
    RunConfig cfg;
    cfg.env.num_parallel_envs = 2;
    cfg.episodes = 3;
    cfg.eval.episodes = 1;
    cfg.out_dir = tmp.str();
    const auto res = run_training(cfg);
    const auto recs = read_trajectories(res.run_dir);
    REQUIRE(recs.size() == 60);

    // Every record points at a logged sample with the same features.
    Trainer replay(cfg);
    replay.run_episode();
    const auto& buf = replay.last_buffer();
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(recs[i].id == buf.samples[i].id());
      CHECK(recs[i].x.isApprox(buf.samples[i].features(), 1e-12));
      CHECK(recs[i].choice == buf.samples[i].choice);
      CHECK(recs[i].advantage == doctest::Approx(buf.samples[i].advantage).epsilon(1e-12));
    }

    // Without stored advantages they are recomputed per episode buffer.
    const fs::path log = fs::path(res.run_dir) / "trajectories.jsonl";
    std::ifstream in(log);
    std::string out, line;
    while (std::getline(in, line)) {
      auto j = nlohmann::ordered_json::parse(line);
      j.erase("advantage");
      out += j.dump() + "\n";
    }
    in.close();
    std::ofstream(log, std::ios::trunc) << out;
    const auto recomputed = read_trajectories(res.run_dir);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(recomputed[i].advantage == doctest::Approx(recs[i].advantage).epsilon(1e-9));
    }
  }
}
