#include <doctest.h>

#include <set>

#include "deskrl/env.hpp"
#include "fixtures.hpp"

using namespace deskrl;

namespace {

EnvConfig cfg(bool noisy = false, std::uint64_t seed = 1) {
  EnvConfig c;
  c.noisy_tv_enabled = noisy;
  c.rng_seed = seed;
  return c;
}

int px_x(int cell) { return cell_center_px(cell, 1920, 16); }
int px_y(int cell) { return cell_center_px(cell, 1080, 9); }

std::string load_error(const std::string& text) {
  try {
    load_world(text, "w.yaml");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WorldFormat);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("env") {
  TEST_CASE("reset is the deterministic desktop") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    const Screen first = env.reset();
    CHECK(first.page_id == "desktop");
    CHECK(env.steps_taken() == 0);
    env.step(Action::pointer(ActionKind::DoubleClick, px_x(1), px_y(0)));
    CHECK(env.reset() == first);
    Environment other(fixtures::world(fixtures::kThreeIcons), cfg());
    CHECK(other.reset() == first);
  }

  TEST_CASE("noisy flag only changes noisy widget cells") {
    auto w = fixtures::world(fixtures::kNoisyDesk);
    Environment quiet(w, cfg(false));
    Environment noisy(w, cfg(true));
    const auto& a = quiet.reset();
    const auto& b = noisy.reset();
    const auto& tv = w->page("desktop").widgets[1].rect;
    int differing = 0;
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 16; ++x) {
        if (tv.contains(x, y)) {
          differing += !(a.at(x, y) == b.at(x, y));
        } else {
          CHECK(a.at(x, y) == b.at(x, y));
        }
      }
    }
    CHECK(differing > 0);
  }

  TEST_CASE("double click opens an app, single click toggles") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    env.reset();
    const auto& toggled = env.step(Action::pointer(ActionKind::Click, px_x(1), px_y(1)));
    CHECK(toggled.page_id == "desktop");
    CHECK(toggled.at(0, 0).color == 5);
    CHECK(env.step(Action::pointer(ActionKind::DoubleClick, px_x(0), px_y(0))).page_id == "app");
    CHECK(env.step(Action::key_press("Esc")).page_id == "desktop");
  }

  TEST_CASE("None leaves a deterministic screen unchanged") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    const Screen before = env.reset();
    CHECK(env.step(Action::none()) == before);
    CHECK(env.step(Action::pointer(ActionKind::Move, px_x(1), px_y(1))) == before);
  }

  TEST_CASE("step limit") {
    EnvConfig c = cfg();
    c.max_steps = 3;
    Environment env(fixtures::world(fixtures::kThreeIcons), c);
    env.reset();
    for (int i = 0; i < 3; ++i) env.step(Action::none());
    CHECK(env.steps_taken() == 3);
    CHECK_THROWS_AS(env.step(Action::none()), Error);
    try {
      env.step(Action::none());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepLimitExceeded);
    }
    env.reset();
    CHECK_NOTHROW(env.step(Action::none()));
  }

  TEST_CASE("ScrollDown moves by the stride and shifts rows") {
    auto w = fixtures::world(fixtures::kThreeIcons);
    Environment env(w, cfg());
    env.reset();
    env.step(Action::pointer(ActionKind::DoubleClick, px_x(0), px_y(0)));
    const Screen before = env.screen();
    CHECK(before.scroll_offset == 0);
    const Screen after = env.step(Action::pointer(ActionKind::ScrollDown, px_x(5), px_y(3)));
    CHECK(after.scroll_offset == 2);

    // Reference rendering of the region: row r shows line offset + r.
    const auto& feed = w->page("app").widgets[1];
    for (const Screen* s : {&before, &after}) {
      for (int row = 0; row < feed.rect.h; ++row) {
        const auto li = static_cast<std::size_t>(s->scroll_offset + row);
        const auto& cell = s->at(feed.rect.x, feed.rect.y + row);
        if (li < feed.lines.size()) {
          CHECK(cell.token == feed.lines[li].tokens[0]);
          CHECK(cell.color == feed.lines[li].color);
        } else {
          CHECK(cell.token.empty());
        }
      }
    }
    CHECK(after.at(2, 2).token == before.at(2, 4).token);

    // Clamped at lines - height = 3.
    env.step(Action::pointer(ActionKind::ScrollDown, px_x(5), px_y(3)));
    CHECK(env.screen().scroll_offset == 3);
    env.step(Action::pointer(ActionKind::ScrollUp, px_x(5), px_y(3)));
    CHECK(env.screen().scroll_offset == 1);
    env.step(Action::pointer(ActionKind::ScrollUp, px_x(5), px_y(3)));
    CHECK(env.screen().scroll_offset == 0);
  }

  TEST_CASE("scrolling outside the region does nothing") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    env.reset();
    env.step(Action::pointer(ActionKind::DoubleClick, px_x(0), px_y(0)));
    CHECK(env.step(Action::pointer(ActionKind::ScrollDown, px_x(15), px_y(8))).scroll_offset == 0);
  }

  TEST_CASE("typing replaces a text field's tokens") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    env.reset();
    env.step(Action::pointer(ActionKind::DoubleClick, px_x(0), px_y(0)));
    const auto& s = env.step(Action::typed(px_x(1), px_y(0), "Hello World! again and more"));
    CHECK(s.at(0, 0).token == "hello");
    CHECK(s.at(1, 0).token == "world");
    CHECK(s.at(3, 0).token == "and");
    CHECK(s.at(4, 0).token.empty());
  }

  TEST_CASE("ocr on fixture pages") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    const auto boxes = ocr(env.reset());
    REQUIRE(boxes.size() == 3);
    CHECK(boxes[0].tokens == std::vector<std::string>{"alpha"});
    CHECK(boxes[0].rect == CellRect{0, 0, 3, 2});
    CHECK(boxes[1].tokens == std::vector<std::string>{"gamma", "delta"});
    CHECK(boxes[2].tokens == std::vector<std::string>{"beta"});

    env.step(Action::pointer(ActionKind::DoubleClick, px_x(0), px_y(0)));
    CHECK(ocr(env.step(Action::key_press("B"))).empty());
    CHECK(env.screen().page_id == "blank");
  }

  TEST_CASE("ocr tokens equal grid tokens") {
    Environment env(default_world(), cfg(true, 3));
    env.reset();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
      const auto& s = env.step(Action::pointer(ActionKind::DoubleClick, static_cast<int>(rng() % 1920),
                                               static_cast<int>(rng() % 1080)));
      std::multiset<std::string> grid;
      for (const auto& c : s.cells) {
        if (!c.token.empty()) grid.insert(c.token);
      }
      std::multiset<std::string> boxed;
      for (const auto& b : ocr(s)) {
        for (const auto& t : b.tokens) boxed.insert(t);
        for (int y = b.rect.y; y < b.rect.y + b.rect.h; ++y) {
          for (int x = b.rect.x; x < b.rect.x + b.rect.w; ++x) {
            if (!s.at(x, y).token.empty()) {
              CHECK(std::find(b.tokens.begin(), b.tokens.end(), s.at(x, y).token) != b.tokens.end());
            }
          }
        }
      }
      CHECK(grid == boxed);
    }
  }

  TEST_CASE("noisy region differs between consecutive steps") {
    Environment env(fixtures::world(fixtures::kNoisyDesk), cfg(true, 11));
    env.reset();
    auto tokens = [](const Screen& s) {
      std::vector<std::string> t;
      for (const auto& c : s.cells) t.push_back(c.token);
      return t;
    };
    int same = 0;
    auto prev = tokens(env.screen());
    for (int i = 0; i < 1000; ++i) {
      if (env.steps_taken() == env.config().max_steps) env.reset();
      auto next = tokens(env.step(Action::none()));
      same += next == prev;
      prev = std::move(next);
    }
    CHECK(same == 0);
  }

  TEST_CASE("noise never leaks outside noisy regions") {
    auto w = fixtures::world(fixtures::kNoisyDesk);
    Environment quiet(w, cfg(false));
    Environment noisy(w, cfg(true, 99));
    quiet.reset();
    noisy.reset();
    const auto& tv = w->page("desktop").widgets[1].rect;
    const Action script[] = {Action::pointer(ActionKind::Click, px_x(1), px_y(1)), Action::none(),
                             Action::pointer(ActionKind::Click, px_x(9), px_y(3)), Action::key_press("Esc")};
    for (const auto& a : script) {
      const auto& q = quiet.step(a);
      const auto& n = noisy.step(a);
      for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 16; ++x) {
          if (!tv.contains(x, y)) CHECK(q.at(x, y) == n.at(x, y));
        }
      }
    }
  }

  TEST_CASE("box_at lookups") {
    Environment env(fixtures::world(fixtures::kThreeIcons), cfg());
    const auto& s = env.reset();
    auto box = box_at(s, px_x(1), px_y(1), 1920, 1080);
    REQUIRE(box);
    CHECK(box->tokens == std::vector<std::string>{"alpha"});
    CHECK_FALSE(box_at(s, px_x(12), px_y(7), 1920, 1080));
    // Cells are 120 px; icon a spans cells [0, 3): pixel 359 is inside, 360 is not.
    CHECK(box_at(s, 359, 10, 1920, 1080));
    CHECK_FALSE(box_at(s, 360, 10, 1920, 1080));
    CHECK(box_at(s, 600, 10, 1920, 1080)->tokens.front() == "gamma");
  }

  TEST_CASE("pixel to cell mapping") {
    CHECK(pixel_to_cell_x(0, 1920, 32) == 0);
    CHECK(pixel_to_cell_x(59, 1920, 32) == 0);
    CHECK(pixel_to_cell_x(60, 1920, 32) == 1);
    CHECK(pixel_to_cell_x(1919, 1920, 32) == 31);
    CHECK(pixel_to_cell_y(1079, 1080, 18) == 17);
    for (int c = 0; c < 32; ++c) CHECK(pixel_to_cell_x(cell_center_px(c, 1920, 32), 1920, 32) == c);
  }

  TEST_CASE("default world loads with enough pages") {
    auto w = default_world();
    CHECK(w->pages.size() >= 12);
    CHECK(w->start_page == "desktop");
    for (const auto& [page, depth] : page_depths(*w)) {
      CHECK_MESSAGE(depth >= 0, page);
      CHECK(depth <= 10);
    }
    CHECK(w->page_index("video") >= 0);
    CHECK(w->page_index("news") >= 0);
    CHECK(w->page_index("office") >= 0);
  }

  TEST_CASE("world loader diagnostics") {
    const std::string head =
        "schema_version: 1\nname: t\ngrid: {cells_x: 8, cells_y: 4, colors: 4}\nstart_page: p\npages:\n";
    CHECK(load_error(head + "  - id: p\n    background: 0\n    widgets:\n"
                            "      - {id: a, kind: button, rect: [0, 0, 2, 2], color: 1}\n"
                            "      - {id: b, kind: button, rect: [1, 1, 2, 2], color: 1}\n")
              .find("overlaps") != std::string::npos);
    CHECK(load_error(head + "  - id: p\n    background: 0\n    widgets:\n"
                            "      - {id: a, kind: button, rect: [7, 0, 2, 2], color: 1}\n")
              .find("w.yaml:9: rect of 'a' is out of bounds") != std::string::npos);
    CHECK(load_error(head + "  - id: p\n    background: 0\n  - id: q\n    background: 0\n")
              .find("unreachable") != std::string::npos);
    CHECK(load_error(head + "  - id: p\n    background: 0\n    keys: {Esc: nowhere}\n")
              .find("unknown page 'nowhere'") != std::string::npos);
    CHECK(load_error(head + "  - id: p\n    background: 0\n    widgets:\n"
                            "      - {id: tv, kind: noisy_region, rect: [0, 0, 2, 2], color: 1}\n")
              .find("noise vocabulary") != std::string::npos);
    CHECK(load_error("schema_version: 2\n").find("schema_version") != std::string::npos);
    CHECK(load_error("pages: [").find("w.yaml:") == 0);
  }

  TEST_CASE("pages deeper than max_steps are rejected") {
    std::string text = "schema_version: 1\nname: chain\ngrid: {cells_x: 8, cells_y: 4, colors: 4}\nstart_page: p0\n"
                       "pages:\n";
    for (int i = 0; i <= 4; ++i) {
      text += "  - id: p" + std::to_string(i) + "\n    background: 0\n";
      if (i < 4) text += "    keys: {Enter: p" + std::to_string(i + 1) + "}\n";
    }
    CHECK_NOTHROW(load_world(text, "chain", 4));
    CHECK_THROWS_AS(load_world(text, "chain", 3), Error);
  }
}
