#include <doctest.h>

#include <random>

#include "deskrl/action_grammar.hpp"

using namespace deskrl;

namespace {

Action parsed(std::string_view raw) {
  auto r = parse_action(raw);
  REQUIRE_MESSAGE(std::holds_alternative<Action>(r), raw);
  return std::get<Action>(r);
}

FormatVerdict failed(std::string_view raw) {
  auto r = parse_action(raw);
  REQUIRE_MESSAGE(std::holds_alternative<FormatVerdict>(r), raw);
  return std::get<FormatVerdict>(r);
}

}  // namespace

TEST_SUITE("action_grammar") {
  TEST_CASE("reference table actions parse") {
    CHECK(parsed("Move(960, 540)") == Action::pointer(ActionKind::Move, 960, 540));
    CHECK(parsed("Key(\"Shift+K\")") == Action::key_press("Shift+K"));
    CHECK(parsed("Text(960, 540, \"Hello World!\")") == Action::typed(960, 540, "Hello World!"));
    CHECK(parsed("None()") == Action::none());
  }

  TEST_CASE("whitespace and escapes") {
    CHECK(parsed("  Click( 3 ,4 )\n") == Action::pointer(ActionKind::Click, 3, 4));
    CHECK(parsed("Text(1, 2, \"say \\\"hi\\\"\")").text == "say \"hi\"");
    CHECK(parsed("Text(1, 2, \"a\\\\b\")").text == "a\\b");
  }

  TEST_CASE("failures by class") {
    CHECK(failed("Frobnicate(1,2)").reason == FormatError::UnknownFunction);
    CHECK(failed("click(1,2)").reason == FormatError::UnknownFunction);
    CHECK(failed("Click(1)").reason == FormatError::BadArity);
    CHECK(failed("Click(\"a\", 2)").reason == FormatError::BadArity);
    CHECK(failed("Key(3)").reason == FormatError::BadArity);
    CHECK(failed("None(1)").reason == FormatError::BadArity);
    CHECK(failed("Click(1, 2").reason == FormatError::ParseFail);
    CHECK(failed("Click(-1, 2)").reason == FormatError::ParseFail);
    CHECK(failed("Click(1, 2) extra").reason == FormatError::ParseFail);
    CHECK(failed("Text(1, 2, \"open)").reason == FormatError::ParseFail);
    CHECK(failed("Click(99999999999, 2)").reason == FormatError::ParseFail);
    CHECK(failed("").reason == FormatError::ParseFail);
  }

  TEST_CASE("validate ranges and keys") {
    CHECK(validate(parsed("Click(2000, 540)"), 1920, 1080).reason == FormatError::CoordOutOfRange);
    CHECK(validate(parsed("Click(100, 1080)"), 1920, 1080).reason == FormatError::CoordOutOfRange);
    CHECK(validate(parsed("Click(0, 0)"), 1920, 1080).ok());
    CHECK(validate(parsed("Click(1919, 1079)"), 1920, 1080).ok());
    CHECK(validate(parsed("Key(\"Shift+K\")"), 1920, 1080).ok());
    CHECK(validate(parsed("Key(\"Space\")"), 1920, 1080).ok());
    CHECK(validate(parsed("Key(\"Ctrl+Alt+Left\")"), 1920, 1080).ok());
    CHECK(validate(parsed("Key(\"Win+R\")"), 1920, 1080).reason == FormatError::BadKeyName);
    CHECK(validate(parsed("Key(\"Shift+\")"), 1920, 1080).reason == FormatError::BadKeyName);
    CHECK(validate(parsed("Key(\"\")"), 1920, 1080).reason == FormatError::BadKeyName);
    CHECK(validate(parsed("Text(5000, 1, \"x\")"), 1920, 1080).reason == FormatError::CoordOutOfRange);
  }

  TEST_CASE("render canonical form") {
    CHECK(render(Action::pointer(ActionKind::Click, 960, 540)) == "Click(960, 540)");
    CHECK(render(Action::none()) == "None()");
    CHECK(render(Action::key_press("Shift+K")) == "Key(\"Shift+K\")");
    CHECK(render(Action::typed(1, 2, "a\"b")) == "Text(1, 2, \"a\\\"b\")");
  }

  TEST_CASE("fuzzed actions round-trip") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "abcXYZ019 !\"\\+-_()";
    for (int i = 0; i < 5000; ++i) {
      const auto kind = static_cast<ActionKind>(rng() % kNumActionKinds);
      Action a;
      std::string s;
      for (int k = 0, n = static_cast<int>(rng() % 12); k < n; ++k) s.push_back(alphabet[rng() % alphabet.size()]);
      const int x = static_cast<int>(rng() % 100000);
      const int y = static_cast<int>(rng() % 100000);
      if (kind == ActionKind::Key) a = Action::key_press(s);
      else if (kind == ActionKind::Text) a = Action::typed(x, y, s);
      else if (kind == ActionKind::None) a = Action::none();
      else a = Action::pointer(kind, x, y);
      CHECK(parsed(render(a)) == a);
    }
  }

  TEST_CASE("agent reply envelope") {
    auto ok = parse_agent_reply(R"j({"intent":"open browser","action":"DoubleClick(67, 44)"})j");
    REQUIRE(std::holds_alternative<AgentReply>(ok));
    CHECK(std::get<AgentReply>(ok).intent == "open browser");
    CHECK(std::get<AgentReply>(ok).action_raw == "DoubleClick(67, 44)");

    auto verdict = [](std::string_view t) { return std::get<FormatVerdict>(parse_agent_reply(t)).reason; };
    CHECK(verdict(R"j({"action":"Click(1,1)"})j") == FormatError::MissingField);
    CHECK(verdict("not json at all") == FormatError::BadJsonEnvelope);
    CHECK(verdict(R"j({"intent":"a","action":"None()","thought":"x"})j") == FormatError::BadJsonEnvelope);
    CHECK(verdict(R"j({"intent":1,"action":"None()"})j") == FormatError::BadJsonEnvelope);
    CHECK(verdict(R"j(["intent","action"])j") == FormatError::BadJsonEnvelope);
    CHECK(verdict(R"j({"intent":"","action":"None()"})j") == FormatError::MissingField);
  }

  TEST_CASE("check_reply chains envelope, grammar and range") {
    auto good = check_reply(R"j({"intent":"open it","action":"Click(5, 5)"})j", 1920, 1080);
    CHECK(good.verdict.ok());
    REQUIRE(good.action);
    CHECK(*good.action == Action::pointer(ActionKind::Click, 5, 5));
    auto far = check_reply(R"j({"intent":"x","action":"Click(5000, 5)"})j", 1920, 1080);
    CHECK(far.verdict.reason == FormatError::CoordOutOfRange);
    CHECK_FALSE(far.action);
    CHECK(far.intent == "x");
  }

  TEST_CASE("verdict codes are stable and invertible") {
    CHECK(verdict_code(FormatVerdict::pass()) == "ok");
    CHECK(verdict_code(FormatVerdict::fail(FormatError::BadKeyName)) == "bad_key_name");
    for (int i = 0; i <= static_cast<int>(FormatError::MissingField); ++i) {
      const auto v = FormatVerdict::fail(static_cast<FormatError>(i));
      CHECK(verdict_from_code(verdict_code(v)) == v);
    }
    CHECK_FALSE(verdict_from_code("nope"));
  }
}
