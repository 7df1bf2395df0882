#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace deskrl {

enum class ActionKind : std::uint8_t {
  Move,
  Click,
  RightClick,
  DoubleClick,
  ScrollUp,
  ScrollDown,
  DragTo,
  Key,
  Text,
  None,
};

inline constexpr int kNumActionKinds = 10;

std::string_view function_name(ActionKind kind);
std::optional<ActionKind> kind_from_name(std::string_view name);

/// True for every kind that carries (x, y): all mouse kinds plus Text.
constexpr bool has_coords(ActionKind kind) {
  return kind != ActionKind::Key && kind != ActionKind::None;
}

/// One GUI command. Fields not used by `kind` stay empty.
struct Action {
  ActionKind kind = ActionKind::None;
  std::optional<int> x;
  std::optional<int> y;
  std::optional<std::string> text;
  std::optional<std::string> key;

  static Action pointer(ActionKind kind, int x, int y);
  static Action key_press(std::string combo);
  static Action typed(int x, int y, std::string text);
  static Action none() { return {}; }

  bool operator==(const Action&) const = default;
};

enum class FormatError : std::uint8_t {
  ParseFail,
  UnknownFunction,
  BadArity,
  CoordOutOfRange,
  BadKeyName,
  BadJsonEnvelope,
  MissingField,
};

struct FormatVerdict {
  std::optional<FormatError> reason;

  bool ok() const { return !reason.has_value(); }
  static FormatVerdict pass() { return {}; }
  static FormatVerdict fail(FormatError e) { return {e}; }

  bool operator==(const FormatVerdict&) const = default;
};

/// Stable log codes: "ok", "parse_fail", "unknown_function", ...
std::string_view verdict_code(const FormatVerdict& verdict);
std::optional<FormatVerdict> verdict_from_code(std::string_view code);

struct AgentReply {
  std::string intent;
  std::string action_raw;
};

using ParsedAction = std::variant<Action, FormatVerdict>;
using ParsedReply = std::variant<AgentReply, FormatVerdict>;

/// Parses one function-call action string, e.g. `Click(960, 540)`.
/// Never throws; every input maps to an Action or a failed verdict.
ParsedAction parse_action(std::string_view raw);

/// Range check against the logical pixel space, plus key-name check for Key.
FormatVerdict validate(const Action& action, int width_px, int height_px);

/// Canonical form; parse_action(render(a)) == a for every well-formed a.
std::string render(const Action& action);

/// Strict two-key JSON envelope {"intent": ..., "action": ...}.
ParsedReply parse_agent_reply(std::string_view text);

/// Allowed key names for Key(...) combos besides single letters and digits.
extern const std::array<std::string_view, 11> kNamedKeys;
bool is_valid_key_combo(std::string_view combo);

/// Outcome of running a raw reply through envelope, grammar and range checks.
struct ReplyCheck {
  FormatVerdict verdict;
  std::string intent;             // empty unless the envelope parsed
  std::optional<Action> action;   // set only when verdict.ok()
};

ReplyCheck check_reply(std::string_view text, int width_px, int height_px);

}  // namespace deskrl
