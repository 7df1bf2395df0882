#include "deskrl/action_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <vector>

#include <json.hpp>

namespace deskrl {

namespace {

constexpr std::array<std::string_view, kNumActionKinds> kFunctionNames = {
    "Move", "Click", "RightClick", "DoubleClick", "ScrollUp",
    "ScrollDown", "DragTo", "Key", "Text", "None",
};

struct Arg {
  enum class Type { Int, Str } type;
  long long number = 0;
  std::string str;
};

// Recursive-descent scanner for `Name(arg, arg, ...)`.
class CallScanner {
public:
  explicit CallScanner(std::string_view src) : src_(src) {}

  bool scan(std::string& name, std::vector<Arg>& args) {
    skip_ws();
    if (!identifier(name)) return false;
    skip_ws();
    if (!consume('(')) return false;
    skip_ws();
    if (!consume(')')) {
      for (;;) {
        Arg arg;
        if (!argument(arg)) return false;
        args.push_back(std::move(arg));
        skip_ws();
        if (consume(')')) break;
        if (!consume(',')) return false;
        skip_ws();
      }
    }
    skip_ws();
    return pos_ == src_.size();
  }

private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  bool consume(char c) {
    if (!at_end() && peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n' || peek() == '\r')) ++pos_;
  }

  bool identifier(std::string& out) {
    if (at_end()) return false;
    const auto c0 = static_cast<unsigned char>(peek());
    if (!(std::isalpha(c0) || c0 == '_')) return false;
    std::size_t start = pos_;
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(peek());
      if (!(std::isalnum(c) || c == '_')) break;
      ++pos_;
    }
    out.assign(src_.substr(start, pos_ - start));
    return true;
  }

  bool argument(Arg& out) {
    if (at_end()) return false;
    if (peek() == '"') {
      out.type = Arg::Type::Str;
      return quoted(out.str);
    }
    out.type = Arg::Type::Int;
    return integer(out.number);
  }

  // Unsigned base-10; any sign character is a parse failure.
  bool integer(long long& out) {
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) return false;
    long long value = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      const int digit = peek() - '0';
      if (value > (std::numeric_limits<int>::max() - digit) / 10) return false;
      value = value * 10 + digit;
      ++pos_;
    }
    out = value;
    return true;
  }

  bool quoted(std::string& out) {
    ++pos_;  // opening quote
    while (!at_end()) {
      const char c = peek();
      ++pos_;
      if (c == '"') return true;
      if (c == '\\') {
        if (at_end()) return false;
        const char e = peek();
        if (e != '"' && e != '\\') return false;
        out.push_back(e);
        ++pos_;
      } else {
        out.push_back(c);
      }
    }
    return false;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool is_single_key(std::string_view name) {
  if (name.size() == 1) {
    return std::isalnum(static_cast<unsigned char>(name[0])) != 0;
  }
  return std::find(kNamedKeys.begin(), kNamedKeys.end(), name) != kNamedKeys.end();
}

}  // namespace

const std::array<std::string_view, 11> kNamedKeys = {
    "Space", "Enter", "Tab", "Esc", "Shift", "Ctrl", "Alt", "Up", "Down", "Left", "Right",
};

std::string_view function_name(ActionKind kind) {
  return kFunctionNames[static_cast<std::size_t>(kind)];
}

std::optional<ActionKind> kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFunctionNames.size(); ++i) {
    if (kFunctionNames[i] == name) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

Action Action::pointer(ActionKind kind, int x, int y) {
  Action a;
  a.kind = kind;
  a.x = x;
  a.y = y;
  return a;
}

Action Action::key_press(std::string combo) {
  Action a;
  a.kind = ActionKind::Key;
  a.key = std::move(combo);
  return a;
}

Action Action::typed(int x, int y, std::string text) {
  Action a;
  a.kind = ActionKind::Text;
  a.x = x;
  a.y = y;
  a.text = std::move(text);
  return a;
}

std::string_view verdict_code(const FormatVerdict& verdict) {
  if (verdict.ok()) return "ok";
  switch (*verdict.reason) {
    case FormatError::ParseFail: return "parse_fail";
    case FormatError::UnknownFunction: return "unknown_function";
    case FormatError::BadArity: return "bad_arity";
    case FormatError::CoordOutOfRange: return "coord_out_of_range";
    case FormatError::BadKeyName: return "bad_key_name";
    case FormatError::BadJsonEnvelope: return "bad_json_envelope";
    case FormatError::MissingField: return "missing_field";
  }
  return "unknown";
}

std::optional<FormatVerdict> verdict_from_code(std::string_view code) {
  if (code == "ok") return FormatVerdict::pass();
  for (int i = 0; i <= static_cast<int>(FormatError::MissingField); ++i) {
    auto v = FormatVerdict::fail(static_cast<FormatError>(i));
    if (verdict_code(v) == code) return v;
  }
  return std::nullopt;
}

bool is_valid_key_combo(std::string_view combo) {
  if (combo.empty()) return false;
  std::size_t start = 0;
  for (;;) {
    const auto plus = combo.find('+', start);
    const auto part = combo.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
    if (!is_single_key(part)) return false;
    if (plus == std::string_view::npos) return true;
    start = plus + 1;
  }
}

ParsedAction parse_action(std::string_view raw) {
  std::string name;
  std::vector<Arg> args;
  if (!CallScanner(raw).scan(name, args)) return FormatVerdict::fail(FormatError::ParseFail);

  const auto kind = kind_from_name(name);
  if (!kind) return FormatVerdict::fail(FormatError::UnknownFunction);

  auto arity = [&](std::initializer_list<Arg::Type> want) {
    if (args.size() != want.size()) return false;
    std::size_t i = 0;
    for (auto t : want) {
      if (args[i++].type != t) return false;
    }
    return true;
  };
  using T = Arg::Type;

  switch (*kind) {
    case ActionKind::Key:
      if (!arity({T::Str})) break;
      return Action::key_press(args[0].str);
    case ActionKind::Text:
      if (!arity({T::Int, T::Int, T::Str})) break;
      return Action::typed(static_cast<int>(args[0].number), static_cast<int>(args[1].number), args[2].str);
    case ActionKind::None:
      if (!args.empty()) break;
      return Action::none();
    default:
      if (!arity({T::Int, T::Int})) break;
      return Action::pointer(*kind, static_cast<int>(args[0].number), static_cast<int>(args[1].number));
  }
  return FormatVerdict::fail(FormatError::BadArity);
}

FormatVerdict validate(const Action& action, int width_px, int height_px) {
  if (has_coords(action.kind)) {
    if (!action.x || !action.y) return FormatVerdict::fail(FormatError::BadArity);
    const int x = *action.x;
    const int y = *action.y;
    if (x < 0 || x >= width_px || y < 0 || y >= height_px) {
      return FormatVerdict::fail(FormatError::CoordOutOfRange);
    }
  }
  if (action.kind == ActionKind::Key) {
    if (!action.key) return FormatVerdict::fail(FormatError::BadArity);
    if (!is_valid_key_combo(*action.key)) return FormatVerdict::fail(FormatError::BadKeyName);
  }
  if (action.kind == ActionKind::Text && !action.text) return FormatVerdict::fail(FormatError::BadArity);
  return FormatVerdict::pass();
}

std::string render(const Action& action) {
  std::string out(function_name(action.kind));
  out.push_back('(');
  switch (action.kind) {
    case ActionKind::None:
      break;
    case ActionKind::Key:
      out += quote(action.key.value_or(""));
      break;
    case ActionKind::Text:
      out += std::to_string(action.x.value_or(0)) + ", " + std::to_string(action.y.value_or(0)) + ", " +
             quote(action.text.value_or(""));
      break;
    default:
      out += std::to_string(action.x.value_or(0)) + ", " + std::to_string(action.y.value_or(0));
      break;
  }
  out.push_back(')');
  return out;
}

ParsedReply parse_agent_reply(std::string_view text) {
  const auto doc = nlohmann::json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) return FormatVerdict::fail(FormatError::BadJsonEnvelope);

  for (const auto& [key, value] : doc.items()) {
    if (key != "intent" && key != "action") return FormatVerdict::fail(FormatError::BadJsonEnvelope);
    if (!value.is_string()) return FormatVerdict::fail(FormatError::BadJsonEnvelope);
  }
  const auto intent = doc.find("intent");
  const auto action = doc.find("action");
  if (intent == doc.end() || action == doc.end()) return FormatVerdict::fail(FormatError::MissingField);

  AgentReply reply{intent->get<std::string>(), action->get<std::string>()};
  if (reply.intent.empty() || reply.action_raw.empty()) return FormatVerdict::fail(FormatError::MissingField);
  return reply;
}

ReplyCheck check_reply(std::string_view text, int width_px, int height_px) {
  ReplyCheck out;
  auto reply = parse_agent_reply(text);
  if (auto* bad = std::get_if<FormatVerdict>(&reply)) {
    out.verdict = *bad;
    return out;
  }
  auto& envelope = std::get<AgentReply>(reply);
  out.intent = envelope.intent;

  auto parsed = parse_action(envelope.action_raw);
  if (auto* bad = std::get_if<FormatVerdict>(&parsed)) {
    out.verdict = *bad;
    return out;
  }
  auto& action = std::get<Action>(parsed);
  out.verdict = validate(action, width_px, height_px);
  if (out.verdict.ok()) out.action = std::move(action);
  return out;
}

}  // namespace deskrl
