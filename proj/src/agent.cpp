#include "deskrl/agent.hpp"

#include <set>

#include <json.hpp>

namespace deskrl {

const std::array<std::string_view, 8> kKeyPayloads = {
    "Esc", "Enter", "Tab", "Space", "Shift+K", "Ctrl+L", "Alt+Tab", "Win+R",
};

const std::array<std::string_view, 8> kTextPayloads = {
    "hello world", "news today", "weather report", "cat photo",
    "sports news", "science notes", "search wiki", "say \"hi",
};

const std::array<std::string_view, 16> kIntentTemplates = {
    "click the {t}",
    "open the {t}",
    "select the {t}",
    "scroll the {t}",
    "type into the {t}",
    "press the {t}",
    "move to the {t}",
    "check the {t}",
    "explore the screen",
    "look around",
    "check the {t} {t}",
    "open open the {t}",
    "",                  // empty intent
    "{t}",               // bare text, no envelope
    "open the {t}",      // extra key
    "click the {t}",     // lowercase function name
};

namespace {

constexpr int kEmptyIntent = 12;
constexpr int kBareText = 13;
constexpr int kExtraKey = 14;
constexpr int kLowercaseCall = 15;

std::string fill(std::string_view tmpl, const std::string& target) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl.compare(i, 3, "{t}") == 0) {
      out += target;
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

}  // namespace

std::vector<std::string> agent_vocabulary() {
  std::set<std::string> words;
  for (auto t : kIntentTemplates) {
    for (auto& w : tokenize(t)) words.insert(w);
  }
  for (auto t : kTextPayloads) {
    for (auto& w : tokenize(t)) words.insert(w);
  }
  words.erase("t");
  words.insert("screen");
  return {words.begin(), words.end()};
}

std::vector<std::string> bundled_vocabulary(const WorldSpec& world) {
  std::set<std::string> words;
  for (auto& w : world.static_vocabulary()) words.insert(w);
  for (auto& w : agent_vocabulary()) words.insert(w);
  return {words.begin(), words.end()};
}

std::pair<int, int> action_pixels(const CompositeAction& a, const EnvConfig& env, int cells_x, int cells_y) {
  return {cell_center_px(a.cx, env.screen_width_px, cells_x), cell_center_px(a.cy, env.screen_height_px, cells_y)};
}

std::string decode_reply(const CompositeAction& a, const std::vector<OcrBox>& boxes, const EnvConfig& env,
                         int cells_x, int cells_y) {
  const auto kind = static_cast<ActionKind>(a.kind);
  const auto [px, py] = action_pixels(a, env, cells_x, cells_y);

  std::string action;
  switch (kind) {
    case ActionKind::Key:
      action = render(Action::key_press(std::string(kKeyPayloads[static_cast<std::size_t>(a.payload)])));
      break;
    case ActionKind::Text: {
      const auto text = kTextPayloads[static_cast<std::size_t>(a.payload)];
      if (text.find('"') != std::string_view::npos) {
        action = "Text(" + std::to_string(px) + ", " + std::to_string(py) + ", \"" + std::string(text) + "\")";
      } else {
        action = render(Action::typed(px, py, std::string(text)));
      }
      break;
    }
    case ActionKind::None:
      action = render(Action::none());
      break;
    default:
      action = render(Action::pointer(kind, px, py));
      break;
  }

  const std::string target =
      a.slot >= 0 && a.slot < static_cast<int>(boxes.size()) ? join(boxes[static_cast<std::size_t>(a.slot)].tokens)
                                                              : std::string("screen");
  const std::string intent = fill(kIntentTemplates[static_cast<std::size_t>(a.intent)], target);

  nlohmann::ordered_json reply;
  switch (a.intent) {
    case kEmptyIntent:
      reply["intent"] = "";
      reply["action"] = action;
      break;
    case kBareText:
      return intent + " " + action;
    case kExtraKey:
      reply["intent"] = intent;
      reply["action"] = action;
      reply["thought"] = "explore";
      break;
    case kLowercaseCall:
      action[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(action[0])));
      reply["intent"] = intent;
      reply["action"] = action;
      break;
    default:
      reply["intent"] = intent;
      reply["action"] = action;
      break;
  }
  return reply.dump();
}

}  // namespace deskrl
