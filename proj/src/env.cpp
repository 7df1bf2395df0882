#include "deskrl/env.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "deskrl/common.hpp"

namespace deskrl {

std::string_view to_string(WidgetKind kind) {
  switch (kind) {
    case WidgetKind::Icon: return "icon";
    case WidgetKind::Button: return "button";
    case WidgetKind::Link: return "link";
    case WidgetKind::TextField: return "text_field";
    case WidgetKind::ScrollRegion: return "scroll_region";
    case WidgetKind::NoisyRegion: return "noisy_region";
  }
  return "?";
}

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::Click: return "click";
    case Activation::DoubleClick: return "double_click";
    case Activation::RightClick: return "right_click";
    case Activation::Text: return "text";
    case Activation::Key: return "key";
  }
  return "?";
}

int WorldSpec::page_index(std::string_view id) const {
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (pages[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

const Page& WorldSpec::page(std::string_view id) const {
  const int i = page_index(id);
  if (i < 0) throw Error(ErrorCode::WorldFormat, "unknown page '" + std::string(id) + "'");
  return pages[static_cast<std::size_t>(i)];
}

std::vector<std::string> WorldSpec::static_vocabulary() const {
  std::set<std::string> vocab;
  for (const auto& p : pages) {
    for (const auto& w : p.widgets) {
      vocab.insert(w.label_tokens.begin(), w.label_tokens.end());
      for (const auto& line : w.lines) vocab.insert(line.tokens.begin(), line.tokens.end());
    }
  }
  return {vocab.begin(), vocab.end()};
}

// ---------------------------------------------------------------------------
// Loader

namespace {

class WorldLoader {
public:
  WorldLoader(std::string_view source, int max_steps) : source_(source), max_steps_(max_steps) {}

  WorldSpec load(std::string_view text) {
    YAML::Node root;
    try {
      root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
      fail(e.mark.line + 1, std::string("malformed document: ") + e.msg);
    }
    if (!root.IsMap()) fail(1, "top level must be a mapping");

    const int version = scalar<int>(root, "schema_version");
    if (version != 1) fail(line(root["schema_version"]), "unsupported schema_version " + std::to_string(version));

    WorldSpec w;
    w.name = scalar<std::string>(root, "name");
    const auto grid = required(root, "grid");
    w.cells_x = scalar<int>(grid, "cells_x");
    w.cells_y = scalar<int>(grid, "cells_y");
    w.colors = scalar<int>(grid, "colors");
    if (w.cells_x <= 0 || w.cells_y <= 0) fail(line(grid), "grid dimensions must be positive");
    if (w.colors <= 0 || w.colors > 256) fail(line(grid), "colors must be in [1, 256]");
    w.start_page = scalar<std::string>(root, "start_page");

    if (const auto noise = root["noise"]) {
      const int size = scalar<int>(noise, "vocabulary_size");
      const auto prefix = scalar<std::string>(noise, "prefix");
      if (size <= 0) fail(line(noise), "noise vocabulary_size must be positive");
      check_token(prefix, line(noise));
      for (int i = 0; i < size; ++i) {
        std::ostringstream os;
        os << prefix;
        os.width(3);
        os.fill('0');
        os << i;
        w.noise_vocabulary.push_back(os.str());
      }
    }

    const auto pages = required(root, "pages");
    if (!pages.IsSequence() || pages.size() == 0) fail(line(pages), "pages must be a non-empty list");
    for (const auto& pn : pages) w.pages.push_back(load_page(pn, w));

    std::set<std::string> ids;
    for (const auto& p : w.pages) {
      if (!ids.insert(p.id).second) fail(p.source_line, "duplicate page id '" + p.id + "'");
    }
    if (w.page_index(w.start_page) < 0) fail(line(root["start_page"]), "start_page '" + w.start_page + "' not defined");
    for (const auto& p : w.pages) {
      for (const auto& [key, target] : p.keys) {
        if (w.page_index(target) < 0) fail(p.source_line, "key '" + key + "' targets unknown page '" + target + "'");
      }
      for (const auto& wd : p.widgets) {
        for (const auto& h : wd.handlers) {
          if (h.effect.goto_page && w.page_index(*h.effect.goto_page) < 0) {
            fail(wd.source_line, "widget '" + wd.id + "' targets unknown page '" + *h.effect.goto_page + "'");
          }
        }
        if (wd.kind == WidgetKind::NoisyRegion && w.noise_vocabulary.empty()) {
          fail(wd.source_line, "noisy_region requires a noise vocabulary");
        }
      }
    }

    const auto depths = page_depths(w);
    for (const auto& p : w.pages) {
      const int d = depths.at(p.id);
      if (d < 0) fail(p.source_line, "page '" + p.id + "' is unreachable from '" + w.start_page + "'");
      if (d > max_steps_) {
        fail(p.source_line, "page '" + p.id + "' needs " + std::to_string(d) + " steps, more than max_steps " +
                                std::to_string(max_steps_));
      }
    }
    return w;
  }

private:
  [[noreturn]] void fail(int line_no, const std::string& msg) const {
    throw Error(ErrorCode::WorldFormat, std::string(source_) + ":" + std::to_string(line_no) + ": " + msg);
  }

  static int line(const YAML::Node& n) { return n ? n.Mark().line + 1 : 0; }

  YAML::Node required(const YAML::Node& parent, const char* key) const {
    auto n = parent[key];
    if (!n) fail(line(parent), std::string("missing field '") + key + "'");
    return n;
  }

  template <typename T>
  T scalar(const YAML::Node& parent, const char* key) const {
    auto n = required(parent, key);
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(line(n), std::string("field '") + key + "' has the wrong type");
    }
  }

  template <typename T>
  T scalar_or(const YAML::Node& parent, const char* key, T fallback) const {
    if (!parent[key]) return fallback;
    return scalar<T>(parent, key);
  }

  void check_token(const std::string& tok, int line_no) const {
    const auto parts = tokenize(tok);
    if (parts.size() != 1 || parts[0] != tok) fail(line_no, "token '" + tok + "' must be lowercase alphanumeric");
  }

  std::vector<std::string> tokens(const YAML::Node& n) const {
    if (!n) return {};
    if (!n.IsSequence()) fail(line(n), "token list expected");
    std::vector<std::string> out;
    for (const auto& t : n) {
      auto s = t.as<std::string>();
      check_token(s, line(t));
      out.push_back(std::move(s));
    }
    return out;
  }

  void check_color(int c, const WorldSpec& w, int line_no) const {
    if (c < 0 || c >= w.colors) fail(line_no, "color " + std::to_string(c) + " outside [0, " + std::to_string(w.colors) + ")");
  }

  Page load_page(const YAML::Node& pn, const WorldSpec& w) const {
    Page p;
    p.source_line = line(pn);
    p.id = scalar<std::string>(pn, "id");
    p.background = scalar_or<int>(pn, "background", 0);
    check_color(p.background, w, p.source_line);
    if (const auto keys = pn["keys"]) {
      if (!keys.IsMap()) fail(line(keys), "keys must be a mapping of key combo to page");
      for (const auto& kv : keys) {
        const auto combo = kv.first.as<std::string>();
        if (!is_valid_key_combo(combo)) fail(line(kv.first), "invalid key combo '" + combo + "'");
        p.keys[combo] = kv.second.as<std::string>();
      }
    }
    if (const auto widgets = pn["widgets"]) {
      if (!widgets.IsSequence()) fail(line(widgets), "widgets must be a list");
      for (const auto& wn : widgets) p.widgets.push_back(load_widget(wn, w));
    }

    std::set<std::string> ids;
    int scroll_regions = 0;
    for (std::size_t i = 0; i < p.widgets.size(); ++i) {
      const auto& a = p.widgets[i];
      if (!ids.insert(a.id).second) fail(a.source_line, "duplicate widget id '" + a.id + "'");
      if (a.kind == WidgetKind::ScrollRegion) ++scroll_regions;
      for (std::size_t j = 0; j < i; ++j) {
        const auto& b = p.widgets[j];
        if (a.rect.overlaps(b.rect)) {
          fail(a.source_line, "widget '" + a.id + "' overlaps widget '" + b.id + "' (line " +
                                  std::to_string(b.source_line) + ")");
        }
      }
    }
    if (scroll_regions > 1) fail(p.source_line, "page '" + p.id + "' has more than one scroll_region");
    if (p.widgets.size() > 32000) fail(p.source_line, "too many widgets");
    return p;
  }

  Widget load_widget(const YAML::Node& wn, const WorldSpec& w) const {
    Widget wd;
    wd.source_line = line(wn);
    wd.id = scalar<std::string>(wn, "id");
    const auto kind = scalar<std::string>(wn, "kind");
    static const std::map<std::string, WidgetKind> kinds = {
        {"icon", WidgetKind::Icon},           {"button", WidgetKind::Button},
        {"link", WidgetKind::Link},           {"text_field", WidgetKind::TextField},
        {"scroll_region", WidgetKind::ScrollRegion}, {"noisy_region", WidgetKind::NoisyRegion},
    };
    const auto k = kinds.find(kind);
    if (k == kinds.end()) fail(line(wn["kind"]), "unknown widget kind '" + kind + "'");
    wd.kind = k->second;

    const auto rect = required(wn, "rect");
    if (!rect.IsSequence() || rect.size() != 4) fail(line(rect), "rect must be [x, y, w, h]");
    wd.rect = {rect[0].as<int>(), rect[1].as<int>(), rect[2].as<int>(), rect[3].as<int>()};
    if (wd.rect.w <= 0 || wd.rect.h <= 0) fail(line(rect), "rect of '" + wd.id + "' has non-positive size");
    if (wd.rect.x < 0 || wd.rect.y < 0 || wd.rect.x + wd.rect.w > w.cells_x || wd.rect.y + wd.rect.h > w.cells_y) {
      fail(line(rect), "rect of '" + wd.id + "' is out of bounds");
    }

    wd.color = scalar_or<int>(wn, "color", 0);
    wd.alt_color = scalar_or<int>(wn, "alt_color", wd.color);
    check_color(wd.color, w, wd.source_line);
    check_color(wd.alt_color, w, wd.source_line);
    wd.label_tokens = tokens(wn["label"]);
    if (static_cast<int>(wd.label_tokens.size()) > wd.rect.w * wd.rect.h) {
      fail(wd.source_line, "label of '" + wd.id + "' does not fit its rect");
    }
    wd.stride = scalar_or<int>(wn, "stride", 1);
    if (wd.stride <= 0) fail(wd.source_line, "stride must be positive");

    if (const auto lines = wn["lines"]) {
      if (wd.kind != WidgetKind::ScrollRegion) fail(line(lines), "only scroll_region widgets have lines");
      for (const auto& ln : lines) {
        ScrollLine sl;
        sl.tokens = tokens(ln["tokens"]);
        sl.color = scalar_or<int>(ln, "color", wd.color);
        check_color(sl.color, w, line(ln));
        if (static_cast<int>(sl.tokens.size()) > wd.rect.w) fail(line(ln), "scroll line wider than its region");
        wd.lines.push_back(std::move(sl));
      }
    }

    if (const auto on = wn["on"]) {
      if (!on.IsSequence()) fail(line(on), "'on' must be a list of handlers");
      static const std::map<std::string, Activation> acts = {
          {"click", Activation::Click}, {"double_click", Activation::DoubleClick},
          {"right_click", Activation::RightClick}, {"text", Activation::Text}, {"key", Activation::Key},
      };
      for (const auto& hn : on) {
        Handler h;
        const auto act = scalar<std::string>(hn, "activation");
        const auto a = acts.find(act);
        if (a == acts.end()) fail(line(hn), "unknown activation '" + act + "'");
        h.activation = a->second;
        if (h.activation == Activation::Key) {
          h.key = scalar<std::string>(hn, "key");
          if (!is_valid_key_combo(h.key)) fail(line(hn), "invalid key combo '" + h.key + "'");
        }
        if (hn["goto"]) h.effect.goto_page = scalar<std::string>(hn, "goto");
        h.effect.toggle = scalar_or<bool>(hn, "toggle", false);
        wd.handlers.push_back(std::move(h));
      }
    }
    return wd;
  }

  std::string_view source_;
  int max_steps_;
};

}  // namespace

std::map<std::string, int> page_depths(const WorldSpec& world) {
  std::map<std::string, int> depth;
  for (const auto& p : world.pages) depth[p.id] = -1;
  if (world.page_index(world.start_page) < 0) return depth;

  std::deque<std::string> queue{world.start_page};
  depth[world.start_page] = 0;
  while (!queue.empty()) {
    const auto cur = queue.front();
    queue.pop_front();
    const auto& page = world.page(cur);
    std::vector<std::string> next;
    for (const auto& [key, target] : page.keys) next.push_back(target);
    for (const auto& w : page.widgets) {
      if (w.kind == WidgetKind::NoisyRegion) continue;
      for (const auto& h : w.handlers) {
        if (h.effect.goto_page) next.push_back(*h.effect.goto_page);
      }
    }
    for (const auto& n : next) {
      auto it = depth.find(n);
      if (it != depth.end() && it->second < 0) {
        it->second = depth[cur] + 1;
        queue.push_back(n);
      }
    }
  }
  return depth;
}

WorldSpec load_world(std::string_view yaml_text, std::string_view source_name, int max_steps) {
  return WorldLoader(source_name, max_steps).load(yaml_text);
}

WorldSpec load_world_file(const std::string& path, int max_steps) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open world file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_world(ss.str(), path, max_steps);
}

// ---------------------------------------------------------------------------
// Geometry and OCR

int pixel_to_cell_x(int x_px, int width_px, int cells_x) {
  return static_cast<int>(static_cast<long long>(x_px) * cells_x / width_px);
}

int pixel_to_cell_y(int y_px, int height_px, int cells_y) {
  return static_cast<int>(static_cast<long long>(y_px) * cells_y / height_px);
}

int cell_center_px(int cell, int extent_px, int cells) {
  return static_cast<int>((2LL * cell + 1) * extent_px / (2LL * cells));
}

std::vector<OcrBox> ocr(const Screen& screen) {
  std::map<int, OcrBox> by_widget;
  for (int cy = 0; cy < screen.height_cells; ++cy) {
    for (int cx = 0; cx < screen.width_cells; ++cx) {
      const auto& c = screen.at(cx, cy);
      if (c.widget < 0) continue;
      auto [it, fresh] = by_widget.try_emplace(c.widget);
      auto& box = it->second;
      if (fresh) {
        box.rect = {cx, cy, 1, 1};
      } else {
        const int x1 = std::max(box.rect.x + box.rect.w, cx + 1);
        const int y1 = std::max(box.rect.y + box.rect.h, cy + 1);
        box.rect.x = std::min(box.rect.x, cx);
        box.rect.y = std::min(box.rect.y, cy);
        box.rect.w = x1 - box.rect.x;
        box.rect.h = y1 - box.rect.y;
      }
      if (!c.token.empty()) box.tokens.push_back(c.token);
    }
  }
  std::vector<OcrBox> boxes;
  for (auto& [id, box] : by_widget) {
    if (!box.tokens.empty()) boxes.push_back(std::move(box));
  }
  std::stable_sort(boxes.begin(), boxes.end(), [](const OcrBox& a, const OcrBox& b) {
    return a.rect.y != b.rect.y ? a.rect.y < b.rect.y : a.rect.x < b.rect.x;
  });
  return boxes;
}

std::vector<std::string> ocr_tokens(const Screen& screen) {
  std::vector<std::string> out;
  for (auto& box : ocr(screen)) out.insert(out.end(), box.tokens.begin(), box.tokens.end());
  return out;
}

std::optional<OcrBox> box_at(const Screen& screen, int x_px, int y_px, int width_px, int height_px) {
  if (x_px < 0 || y_px < 0 || x_px >= width_px || y_px >= height_px) return std::nullopt;
  const int cx = pixel_to_cell_x(x_px, width_px, screen.width_cells);
  const int cy = pixel_to_cell_y(y_px, height_px, screen.height_cells);
  for (auto& box : ocr(screen)) {
    if (box.rect.contains(cx, cy)) return box;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Environment

Environment::Environment(std::shared_ptr<const WorldSpec> world, EnvConfig cfg)
    : world_(std::move(world)), cfg_(cfg), rng_(cfg.rng_seed) {
  if (!world_) throw Error(ErrorCode::ConfigInvalid, "environment needs a world");
  if (cfg_.max_steps < 1) throw Error(ErrorCode::ConfigInvalid, "max_steps must be >= 1");
  if (cfg_.screen_width_px < world_->cells_x || cfg_.screen_height_px < world_->cells_y) {
    throw Error(ErrorCode::ConfigInvalid, "pixel space smaller than the cell grid");
  }
  reset();
}

bool Environment::widget_present(const Widget& w) const {
  return w.kind != WidgetKind::NoisyRegion || cfg_.noisy_tv_enabled;
}

const Screen& Environment::reset() {
  rng_.seed(cfg_.rng_seed);
  steps_ = 0;
  page_ = world_->page_index(world_->start_page);
  widget_state_.assign(world_->pages.size(), {});
  for (std::size_t p = 0; p < world_->pages.size(); ++p) {
    widget_state_[p].resize(world_->pages[p].widgets.size());
  }
  scroll_.assign(world_->pages.size(), 0);
  regenerate_noise();
  render();
  return screen_;
}

Environment::WidgetState& Environment::state_of(int page, int widget) {
  return widget_state_[static_cast<std::size_t>(page)][static_cast<std::size_t>(widget)];
}

int Environment::widget_at(int page, int cx, int cy) const {
  const auto& widgets = world_->pages[static_cast<std::size_t>(page)].widgets;
  for (std::size_t i = 0; i < widgets.size(); ++i) {
    if (widget_present(widgets[i]) && widgets[i].rect.contains(cx, cy)) return static_cast<int>(i);
  }
  return -1;
}

void Environment::apply(const Transition& t, int widget) {
  if (t.toggle && widget >= 0) {
    auto& st = state_of(page_, widget);
    st.toggled = !st.toggled;
  }
  if (t.goto_page) page_ = world_->page_index(*t.goto_page);
}

bool Environment::fire(int widget, Activation activation, std::string_view key) {
  const auto& w = world_->pages[static_cast<std::size_t>(page_)].widgets[static_cast<std::size_t>(widget)];
  for (const auto& h : w.handlers) {
    if (h.activation != activation) continue;
    if (activation == Activation::Key && h.key != key) continue;
    apply(h.effect, widget);
    return true;
  }
  return false;
}

const Screen& Environment::step(const Action& action) {
  if (steps_ >= cfg_.max_steps) {
    throw Error(ErrorCode::StepLimitExceeded,
                "step " + std::to_string(steps_ + 1) + " exceeds max_steps " + std::to_string(cfg_.max_steps));
  }
  ++steps_;

  int target = -1;
  if (has_coords(action.kind) && action.x && action.y) {
    const int cx = pixel_to_cell_x(*action.x, cfg_.screen_width_px, world_->cells_x);
    const int cy = pixel_to_cell_y(*action.y, cfg_.screen_height_px, world_->cells_y);
    if (cx >= 0 && cy >= 0 && cx < world_->cells_x && cy < world_->cells_y) target = widget_at(page_, cx, cy);
  }
  const auto& page = world_->pages[static_cast<std::size_t>(page_)];

  switch (action.kind) {
    case ActionKind::Click:
      if (target >= 0) fire(target, Activation::Click, {});
      break;
    case ActionKind::DoubleClick:
      if (target >= 0 && !fire(target, Activation::DoubleClick, {})) fire(target, Activation::Click, {});
      break;
    case ActionKind::RightClick:
      if (target >= 0) fire(target, Activation::RightClick, {});
      break;
    case ActionKind::ScrollUp:
    case ActionKind::ScrollDown:
      if (target >= 0) {
        const auto& w = page.widgets[static_cast<std::size_t>(target)];
        if (w.kind == WidgetKind::ScrollRegion) {
          const int max_offset = std::max(0, static_cast<int>(w.lines.size()) - w.rect.h);
          int& off = scroll_[static_cast<std::size_t>(page_)];
          off += action.kind == ActionKind::ScrollDown ? w.stride : -w.stride;
          off = std::clamp(off, 0, max_offset);
        }
      }
      break;
    case ActionKind::Text:
      if (target >= 0) {
        const auto& w = page.widgets[static_cast<std::size_t>(target)];
        if (w.kind == WidgetKind::TextField) {
          auto toks = tokenize(action.text.value_or(""));
          const auto cap = static_cast<std::size_t>(w.rect.w * w.rect.h);
          if (toks.size() > cap) toks.resize(cap);
          state_of(page_, target).typed = std::move(toks);
        }
        fire(target, Activation::Text, {});
      }
      break;
    case ActionKind::Key: {
      const std::string combo = action.key.value_or("");
      bool handled = false;
      for (std::size_t i = 0; i < page.widgets.size() && !handled; ++i) {
        if (widget_present(page.widgets[i])) handled = fire(static_cast<int>(i), Activation::Key, combo);
      }
      if (!handled) {
        const auto it = page.keys.find(combo);
        if (it != page.keys.end()) page_ = world_->page_index(it->second);
      }
      break;
    }
    case ActionKind::Move:
    case ActionKind::DragTo:
    case ActionKind::None:
      break;
  }

  regenerate_noise();
  render();
  return screen_;
}

void Environment::regenerate_noise() {
  if (!cfg_.noisy_tv_enabled) return;
  const auto& page = world_->pages[static_cast<std::size_t>(page_)];
  std::uniform_int_distribution<std::size_t> pick_token(0, world_->noise_vocabulary.size() - 1);
  std::uniform_int_distribution<int> pick_color(0, world_->colors - 1);
  for (std::size_t i = 0; i < page.widgets.size(); ++i) {
    const auto& w = page.widgets[i];
    if (w.kind != WidgetKind::NoisyRegion) continue;
    auto& st = state_of(page_, static_cast<int>(i));
    st.noise_tokens.resize(static_cast<std::size_t>(w.rect.w));
    for (auto& t : st.noise_tokens) t = world_->noise_vocabulary[pick_token(rng_)];
    st.noise_colors.resize(static_cast<std::size_t>(w.rect.w * w.rect.h));
    for (auto& c : st.noise_colors) c = static_cast<std::uint8_t>(pick_color(rng_));
  }
}

void Environment::render() {
  const auto& page = world_->pages[static_cast<std::size_t>(page_)];
  screen_.width_cells = world_->cells_x;
  screen_.height_cells = world_->cells_y;
  screen_.page_id = page.id;
  screen_.scroll_offset = scroll_[static_cast<std::size_t>(page_)];
  screen_.cells.assign(static_cast<std::size_t>(world_->cells_x * world_->cells_y),
                       Cell{static_cast<std::uint8_t>(page.background), -1, {}});

  for (std::size_t i = 0; i < page.widgets.size(); ++i) {
    const auto& w = page.widgets[i];
    if (!widget_present(w)) continue;
    const auto& st = widget_state_[static_cast<std::size_t>(page_)][i];
    const auto color = static_cast<std::uint8_t>(st.toggled ? w.alt_color : w.color);
    const auto& r = w.rect;
    for (int cy = r.y; cy < r.y + r.h; ++cy) {
      for (int cx = r.x; cx < r.x + r.w; ++cx) screen_.at(cx, cy) = Cell{color, static_cast<std::int16_t>(i), {}};
    }

    auto write_row_major = [&](const std::vector<std::string>& toks) {
      for (std::size_t k = 0; k < toks.size(); ++k) {
        const int cx = r.x + static_cast<int>(k) % r.w;
        const int cy = r.y + static_cast<int>(k) / r.w;
        screen_.at(cx, cy).token = toks[k];
      }
    };

    switch (w.kind) {
      case WidgetKind::ScrollRegion:
        for (int row = 0; row < r.h; ++row) {
          const auto li = static_cast<std::size_t>(screen_.scroll_offset + row);
          if (li >= w.lines.size()) break;
          const auto& line = w.lines[li];
          for (int cx = r.x; cx < r.x + r.w; ++cx) screen_.at(cx, r.y + row).color = static_cast<std::uint8_t>(line.color);
          for (std::size_t k = 0; k < line.tokens.size(); ++k) {
            screen_.at(r.x + static_cast<int>(k), r.y + row).token = line.tokens[k];
          }
        }
        break;
      case WidgetKind::NoisyRegion:
        for (int k = 0; k < r.w * r.h && k < static_cast<int>(st.noise_colors.size()); ++k) {
          screen_.at(r.x + k % r.w, r.y + k / r.w).color = st.noise_colors[static_cast<std::size_t>(k)];
        }
        write_row_major(st.noise_tokens);
        break;
      case WidgetKind::TextField:
        write_row_major(st.typed ? *st.typed : w.label_tokens);
        break;
      default:
        write_row_major(w.label_tokens);
        break;
    }
  }
}

}  // namespace deskrl
