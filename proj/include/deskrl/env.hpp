#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "deskrl/action_grammar.hpp"
#include "deskrl/common.hpp"

namespace deskrl {

/// Half-open cell rectangle [x, x+w) x [y, y+h).
struct CellRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(int cx, int cy) const { return cx >= x && cx < x + w && cy >= y && cy < y + h; }
  bool overlaps(const CellRect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool operator==(const CellRect&) const = default;
};

struct Cell {
  std::uint8_t color = 0;
  std::int16_t widget = -1;  // index into the page's widget list, -1 for wallpaper
  std::string token;         // empty when the cell carries no text

  bool operator==(const Cell&) const = default;
};

struct Screen {
  int width_cells = 0;
  int height_cells = 0;
  std::vector<Cell> cells;  // row-major
  std::string page_id;
  int scroll_offset = 0;

  const Cell& at(int cx, int cy) const { return cells[static_cast<std::size_t>(cy * width_cells + cx)]; }
  Cell& at(int cx, int cy) { return cells[static_cast<std::size_t>(cy * width_cells + cx)]; }
  bool operator==(const Screen&) const = default;
};

struct OcrBox {
  CellRect rect;
  std::vector<std::string> tokens;

  bool operator==(const OcrBox&) const = default;
};

enum class WidgetKind { Icon, Button, Link, TextField, ScrollRegion, NoisyRegion };
enum class Activation { Click, DoubleClick, RightClick, Text, Key };

std::string_view to_string(WidgetKind kind);
std::string_view to_string(Activation activation);

/// What a handler does when it fires. Both empty means no transition.
struct Transition {
  std::optional<std::string> goto_page;
  bool toggle = false;
};

struct Handler {
  Activation activation = Activation::Click;
  std::string key;  // only for Activation::Key
  Transition effect;
};

struct ScrollLine {
  std::vector<std::string> tokens;
  int color = 0;
};

struct Widget {
  std::string id;
  WidgetKind kind = WidgetKind::Button;
  CellRect rect;
  int color = 0;
  int alt_color = 0;
  std::vector<std::string> label_tokens;
  std::vector<Handler> handlers;
  std::vector<ScrollLine> lines;  // scroll_region content
  int stride = 1;                 // scroll_region rows per wheel notch
  int source_line = 0;
};

struct Page {
  std::string id;
  int background = 0;
  std::vector<Widget> widgets;
  std::map<std::string, std::string> keys;  // key combo -> target page
  int source_line = 0;
};

/// Parsed environment description. Immutable once loaded; shared by all
/// environment instances built from it.
struct WorldSpec {
  std::string name;
  int cells_x = 32;
  int cells_y = 18;
  int colors = 16;
  std::string start_page;
  std::vector<Page> pages;
  std::vector<std::string> noise_vocabulary;

  int page_index(std::string_view id) const;  // -1 when absent
  const Page& page(std::string_view id) const;

  /// Every token a deterministic screen can show (labels and scroll lines).
  std::vector<std::string> static_vocabulary() const;
};

/// Parses a world description. Throws Error(WorldFormat) with a
/// "<source>:<line>: ..." message on any schema violation, overlapping or
/// out-of-bounds rectangle, dangling transition, or unreachable page.
WorldSpec load_world(std::string_view yaml_text, std::string_view source_name = "<world>",
                     int max_steps = 10);
WorldSpec load_world_file(const std::string& path, int max_steps = 10);

/// The bundled default world.
const std::string& default_world_text();
std::shared_ptr<const WorldSpec> default_world();

/// Minimum number of actions to reach each page from the start page using
/// non-noisy transitions. Unreachable pages map to -1.
std::map<std::string, int> page_depths(const WorldSpec& world);

struct EnvConfig {
  int screen_width_px = 1920;
  int screen_height_px = 1080;
  int max_steps = 10;
  int num_parallel_envs = 8;
  bool noisy_tv_enabled = false;
  std::uint64_t rng_seed = 0;
};

int pixel_to_cell_x(int x_px, int width_px, int cells_x);
int pixel_to_cell_y(int y_px, int height_px, int cells_y);
/// Pixel coordinate of a cell centre; inverse of the mapping above.
int cell_center_px(int cell, int extent_px, int cells);

std::vector<OcrBox> ocr(const Screen& screen);
std::vector<std::string> ocr_tokens(const Screen& screen);
std::optional<OcrBox> box_at(const Screen& screen, int x_px, int y_px, int width_px, int height_px);

/// Synthetic desktop. Single-threaded; owns its RNG (used only by noisy regions).
class Environment {
public:
  Environment(std::shared_ptr<const WorldSpec> world, EnvConfig cfg);

  const Screen& reset();
  /// Executes an already validated action (None allowed).
  /// Throws Error(StepLimitExceeded) past max_steps without reset.
  const Screen& step(const Action& action);

  const Screen& screen() const { return screen_; }
  int steps_taken() const { return steps_; }
  const EnvConfig& config() const { return cfg_; }
  const WorldSpec& world() const { return *world_; }

  /// Whether a widget is shown under the current config (noisy ones only with noisy TV on).
  bool widget_present(const Widget& w) const;

private:
  struct WidgetState {
    bool toggled = false;
    std::optional<std::vector<std::string>> typed;
    std::vector<std::string> noise_tokens;
    std::vector<std::uint8_t> noise_colors;
  };

  WidgetState& state_of(int page, int widget);
  int widget_at(int page, int cx, int cy) const;
  bool fire(int widget, Activation activation, std::string_view key);
  void apply(const Transition& t, int widget);
  void regenerate_noise();
  void render();

  std::shared_ptr<const WorldSpec> world_;
  EnvConfig cfg_;
  std::mt19937_64 rng_;
  int page_ = 0;
  int steps_ = 0;
  std::vector<std::vector<WidgetState>> widget_state_;
  std::vector<int> scroll_;
  Screen screen_;
};

}  // namespace deskrl
