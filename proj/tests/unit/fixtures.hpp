#pragma once

#include <memory>
#include <string>

#include "deskrl/env.hpp"

namespace fixtures {

/// 16x9 grid: a desktop with three labeled icons, an app page with a scroll
/// region, and an empty page.
inline const char* kThreeIcons = R"(schema_version: 1
name: three_icons
grid: {cells_x: 16, cells_y: 9, colors: 8}
start_page: desktop
pages:
  - id: desktop
    background: 0
    widgets:
      - {id: a, kind: icon, rect: [0, 0, 3, 2], color: 1, alt_color: 5, label: [alpha],
         on: [{activation: double_click, goto: app}, {activation: click, toggle: true}]}
      - {id: b, kind: icon, rect: [0, 3, 3, 2], color: 2, label: [beta]}
      - {id: c, kind: icon, rect: [5, 0, 3, 2], color: 3, label: [gamma, delta]}
  - id: app
    background: 4
    keys: {Esc: desktop, B: blank}
    widgets:
      - {id: field, kind: text_field, rect: [0, 0, 4, 1], color: 6, label: [query]}
      - id: feed
        kind: scroll_region
        rect: [2, 2, 10, 4]
        color: 7
        stride: 2
        lines:
          - {tokens: [one], color: 1}
          - {tokens: [two], color: 2}
          - {tokens: [three], color: 3}
          - {tokens: [four], color: 1}
          - {tokens: [five], color: 2}
          - {tokens: [six], color: 3}
          - {tokens: [seven], color: 1}
  - id: blank
    background: 2
    keys: {Esc: desktop}
)";

/// Same desktop plus a noisy region.
inline const char* kNoisyDesk = R"(schema_version: 1
name: noisy_desk
grid: {cells_x: 16, cells_y: 9, colors: 8}
start_page: desktop
noise: {prefix: nz, vocabulary_size: 64}
pages:
  - id: desktop
    background: 0
    widgets:
      - {id: a, kind: icon, rect: [0, 0, 3, 2], color: 1, label: [alpha], on: [{activation: click, toggle: true}]}
      - {id: tv, kind: noisy_region, rect: [8, 2, 6, 4], color: 3}
)";

inline std::shared_ptr<const deskrl::WorldSpec> world(const char* text) {
  return std::make_shared<const deskrl::WorldSpec>(deskrl::load_world(text, "fixture"));
}

}  // namespace fixtures
