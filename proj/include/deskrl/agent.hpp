#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "deskrl/env.hpp"
#include "deskrl/policy.hpp"

namespace deskrl {

/// Key payloads indexed by the payload head. The last one is not a valid combo.
extern const std::array<std::string_view, 8> kKeyPayloads;
/// Text payloads indexed by the payload head. The last one carries a raw quote
/// and breaks the call syntax.
extern const std::array<std::string_view, 8> kTextPayloads;
/// Intent templates indexed by the intent head. "{t}" is the target box text.
/// Indices 12..15 produce malformed replies.
extern const std::array<std::string_view, 16> kIntentTemplates;

/// Words the agent itself can put on screen or into an intent.
std::vector<std::string> agent_vocabulary();
/// World vocabulary plus agent vocabulary, deduplicated and sorted.
std::vector<std::string> bundled_vocabulary(const WorldSpec& world);

/// Reply text for a composite action: a JSON envelope with intent and action,
/// or one of the malformed variants selected by the intent head.
std::string decode_reply(const CompositeAction& a, const std::vector<OcrBox>& boxes, const EnvConfig& env,
                         int cells_x, int cells_y);

/// Cell-centre pixel coordinates of the chosen cell.
std::pair<int, int> action_pixels(const CompositeAction& a, const EnvConfig& env, int cells_x, int cells_y);

}  // namespace deskrl
