#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deskrl/common.hpp"
#include "deskrl/env.hpp"

namespace deskrl {

/// Hash seed for every embedding. Chosen offline (tools/find_hash_seed) so the
/// bundled vocabulary maps to distinct text buckets at 256 dimensions.
inline constexpr std::uint64_t kDefaultHashSeed = 10185;

struct EmbedConfig {
  int dim_visual = 256;
  int dim_text = 256;
  std::uint64_t hash_seed = kDefaultHashSeed;
};

/// Paired visual / textual embedding of one screen.
struct StateEmbedding {
  Vec o;
  Vec e;
};

std::uint64_t hash_token(std::string_view token, std::uint64_t seed);
int text_bucket(std::string_view token, const EmbedConfig& cfg);

Vec embed_visual(const Screen& screen, const EmbedConfig& cfg = {});
Vec embed_text(const std::vector<std::string>& tokens, const EmbedConfig& cfg = {});
/// Tokenizes free text (intents) the same way OCR tokens are produced.
Vec embed_intent(std::string_view intent, const EmbedConfig& cfg = {});
StateEmbedding embed_state(const Screen& screen, const EmbedConfig& cfg = {});

/// dot(a, b) / (|a| |b|), clamped to [0, 1] against rounding; 0 when either side is all-zero.
double cosine(const Vec& a, const Vec& b);

/// L2-normalize in place; all-zero stays all-zero.
void normalize(Vec& v);

/// Tokens whose text buckets collide under cfg; empty when collision-free.
std::vector<std::pair<std::string, std::string>> text_collisions(const std::vector<std::string>& vocabulary,
                                                                  const EmbedConfig& cfg);

}  // namespace deskrl
