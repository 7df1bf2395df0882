#include "deskrl/embed.hpp"

#include <algorithm>
#include <map>

namespace deskrl {

std::uint64_t hash_token(std::string_view token, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ mix64(seed));
}

int text_bucket(std::string_view token, const EmbedConfig& cfg) {
  return static_cast<int>(hash_token(token, cfg.hash_seed) % static_cast<std::uint64_t>(cfg.dim_text));
}

void normalize(Vec& v) {
  const double n = v.norm();
  if (n > 0) v /= n;
}

Vec embed_visual(const Screen& screen, const EmbedConfig& cfg) {
  Vec v = Vec::Zero(cfg.dim_visual);
  const std::uint64_t salt = mix64(cfg.hash_seed ^ 0x5649535541ULL);
  for (std::size_t i = 0; i < screen.cells.size(); ++i) {
    const std::uint64_t key = (static_cast<std::uint64_t>(i) << 8) | screen.cells[i].color;
    v[static_cast<Eigen::Index>(mix64(key ^ salt) % static_cast<std::uint64_t>(cfg.dim_visual))] += 1.0;
  }
  normalize(v);
  return v;
}

Vec embed_text(const std::vector<std::string>& tokens, const EmbedConfig& cfg) {
  Vec v = Vec::Zero(cfg.dim_text);
  for (const auto& t : tokens) v[text_bucket(t, cfg)] += 1.0;
  normalize(v);
  return v;
}

Vec embed_intent(std::string_view intent, const EmbedConfig& cfg) {
  return embed_text(tokenize(intent), cfg);
}

StateEmbedding embed_state(const Screen& screen, const EmbedConfig& cfg) {
  return {embed_visual(screen, cfg), embed_text(ocr_tokens(screen), cfg)};
}

double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of vectors with sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), 0.0, 1.0);
}

std::vector<std::pair<std::string, std::string>> text_collisions(const std::vector<std::string>& vocabulary,
                                                                  const EmbedConfig& cfg) {
  std::map<int, std::string> seen;
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& t : vocabulary) {
    auto [it, fresh] = seen.emplace(text_bucket(t, cfg), t);
    if (!fresh && it->second != t) out.emplace_back(it->second, t);
  }
  return out;
}

}  // namespace deskrl
