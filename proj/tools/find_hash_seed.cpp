// Searches for the first hash seed under which the bundled vocabulary maps to
// distinct text buckets.
#include <cstdint>
#include <cstdlib>
#include <iostream>

#include "deskrl/agent.hpp"
#include "deskrl/embed.hpp"

int main(int argc, char** argv) {
  const int dim = argc > 1 ? std::atoi(argv[1]) : 256;
  const std::uint64_t limit = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 100000000ULL;
  const auto vocab = deskrl::bundled_vocabulary(*deskrl::default_world());
  std::cerr << vocab.size() << " tokens, " << dim << " buckets\n";

  for (std::uint64_t seed = 0; seed < limit; ++seed) {
    deskrl::EmbedConfig cfg;
    cfg.dim_text = dim;
    cfg.hash_seed = seed;
    std::vector<bool> used(static_cast<std::size_t>(dim));
    bool ok = true;
    for (const auto& t : vocab) {
      const auto b = static_cast<std::size_t>(deskrl::text_bucket(t, cfg));
      if (used[b]) {
        ok = false;
        break;
      }
      used[b] = true;
    }
    if (ok) {
      std::cout << seed << "\n";
      return 0;
    }
  }
  std::cerr << "no seed found\n";
  return 1;
}
