#include "cbtail/rng.hpp"

#include <vector>

namespace cbtail {

Engine make_stream(std::uint64_t master_seed,
                   std::initializer_list<std::uint64_t> path) {
  return make_stream(master_seed,
                     std::span<const std::uint64_t>(path.begin(), path.size()));
}

Engine make_stream(std::uint64_t master_seed, std::span<const std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 2));
  auto push = [&words](std::uint64_t w) {
    words.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(w >> 32));
  };
  push(master_seed);
  // Path length is mixed in so (a) and (a, 0) give different streams.
  push(path.size());
  for (auto w : path) push(w);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

}  // namespace cbtail
