#pragma once

#include <array>
#include <cstdint>

namespace srw::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++; state expanded from the seed with splitmix64
class Stream {
 public:
  explicit Stream(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform strictly inside (0, 1); 53-bit resolution
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_;
};

// Independent stream for one path: the master seed and the path index are
// mixed before the splitmix expansion, so stream assignment depends only on
// (seed, path) and never on scheduling.
inline Stream pathStream(std::uint64_t masterSeed, std::uint64_t pathIndex) {
  std::uint64_t sm = masterSeed;
  const std::uint64_t base = splitmix64(sm);
  return Stream(base ^ (0xD1B54A32D192ED03ULL * (pathIndex + 1)));
}

}  // namespace srw::rng
