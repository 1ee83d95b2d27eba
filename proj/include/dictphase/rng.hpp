#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace dictphase {

// Version tag written into every report that depends on random draws.
inline constexpr std::string_view kGeneratorVersion = "philox4x32-10/boxmuller-v1";

// Stream identifiers keep independent consumers of one seed apart.
enum class Stream : std::uint64_t {
  kEnsemble = 1,
  kFrame = 2,
  kNoise = 3,
  kSignal = 4,
  kRestart = 5,
  kProbe = 6,
  kSubset = 7,
};

// Philox4x32-10 counter-based block function.
// block(i) is a pure function of (seed, stream, i).
class Philox4x32 {
 public:
  Philox4x32(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::array<std::uint32_t, 4> block(std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Sequential view over a Philox stream with uniform/normal helpers.
// The normal variate uses Box-Muller on consecutive uniforms so the output
// does not depend on the standard library's distribution implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, Stream stream);
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n);
  // +1 or -1 with equal probability.
  double sign();
  // k distinct indices from [0, n), ascending.
  std::vector<int> subset(int n, int k);

 private:
  Philox4x32 gen_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with any number of integer tags (splitmix64 chain).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace dictphase
