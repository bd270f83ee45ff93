#pragma once

// Counter-based random numbers. Every variate is a pure function of
// (seed, sample index, lane, tag, block), so results never depend on how
// samples are scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace gamma_lab {

/// Philox4x32-10 block function (Salmon et al., Random123).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kMul0 = 0xD2511F53U;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
      ctr = Counter{static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                    static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Named sub-stream seed: splitmix64 chain over (base, fnv1a64(label), i, j).
/// Cells of an experiment are reproducible in isolation from this rule.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t i = 0,
                                    std::uint64_t j = 0) noexcept {
  std::uint64_t s = splitmix64(base ^ fnv1a64(label));
  s = splitmix64(s ^ i);
  return splitmix64(s ^ (j * 0x9E3779B97F4A7C15ULL));
}

/// One logical stream of uniforms, keyed by the seed and addressed by
/// (sample, lane, tag). Successive Philox blocks advance the last counter word.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t sample, std::uint32_t lane, std::uint32_t tag = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        counter_{static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32), lane, tag << 24} {}

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    if (cursor_ == 2) refill();
    const std::uint64_t bits = (static_cast<std::uint64_t>(block_[2 * cursor_]) << 32) | block_[2 * cursor_ + 1];
    ++cursor_;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Box-Muller pair; both normals of a pair are used before drawing again.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Gamma(shape, 1) for shape >= 1. Integer shapes up to 16 use a sum of
  /// exponentials (-log of a product of uniforms); other shapes use the
  /// Marsaglia-Tsang squeeze/rejection method.
  double gamma(double shape) noexcept {
    if (shape <= 16.0 && shape == std::floor(shape)) {
      double prod = 1.0;
      for (int k = 0; k < static_cast<int>(shape); ++k) prod *= uniform();
      return -std::log(prod);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double z;
      double v;
      do {
        z = normal();
        v = 1.0 + c * z;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double z2 = z * z;
      if (u < 1.0 - 0.0331 * z2 * z2) return d * v;
      if (std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  void refill() noexcept {
    block_ = Philox4x32::generate(counter_, key_);
    ++counter_[3];
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  Philox4x32::Counter block_{};
  unsigned cursor_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gamma_lab
