#pragma once

#include <cmath>
#include <cstdint>

namespace fairdiv {

// Stateless counter-based generator. Every draw is a pure function of
// (seed, stream, item, draw), so sampling is reproducible regardless of
// evaluation order and safe to fan out across workers.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t item,
                     std::uint32_t draw) const {
    std::uint64_t x = seed_;
    x = mix(x ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
    x = mix(x ^ (0xBF58476D1CE4E5B9ULL * (item + 1)));
    x = mix(x + 0x94D049BB133111EBULL * draw);
    return mix(x);
  }

  // uniform in [0, 1)
  double uniform(std::uint64_t stream, std::uint64_t item,
                 std::uint32_t draw) const {
    return static_cast<double>(bits(stream, item, draw) >> 11) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

// Neumaier compensated accumulator for order-stable reductions.
class Kahan {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace fairdiv
