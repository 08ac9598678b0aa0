#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace topk {

// Seeded random source with platform-independent transforms. std::mt19937_64
// output is fully specified by the standard, but the std:: distributions are
// not, so every variate below is derived from raw engine output by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, bound). bound must be positive.
  std::size_t uniform_index(std::size_t bound);
  double normal();
  // Unit-scale gamma variate; shape must be positive.
  double gamma(double shape);
  // Index drawn with probability proportional to weights.
  std::size_t categorical(std::span<const double> weights);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Independent stream seed for (seed, stream) pairs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace topk
