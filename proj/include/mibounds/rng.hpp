#pragma once

#include <cstdint>
#include <limits>

namespace mibounds {

/// Counter-based generator: the i-th output is a pure function of (key, i).
///
/// The key is derived from a master seed and a stream index, so replicate r of
/// an experiment can be regenerated without touching replicates 0..r-1.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  std::uint64_t poisson(double lambda);
  bool bernoulli(double p);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);

/// Stream index for (outer, inner) pairs, e.g. (n-grid index, replicate).
std::uint64_t stream_id(std::uint64_t outer, std::uint64_t inner);

}  // namespace mibounds
