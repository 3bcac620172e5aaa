#pragma once

#include <cstdint>
#include <string_view>

namespace patscape {

// SplitMix64 stream with hand-written distributions, so draws are identical on
// every platform and standard library. split() derives an independent child
// stream from a label without advancing the parent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  Rng split(std::string_view label) const;

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive
  double normal(double mean = 0.0, double sd = 1.0);
  double lognormal(double mu, double sigma);
  bool bernoulli(double p);
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

}  // namespace patscape
