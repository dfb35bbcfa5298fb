#pragma once
#include <cstdint>

namespace tcdiff {

// Deterministic splittable RNG. Streams derived via fork() are independent of
// each other and of the parent's future output, so per-sample work can be
// reordered or parallelized without changing any draw.
//
// Generator: xoshiro256++ seeded through splitmix64. Normals use Box-Muller
// (not std::normal_distribution, whose draw sequence is implementation
// defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                  // [0,1)
  double uniform(double a, double b);
  double normal();                   // N(0,1)
  std::uint64_t uniform_index(std::uint64_t n);  // {0,...,n-1}

  // Child stream labeled by `label`; deterministic function of the seed this
  // stream was constructed with, not of how many draws were made.
  RngStream fork(std::uint64_t label) const;
  RngStream fork(std::uint64_t a, std::uint64_t b) const { return fork(a).fork(b); }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  double cached_normal_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace tcdiff
