#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pcvx3 {

// Halton sequence in up to 8 dimensions with a Cranley-Patterson rotation
// drawn from `seed`; the same seed reproduces the same stream.
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  int dim() const { return dim_; }
  std::uint64_t index() const { return index_; }

  // Writes the next point into out[0..dim).
  void next(std::span<double> out);

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<double> shift_;
};

double radical_inverse(std::uint64_t i, unsigned base);

}  // namespace pcvx3
