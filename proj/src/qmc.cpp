#include "pcvx3/qmc.hpp"

#include <random>

#include "pcvx3/error.hpp"

namespace pcvx3 {

namespace {
constexpr unsigned kPrimes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
}

double radical_inverse(std::uint64_t i, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim), shift_(dim) {
  if (dim < 1 || dim > 8) throw Error(ErrorKind::InvalidArgument, "Halton dimension must be in 1..8");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& s : shift_) s = u(rng);
}

void HaltonSequence::next(std::span<double> out) {
  ++index_;
  for (int d = 0; d < dim_; ++d) {
    double x = radical_inverse(index_, kPrimes[d]) + shift_[d];
    if (x >= 1.0) x -= 1.0;
    out[d] = x;
  }
}

}  // namespace pcvx3
