// Reference implementations: straightforward loops, no blocking, no threads.

#include <cmath>

#include "pcvx3/kernels.hpp"
#include "pcvx3/levi.hpp"

namespace pcvx3::kernels::serial {

std::vector<double> scaling_max_deviation(const ScalingProbeInput& in,
                                          std::span<const double> deltas,
                                          std::span<const Point5> samples) {
  std::vector<double> out(deltas.size(), 0.0);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double delta = deltas[i];
    const double scale = std::pow(delta, in.exponent_shift);
    const double sz = std::pow(delta, in.weight_z2);
    const double st = std::pow(delta, in.weight_t);
    for (const Point5& p : samples) {
      const Point5 q{p.z1, sz * p.z2, st * p.t};
      const double dev = std::abs(scale * (*in.f_deriv)(q) - (*in.limit_deriv)(p));
      if (dev > out[i]) out[i] = dev;
    }
  }
  return out;
}

std::vector<double> levi_min_eigenvalues(const LeviForm& form, std::span<const Point5> grid,
                                         LeviMatrix which) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto h = which == LeviMatrix::Levi ? form.matrix_at(grid[i]) : form.hessian_at(grid[i]);
    out[i] = h.min_eigenvalue();
  }
  return out;
}

Eigen::MatrixXcd gram(const BasisSet& basis, const SampleSet& samples) {
  const std::size_t n = basis.size();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  std::vector<cplx> v(n);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    basis.evaluate(samples.points[s], v);
    const double w = samples.weights[s];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) += w * std::conj(v[i]) * v[j];
  }
  if (samples.drawn > 0) g /= static_cast<double>(samples.drawn);
  return g;
}

}  // namespace pcvx3::kernels::serial
