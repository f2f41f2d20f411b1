#pragma once

// Data-parallel inner loops. Each kernel has a serial reference version and
// an OpenMP version; the OpenMP versions reduce over fixed-size chunks in a
// fixed order, so their output does not depend on the thread count.

#include <Eigen/Core>
#include <span>
#include <vector>

#include "pcvx3/bergman.hpp"
#include "pcvx3/jet.hpp"

namespace pcvx3 {
class LeviForm;
}

namespace pcvx3::kernels {

// Caps OpenMP parallelism (no-op without OpenMP). n <= 0 restores the default.
void set_max_threads(int n);
int max_threads();
// Reads PCVX3_THREADS and applies it; returns the value used (0 if unset).
int apply_thread_env();

enum class LeviMatrix { Levi, Hessian };

struct ScalingProbeInput {
  const JetEvaluator* f_deriv = nullptr;      // ∂f
  const JetEvaluator* limit_deriv = nullptr;  // ∂f_0
  int weight_z2 = 1;
  int weight_t = 1;
  int exponent_shift = 0;  // -ell + d·β
};

inline constexpr std::size_t kGramChunk = 2048;

namespace serial {
std::vector<double> scaling_max_deviation(const ScalingProbeInput& in,
                                          std::span<const double> deltas,
                                          std::span<const Point5> samples);
std::vector<double> levi_min_eigenvalues(const LeviForm& form, std::span<const Point5> grid,
                                         LeviMatrix which);
Eigen::MatrixXcd gram(const BasisSet& basis, const SampleSet& samples);
}  // namespace serial

namespace omp {
std::vector<double> scaling_max_deviation(const ScalingProbeInput& in,
                                          std::span<const double> deltas,
                                          std::span<const Point5> samples);
std::vector<double> levi_min_eigenvalues(const LeviForm& form, std::span<const Point5> grid,
                                         LeviMatrix which);
Eigen::MatrixXcd gram(const BasisSet& basis, const SampleSet& samples);
}  // namespace omp

}  // namespace pcvx3::kernels
