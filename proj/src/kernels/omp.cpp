#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pcvx3/kernels.hpp"
#include "pcvx3/levi.hpp"

namespace pcvx3::kernels {

namespace {
int g_default_threads = 0;
}

void set_max_threads(int n) {
#ifdef _OPENMP
  if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : g_default_threads);
#else
  (void)n;
  (void)g_default_threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int apply_thread_env() {
  const char* env = std::getenv("PCVX3_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int n = 0;
  try {
    n = std::stoi(env);
  } catch (const std::exception&) {
    return 0;
  }
  if (n > 0) set_max_threads(n);
  return n > 0 ? n : 0;
}

namespace omp {

std::vector<double> scaling_max_deviation(const ScalingProbeInput& in,
                                          std::span<const double> deltas,
                                          std::span<const Point5> samples) {
  const std::ptrdiff_t nd = static_cast<std::ptrdiff_t>(deltas.size());
  const std::ptrdiff_t ns = static_cast<std::ptrdiff_t>(samples.size());
  std::vector<double> out(deltas.size(), 0.0);
  if (nd == 0 || ns == 0) return out;
  double* res = out.data();

#pragma omp parallel for collapse(2) schedule(static) reduction(max : res[:nd])
  for (std::ptrdiff_t i = 0; i < nd; ++i) {
    for (std::ptrdiff_t s = 0; s < ns; ++s) {
      const double delta = deltas[i];
      const Point5& p = samples[s];
      const Point5 q{p.z1, std::pow(delta, in.weight_z2) * p.z2, std::pow(delta, in.weight_t) * p.t};
      const double dev =
          std::abs(std::pow(delta, in.exponent_shift) * (*in.f_deriv)(q) - (*in.limit_deriv)(p));
      if (dev > res[i]) res[i] = dev;
    }
  }
  return out;
}

std::vector<double> levi_min_eigenvalues(const LeviForm& form, std::span<const Point5> grid,
                                         LeviMatrix which) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
  std::vector<double> out(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto h = which == LeviMatrix::Levi ? form.matrix_at(grid[i]) : form.hessian_at(grid[i]);
    out[i] = h.min_eigenvalue();
  }
  return out;
}

Eigen::MatrixXcd gram(const BasisSet& basis, const SampleSet& samples) {
  // Chunks are dealt round-robin to a fixed number of slots; each slot sums its
  // chunks in index order and the slots are summed in order at the end.
  constexpr int kSlots = 16;
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  const std::size_t total = samples.size();
  const std::size_t nchunks = (total + kGramChunk - 1) / kGramChunk;
  std::vector<Eigen::MatrixXcd> slot(kSlots);

#pragma omp parallel for schedule(dynamic, 1)
  for (int sl = 0; sl < kSlots; ++sl) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(kGramChunk), n);
    std::vector<cplx> v(basis.size());
    for (std::size_t c = sl; c < nchunks; c += kSlots) {
      const std::size_t begin = c * kGramChunk;
      const std::size_t end = std::min(total, begin + kGramChunk);
      const Eigen::Index rows = static_cast<Eigen::Index>(end - begin);
      for (std::size_t s = begin; s < end; ++s) {
        basis.evaluate(samples.points[s], v);
        const double sw = std::sqrt(samples.weights[s]);
        const Eigen::Index r = static_cast<Eigen::Index>(s - begin);
        for (Eigen::Index i = 0; i < n; ++i) a(r, i) = sw * v[i];
      }
      acc.selfadjointView<Eigen::Lower>().rankUpdate(a.topRows(rows).adjoint());
    }
    slot[sl] = std::move(acc);
  }

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& s : slot) g += s;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) g(i, j) = std::conj(g(j, i));
  if (samples.drawn > 0) g /= static_cast<double>(samples.drawn);
  return g;
}

}  // namespace omp
}  // namespace pcvx3::kernels
