#include <doctest.h>

#include <random>

#include "pcvx3/aniso_scale.hpp"
#include "pcvx3/kernels.hpp"
#include "pcvx3/levi.hpp"
#include "support.hpp"

using namespace pcvx3;

namespace {

std::vector<Point5> random_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Point5> pts(n);
  for (auto& p : pts) p = {cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), u(rng)};
  return pts;
}

struct ThreadGuard {
  ~ThreadGuard() { kernels::set_max_threads(0); }
};

}  // namespace

TEST_CASE("scaling probe: serial and OpenMP agree bitwise") {
  using testsupport::mono;
  const Jet f = mono(10, 0, 0, 2, 2, 0) + mono(10, 1, 0, 3, 2, 0) + mono(10, 0, 0, 1, 0, 1);
  const WeightVector w({1, 1, 4});
  const Jet lim = scaling_limit(f, w, 4);
  const JetEvaluator fd(f), ld(lim);
  kernels::ScalingProbeInput in{&fd, &ld, 1, 4, -4};
  const auto pts = random_points(5000, 1);
  const std::vector<double> deltas{0.3, 0.1, 0.01, 1e-3};
  const auto a = kernels::serial::scaling_max_deviation(in, deltas, pts);
  ThreadGuard g;
  for (int t : {1, 2, 4}) {
    kernels::set_max_threads(t);
    CHECK(kernels::omp::scaling_max_deviation(in, deltas, pts) == a);
  }
}

TEST_CASE("Levi and Hessian eigenvalue scans: serial and OpenMP agree bitwise") {
  std::mt19937_64 rng(2);
  const Jet phi = testsupport::random_jet(8, 20, 6, rng, true);
  const LeviForm form(phi);
  const auto pts = random_points(3000, 3);
  ThreadGuard g;
  for (auto which : {kernels::LeviMatrix::Levi, kernels::LeviMatrix::Hessian}) {
    const auto a = kernels::serial::levi_min_eigenvalues(form, pts, which);
    REQUIRE(a.size() == pts.size());
    for (int t : {1, 3}) {
      kernels::set_max_threads(t);
      CHECK(kernels::omp::levi_min_eigenvalues(form, pts, which) == a);
    }
  }
}

TEST_CASE("Gram matrix: OpenMP is thread-count independent and matches serial") {
  const ModelDomain m{2.0, 1.0, 1.0};
  SamplePlan p;
  p.accepted = 3 * kernels::kGramChunk + 17;
  const auto s = draw_samples(m, p);
  BasisSpec spec;
  spec.degree_cap = 4;
  spec.pole_scales = {0.01, 0.1};
  const BasisSet basis(spec);
  const Eigen::MatrixXcd ref = kernels::serial::gram(basis, s);
  ThreadGuard g;
  kernels::set_max_threads(1);
  const Eigen::MatrixXcd one = kernels::omp::gram(basis, s);
  for (int t : {2, 4}) {
    kernels::set_max_threads(t);
    CHECK(kernels::omp::gram(basis, s) == one);
  }
  // Chunked summation changes rounding order only.
  CHECK((one - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  CHECK((ref - ref.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("thread cap round trip") {
  ThreadGuard g;
  kernels::set_max_threads(2);
  CHECK(kernels::max_threads() == 2);
}
