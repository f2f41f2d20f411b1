#include <doctest.h>

#include <vector>

#include "pcvx3/aniso_scale.hpp"
#include "pcvx3/error.hpp"
#include "support.hpp"

using namespace pcvx3;
using testsupport::mono;

TEST_CASE("weight vectors reject nonpositive entries") {
  CHECK_THROWS_AS(WeightVector({1, 0, 2}), Error);
  CHECK_THROWS_AS(WeightVector(std::vector<int>{}), Error);
  CHECK(WeightVector({1, 1, 4}).key_weight({3, 2, 1, 2, 1}) == 7);
  CHECK_THROWS_AS(WeightVector({1, 2}).key_weight({}), Error);
}

TEST_CASE("dilate examples") {
  const std::vector<double> y{1, 1, 1};
  const auto d = dilate(y, 0.5, WeightVector({1, 1, 4}));
  CHECK(d[0] == 0.5);
  CHECK(d[1] == 0.5);
  CHECK(d[2] == 0.0625);

  const std::vector<double> y2{2, 3};
  CHECK(dilate(y2, 1.0, WeightVector({3, 5})) == y2);

  const WeightVector w({1, 2});
  const auto two = dilate(dilate(y2, 0.1, w), 0.1, w);
  const auto one = dilate(y2, 0.01, w);
  CHECK(two[0] == doctest::Approx(0.02));
  CHECK(two[1] == doctest::Approx(3e-4));
  CHECK(one[0] == doctest::Approx(two[0]));
  CHECK(one[1] == doctest::Approx(two[1]));

  CHECK_THROWS_AS(dilate(y, 0.0, WeightVector({1, 1, 1})), Error);
  try {
    dilate(y, -1.0, WeightVector({1, 1, 1}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonpositiveDelta);
  }
}

TEST_CASE("aniso_norm examples and homogeneity") {
  const WeightVector w({1, 2});
  const std::vector<double> y{0.5, 0.25};
  CHECK(aniso_norm(y, w) == doctest::Approx(0.5));
  CHECK(aniso_norm(std::vector<double>{0, 0}, w) == 0.0);
  const std::vector<double> y3{0.3, 0.09};
  CHECK(aniso_norm(y3, w) == doctest::Approx(0.3));
  CHECK(aniso_norm(dilate(y3, 2.0, w), w) == doctest::Approx(0.6));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2), ud(0.01, 3);
  const WeightVector w3({1, 3, 2});
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> v{u(rng), u(rng), u(rng)};
    const double delta = ud(rng);
    CHECK(aniso_norm(dilate(v, delta, w3), w3) == doctest::Approx(delta * aniso_norm(v, w3)).epsilon(1e-12));
  }
}

TEST_CASE("fiber dilation needs equal weights on z2 and its conjugate") {
  CHECK_THROWS_AS(dilate_fiber({}, 0.5, WeightVector({1, 2, 3})), Error);
  const Point5 p{cplx(0.1, 0.2), cplx(0.3, 0.4), 0.5};
  const WeightVector w({1, 1, 4});
  const Point5 q = dilate_fiber(p, 0.5, w);
  CHECK(q.z1 == p.z1);
  CHECK(std::abs(q.z2 - 0.5 * p.z2) < 1e-15);
  CHECK(q.t == doctest::Approx(0.5 / 16));
  CHECK(fiber_norm(q, w) == doctest::Approx(0.5 * fiber_norm(p, w)));
}

TEST_CASE("aniso_taylor examples") {
  const int T = 10;
  const WeightVector w114({1, 1, 4});
  const Jet g1 = mono(T, 0, 0, 1, 1, 0) + mono(T, 0, 0, 0, 0, 2);
  CHECK(approx_equal(aniso_taylor(g1, w114, 2), mono(T, 0, 0, 1, 1, 0), 0.0));

  CHECK(aniso_taylor(Jet::variable(T, Var::t), WeightVector({1, 1, 1}), 0).is_zero());

  const Jet g3 = mono(T, 0, 0, 2, 2, 0) + mono(T, 0, 0, 1, 0, 1);
  CHECK(approx_equal(aniso_taylor(g3, w114, 4), mono(T, 0, 0, 2, 2, 0), 0.0));
  CHECK(aniso_taylor_remainder_constant(g3, w114, 4) == 1.0);
}

TEST_CASE("scaling_limit examples") {
  const int T = 10;
  const Jet f = mono(T, 0, 0, 2, 2, 0) + mono(T, 0, 0, 2, 0, 1);
  CHECK(approx_equal(scaling_limit(f, WeightVector({1, 1, 4}), 4), mono(T, 0, 0, 2, 2, 0), 0.0));

  const Jet re3 = mono(T, 0, 0, 3, 0, 0).real_part();
  CHECK(approx_equal(scaling_limit(re3, WeightVector({1, 1, 3}), 3), re3, 0.0));

  try {
    scaling_limit(mono(T, 0, 0, 1, 1, 0), WeightVector({1, 1, 4}), 4);
    FAIL("expected HypothesisViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HypothesisViolated);
    CHECK(std::string(e.what()).find("0,0,1,1,0") != std::string::npos);
  }
}

TEST_CASE("scaling_limit keeps z1 dependence and is idempotent") {
  const int T = 12;
  const Jet f = mono(T, 2, 1, 1, 2, 0) + mono(T, 1, 0, 0, 0, 1) + mono(T, 0, 3, 4, 0, 0);
  const WeightVector w({1, 1, 3});
  const Jet lim = scaling_limit(f, w, 3);
  CHECK(approx_equal(lim, mono(T, 2, 1, 1, 2, 0) + mono(T, 1, 0, 0, 0, 1), 0.0));
  CHECK(approx_equal(scaling_limit(lim, w, 3), lim, 0.0));
}

TEST_CASE("Taylor remainder bound at random samples") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  const WeightVector w({1, 1, 2});
  for (int fx = 0; fx < 10; ++fx) {
    const Jet g = testsupport::random_jet(10, 25, 8, rng, false);
    for (int ell = 0; ell <= 6; ell += 2) {
      const Jet gt = aniso_taylor(g, w, ell);
      const double c = aniso_taylor_remainder_constant(g, w, ell);
      for (int s = 0; s < 300; ++s) {
        Point5 p{cplx(u(rng), u(rng)) * 0.7, cplx(u(rng), u(rng)) * 0.7, u(rng)};
        if (std::abs(p.z1) > 1.0) continue;
        const double n = fiber_norm(p, w);
        if (n > 1.0) continue;
        const double lhs = std::abs(jet_eval(g, p) - jet_eval(gt, p));
        CHECK(lhs <= c * std::pow(n, ell + 1) * (1 + 1e-12) + 1e-14);
      }
    }
  }
}

TEST_CASE("scaling probe: homogeneous input has zero deviation") {
  const int T = 10;
  const Jet f = mono(T, 1, 0, 2, 2, 0) + mono(T, 0, 0, 0, 0, 1, 3.0);
  std::vector<Point5> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({cplx(0.1 * i, 0.05), cplx(0.3, -0.02 * i), 0.01 * i});
  const std::vector<double> deltas{0.5, 0.1, 0.01};
  const auto rep = scaling_convergence_probe(f, WeightVector({1, 1, 4}), 4, deltas, pts);
  for (double d : rep.max_deviation) CHECK(d < 1e-12);
  CHECK_FALSE(rep.fitted_rate.has_value());
}

TEST_CASE("scaling probe: weight-5 perturbation decays linearly") {
  const int T = 10;
  const Jet f = mono(T, 0, 0, 2, 2, 0) + mono(T, 0, 0, 3, 2, 0);
  std::vector<Point5> pts;
  double max5 = 0.0;
  for (int i = 0; i < 40; ++i) {
    const Point5 p{0.0, std::polar(0.2 + 0.02 * i, 0.3 * i), 0.0};
    pts.push_back(p);
    max5 = std::max(max5, std::pow(std::abs(p.z2), 5));
  }
  const std::vector<double> deltas{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  const auto rep = scaling_convergence_probe(f, WeightVector({1, 1, 4}), 4, deltas, pts);
  for (std::size_t i = 0; i < deltas.size(); ++i)
    CHECK(rep.max_deviation[i] == doctest::Approx(deltas[i] * max5).epsilon(1e-10));
  REQUIRE(rep.fitted_rate.has_value());
  CHECK(*rep.fitted_rate == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scaling probe with a derivative uses the shifted exponent") {
  const int T = 12;
  const Jet f = mono(T, 0, 0, 2, 2, 0) + mono(T, 0, 0, 0, 0, 1) + mono(T, 0, 0, 1, 0, 1);
  std::vector<Point5> pts;
  for (int i = 0; i < 25; ++i) pts.push_back({cplx(0.1, 0.0), std::polar(0.5, 0.25 * i), 0.3 - 0.02 * i});
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3};
  const auto rep = scaling_convergence_probe(f, WeightVector({1, 1, 4}), 4, deltas, pts, {0, 0, 0, 0, 1});
  REQUIRE(rep.fitted_rate.has_value());
  CHECK(*rep.fitted_rate >= 0.9);
}

TEST_CASE("scaling probe: empty samples give an empty report") {
  const Jet f = mono(6, 0, 0, 2, 2, 0);
  const std::vector<double> deltas{0.1};
  const auto rep = scaling_convergence_probe(f, WeightVector({1, 1, 4}), 4, deltas, {});
  CHECK(rep.deltas.empty());
  CHECK(rep.max_deviation.empty());
}

TEST_CASE("scaling probe propagates the hypothesis check") {
  const std::vector<double> deltas{0.1};
  std::vector<Point5> pts{{}};
  CHECK_THROWS_AS(scaling_convergence_probe(mono(6, 0, 0, 1, 1, 0), WeightVector({1, 1, 4}), 4, deltas, pts),
                  Error);
}
