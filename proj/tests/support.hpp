#pragma once

// Test-side helpers: an independent dense polynomial model used as an oracle
// against the jet engine, and random fixture generators.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <random>
#include <tuple>

#include "pcvx3/jet.hpp"

namespace testsupport {

using pcvx3::cplx;
using pcvx3::ExponentKey;
using pcvx3::Jet;
using pcvx3::Var;

// Plain polynomial in (z1, z̄1, z2, z̄2, t) with no truncation and no pruning.
struct OPoly {
  std::map<std::array<int, 5>, cplx> c;

  static OPoly from_jet(const Jet& j) {
    OPoly p;
    for (const auto& [k, v] : j.terms()) p.c[k.e] += v;
    return p;
  }

  OPoly derive(int var, int n = 1) const {
    OPoly r;
    for (const auto& [e, v] : c) {
      if (e[var] < n) continue;
      double f = 1.0;
      for (int i = 0; i < n; ++i) f *= e[var] - i;
      auto e2 = e;
      e2[var] -= n;
      r.c[e2] += v * f;
    }
    return r;
  }

  // Value at z2 = t = 0 as a polynomial in (z1, z̄1).
  OPoly on_curve() const {
    OPoly r;
    for (const auto& [e, v] : c)
      if (e[2] == 0 && e[3] == 0 && e[4] == 0) r.c[e] += v;
    return r;
  }

  bool is_zero(double tol) const {
    for (const auto& [e, v] : c)
      if (std::abs(v) > tol) return false;
    return true;
  }

  cplx eval(cplx z1, cplx z2, double t) const {
    cplx s = 0.0;
    for (const auto& [e, v] : c)
      s += v * std::pow(z1, e[0]) * std::pow(std::conj(z1), e[1]) * std::pow(z2, e[2]) *
           std::pow(std::conj(z2), e[3]) * std::pow(t, e[4]);
    return s;
  }
};

// Lowest-order nonvanishing mixed curve derivative of a t-free polynomial:
// (order, j0, k0) with j0 smallest at that order.
inline std::optional<std::tuple<int, int, int>> oracle_first_mixed(const OPoly& p, int max_order,
                                                                  double tol = 1e-9) {
  for (int s = 2; s <= max_order; ++s)
    for (int j = 1; j < s; ++j)
      if (!p.derive(2, j).derive(3, s - j).on_curve().is_zero(tol)) return std::make_tuple(s, j, s - j);
  return std::nullopt;
}

inline cplx rand_c(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double re = u(rng);
  return {re, u(rng)};
}

// Holomorphic polynomial in z1 of degree <= deg with random coefficients.
inline Jet random_holo_z1(int trunc, int deg, std::mt19937_64& rng, double scale = 1.0) {
  Jet j(trunc);
  for (int a = 0; a <= deg; ++a) j.add_term({a, 0, 0, 0, 0}, rand_c(rng, scale));
  return j;
}

inline Jet mono(int trunc, int a, int b, int c, int d, int e, cplx v = 1.0) {
  return Jet::monomial(trunc, ExponentKey(a, b, c, d, e), v);
}

// Random jet with `n` terms of total degree <= maxdeg (real part taken if real).
inline Jet random_jet(int trunc, int n, int maxdeg, std::mt19937_64& rng, bool real) {
  std::uniform_int_distribution<int> var(0, 4);
  std::uniform_int_distribution<int> deg(0, maxdeg);
  Jet j(trunc);
  for (int i = 0; i < n; ++i) {
    ExponentKey k;
    const int d = deg(rng);
    for (int s = 0; s < d; ++s) k.e[var(rng)] += 1;
    j.add_term(k, rand_c(rng));
  }
  if (real) j = j.real_part().with_real_flag(true);
  return j;
}

// Pseudoconvex stage-1 fixture of type 2k:
//   ψ = |z2^k (1 + b z1 + c z2)|^2 + |z2^{k+1} g(z1)|^2 + A t^2
// seen through the holomorphic chart change z3 ↦ z3 + P(z1, z2) with P of
// z2-degree >= 2, i.e. φ(z, t) = ψ(z, t − Im P) + Re P.
struct PshFixture {
  Jet phi;
  Jet psi;  // t-free part before the chart change
  int k = 1;
};

inline PshFixture psh_fixture(int k, std::mt19937_64& rng, int trunc = 0, bool with_chart = true) {
  if (trunc == 0) trunc = 4 * k + 4;
  PshFixture f;
  f.k = k;
  Jet h = mono(trunc, 0, 0, k, 0, 0) *
          (Jet::constant(trunc, 1.0) + mono(trunc, 1, 0, 0, 0, 0, rand_c(rng, 0.5)) +
           mono(trunc, 0, 0, 1, 0, 0, rand_c(rng, 0.5)));
  Jet g = mono(trunc, 0, 0, k + 1, 0, 0) * random_holo_z1(trunc, 1, rng, 0.5);
  f.psi = (h * h.conj() + g * g.conj()).with_real_flag(true);
  std::uniform_real_distribution<double> ua(0.1, 2.0);
  Jet base = f.psi + mono(trunc, 0, 0, 0, 0, 2, ua(rng));
  base.set_real_flag(true);
  if (!with_chart) {
    f.phi = base;
    return f;
  }
  Jet p(trunc);
  for (int j = 2; j <= 2 * k + 1; ++j) p += mono(trunc, 0, 0, j, 0, 0) * random_holo_z1(trunc, 2, rng, 0.7);
  f.phi = pcvx3::substitute_t(base, -p.imag_part()) + p.real_part();
  f.phi.set_real_flag(true);
  f.phi.prune();
  return f;
}

// Random holomorphic polynomial in (z1, z2) of total degree <= deg.
inline Jet random_holo(int trunc, int deg, std::mt19937_64& rng, double scale = 1.0) {
  Jet j(trunc);
  for (int a = 0; a <= deg; ++a)
    for (int c = 0; a + c <= deg; ++c) j.add_term({a, 0, c, 0, 0}, rand_c(rng, scale));
  return j;
}

// t-free real polynomial: sum of squares of holomorphic polynomials plus a
// pluriharmonic part, minus (half of the time) a square of a linear form.
// Roughly half of these are plurisubharmonic near 0.
inline Jet random_t_free_fixture(int trunc, std::mt19937_64& rng) {
  Jet h1 = random_holo(trunc, 2, rng), h2 = random_holo(trunc, 2, rng);
  Jet g = random_holo(trunc, 3, rng);
  Jet phi = h1 * h1.conj() + h2 * h2.conj() + g.real_part();
  std::bernoulli_distribution coin(0.5);
  if (coin(rng)) {
    Jet q = random_holo(trunc, 1, rng);
    q.add_term({}, -q.coeff({}));
    std::uniform_real_distribution<double> lam(0.5, 3.0);
    phi -= lam(rng) * (q * q.conj());
  }
  phi = phi.real_part().with_real_flag(true);
  return phi;
}

}  // namespace testsupport
