#pragma once

// Anisotropic dilations D_δ y = (δ^{d_1} y_1, ..., δ^{d_q} y_q), the
// homogeneous norm N(y) = max_j |y_j|^{1/d_j}, weighted Taylor truncation and
// scaling limits of jets.
//
// On jets the weights address the fiber variables (z2, z̄2, t); z1 and z̄1
// are parameters and are never rescaled.

#include <optional>
#include <span>
#include <vector>

#include "pcvx3/jet.hpp"

namespace pcvx3 {

class WeightVector {
 public:
  explicit WeightVector(std::vector<int> d);

  std::size_t size() const { return d_.size(); }
  int operator[](std::size_t i) const { return d_[i]; }
  const std::vector<int>& values() const { return d_; }

  // Weighted degree d·(c, d, e) of a jet key; needs q = 3.
  int key_weight(const ExponentKey& key) const;

 private:
  std::vector<int> d_;
};

std::vector<double> dilate(std::span<const double> y, double delta, const WeightVector& w);
double aniso_norm(std::span<const double> y, const WeightVector& w);

// Fiber versions on evaluation points: z2 scales by δ^{d_1}, t by δ^{d_3}.
// They need d_1 = d_2 so that the dilation is complex-linear in z2; the norm
// uses |z2| in place of max(|Re z2|, |Im z2|) (an equivalent norm).
Point5 dilate_fiber(const Point5& p, double delta, const WeightVector& w);
double fiber_norm(const Point5& p, const WeightVector& w);

// Keeps exactly the keys with weighted degree <= ell.
Jet aniso_taylor(const Jet& g, const WeightVector& w, int ell);

// Sum of |coefficient| over the keys aniso_taylor drops: a constant C with
// |g - aniso_taylor(g)| <= C N^{ell+1} whenever N <= 1 and |z1| <= 1.
double aniso_taylor_remainder_constant(const Jet& g, const WeightVector& w, int ell);

// lim_{δ→0} δ^{-ell} f(x, D_δ y): the weight-ell part of f. Throws
// HypothesisViolated if a key of weight < ell is nonvanishing (relative tol).
Jet scaling_limit(const Jet& f, const WeightVector& w, int ell, double tol = kVanishRelative);

struct ScalingProbeReport {
  std::vector<double> deltas;
  std::vector<double> max_deviation;
  std::optional<double> fitted_rate;  // log-log slope; absent if < 2 usable rows
};

// For each δ, max over samples of
//   |δ^{-ell + d·β} (∂f)(x, D_δ y) - (∂f_0)(x, y)|
// where ∂ = ∂^α_x ∂^β_y is given by `deriv` ((a, b) address z1, z̄1).
ScalingProbeReport scaling_convergence_probe(const Jet& f, const WeightVector& w, int ell,
                                             std::span<const double> deltas,
                                             std::span<const Point5> samples,
                                             const ExponentKey& deriv = {},
                                             double tol = kVanishRelative);

// Applies ∂^{key} (z1, z̄1, z2, z̄2, t orders) to j.
Jet derive_multi(const Jet& j, const ExponentKey& orders);

}  // namespace pcvx3
