#include "pcvx3/aniso_scale.hpp"

#include <cmath>

#include "pcvx3/error.hpp"
#include "pcvx3/fit.hpp"
#include "pcvx3/kernels.hpp"

namespace pcvx3 {

WeightVector::WeightVector(std::vector<int> d) : d_(std::move(d)) {
  if (d_.empty()) throw Error(ErrorKind::InvalidArgument, "weight vector is empty");
  for (int v : d_)
    if (v < 1) throw Error(ErrorKind::InvalidArgument, "weights must be positive integers");
}

int WeightVector::key_weight(const ExponentKey& key) const {
  if (d_.size() != 3)
    throw Error(ErrorKind::InvalidArgument, "jet weights address (z2, z2bar, t): need 3 entries");
  return d_[0] * key[Var::z2] + d_[1] * key[Var::z2bar] + d_[2] * key[Var::t];
}

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::NonpositiveDelta, "dilation parameter must be > 0");
}

void check_fiber_weights(const WeightVector& w) {
  if (w.size() != 3 || w[0] != w[1])
    throw Error(ErrorKind::InvalidArgument,
                "fiber dilation needs weights (d, d, d_t) so that z2 scales complex-linearly");
}

}  // namespace

std::vector<double> dilate(std::span<const double> y, double delta, const WeightVector& w) {
  check_delta(delta);
  if (y.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "dilate: dimension mismatch");
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = std::pow(delta, w[j]) * y[j];
  return out;
}

double aniso_norm(std::span<const double> y, const WeightVector& w) {
  if (y.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "aniso_norm: dimension mismatch");
  double n = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j)
    n = std::max(n, std::pow(std::abs(y[j]), 1.0 / w[j]));
  return n;
}

Point5 dilate_fiber(const Point5& p, double delta, const WeightVector& w) {
  check_delta(delta);
  check_fiber_weights(w);
  return {p.z1, std::pow(delta, w[0]) * p.z2, std::pow(delta, w[2]) * p.t};
}

double fiber_norm(const Point5& p, const WeightVector& w) {
  check_fiber_weights(w);
  return std::max(std::pow(std::abs(p.z2), 1.0 / w[0]), std::pow(std::abs(p.t), 1.0 / w[2]));
}

Jet aniso_taylor(const Jet& g, const WeightVector& w, int ell) {
  Jet r(g.trunc_degree(), g.real_flag());
  for (const auto& [k, c] : g.terms())
    if (w.key_weight(k) <= ell) r.add_term(k, c);
  return r;
}

double aniso_taylor_remainder_constant(const Jet& g, const WeightVector& w, int ell) {
  double s = 0.0;
  for (const auto& [k, c] : g.terms())
    if (w.key_weight(k) > ell) s += std::abs(c);
  return s;
}

Jet scaling_limit(const Jet& f, const WeightVector& w, int ell, double tol) {
  const double cut = vanish_threshold(f, tol);
  Jet r(f.trunc_degree(), f.real_flag());
  for (const auto& [k, c] : f.terms()) {
    const int kw = w.key_weight(k);
    if (kw < ell && std::abs(c) > cut)
      throw Error(ErrorKind::HypothesisViolated,
                  "key " + k.to_string() + " has weight " + std::to_string(kw) + " < " +
                      std::to_string(ell) + " and coefficient magnitude " + std::to_string(std::abs(c)));
    if (kw == ell) r.add_term(k, c);
  }
  return r;
}

Jet derive_multi(const Jet& j, const ExponentKey& orders) {
  Jet r = j;
  for (int v = 0; v < 5; ++v)
    if (orders.e[v] > 0) r = wirtinger_derive(r, static_cast<Var>(v), orders.e[v]);
  return r;
}

ScalingProbeReport scaling_convergence_probe(const Jet& f, const WeightVector& w, int ell,
                                             std::span<const double> deltas,
                                             std::span<const Point5> samples,
                                             const ExponentKey& deriv, double tol) {
  check_fiber_weights(w);
  for (double d : deltas) check_delta(d);
  const Jet limit = scaling_limit(f, w, ell, tol);

  const JetEvaluator fd(derive_multi(f, deriv));
  const JetEvaluator ld(derive_multi(limit, deriv));
  kernels::ScalingProbeInput in;
  in.f_deriv = &fd;
  in.limit_deriv = &ld;
  in.weight_z2 = w[0];
  in.weight_t = w[2];
  in.exponent_shift = -ell + w.key_weight(deriv);

  ScalingProbeReport rep;
  if (samples.empty()) return rep;
  rep.deltas.assign(deltas.begin(), deltas.end());
  rep.max_deviation = kernels::omp::scaling_max_deviation(in, deltas, samples);

  // Deviations at rounding level count as zero and stay out of the fit.
  double scale = 1.0;
  for (const Point5& p : samples) scale = std::max(scale, std::abs(ld(p)));
  const double floor = 1e-12 * scale;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < rep.deltas.size(); ++i)
    if (rep.max_deviation[i] > floor) {
      xs.push_back(rep.deltas[i]);
      ys.push_back(rep.max_deviation[i]);
    }
  if (xs.size() >= 2) {
    try {
      rep.fitted_rate = fit_loglog(xs, ys).slope;
    } catch (const Error&) {
      rep.fitted_rate.reset();
    }
  }
  return rep;
}

}  // namespace pcvx3
