#include "pcvx3/bergman.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pcvx3/error.hpp"
#include "pcvx3/fit.hpp"
#include "pcvx3/kernels.hpp"
#include "pcvx3/qmc.hpp"

namespace pcvx3 {

void ModelDomain::validate() const {
  if (!(tau > 0.0) || !(C > 0.0) || !(eps > 0.0))
    throw Error(ErrorKind::InvalidArgument, "model parameters tau, C, eps must be positive");
}

bool model_contains(const CPoint& p, const ModelDomain& m) {
  return p.z2.real() > m.C * std::pow(std::abs(p.z1), m.tau) + m.C * std::abs(p.z2.imag()) &&
         std::norm(p.z1) + std::norm(p.z2) < m.eps * m.eps;
}

bool domain_contains(const CPoint& p, const Domain& d) {
  if (const auto* m = std::get_if<ModelDomain>(&d)) return model_contains(p, *m);
  const auto& disc = std::get<DiscFixture>(d);
  return std::abs(p.z1) < disc.radius;
}

int complex_dim(const Domain& d) { return std::holds_alternative<ModelDomain>(d) ? 2 : 1; }

namespace {

std::string point_str(const CPoint& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.z1.real() << (p.z1.imag() < 0 ? "" : "+") << p.z1.imag() << "i, " << p.z2.real()
     << (p.z2.imag() < 0 ? "" : "+") << p.z2.imag() << "i)";
  return os.str();
}

}  // namespace

InclusionCheck bidisc_inclusion(double delta, const ModelDomain& m) {
  m.validate();
  if (!(delta > 0.0)) throw Error(ErrorKind::NonpositiveDelta, "bidisc parameter must be > 0");
  InclusionCheck out;
  const double r1 = std::pow(delta, 1.0 / m.tau);
  const double center = (2.0 * m.C + 1.0) * delta;
  // On the closed bidisc: C|z1|^τ + C|Im z2| <= 2Cδ and Re z2 >= 2Cδ, with
  // equality only on the boundary, so the open bidisc lies in Ω_{τ,C}.
  const double worst_rhs = m.C * std::pow(r1, m.tau) + m.C * delta;
  const double worst_re = center - delta;
  if (worst_rhs > 2.0 * m.C * delta * (1.0 + 1e-12) || worst_re < 2.0 * m.C * delta * (1.0 - 1e-12)) {
    out.corner = {r1, cplx(worst_re, delta)};
    out.failed = "model inequality";
    return out;
  }
  // Farthest point from the origin: |z1| = δ^{1/τ}, z2 = (2C+2)δ.
  out.corner = {r1, center + delta};
  if (r1 * r1 + (center + delta) * (center + delta) > m.eps * m.eps) {
    out.failed = "window |z1|^2 + |z2|^2 < eps^2";
    return out;
  }
  out.ok = true;
  return out;
}

double bidisc_delta_for_probe(double probe_delta, const ModelDomain& m) {
  return probe_delta / (2.0 * m.C + 1.0);
}

double kernel_upper_bound(double probe_delta, const ModelDomain& m) {
  const double d = bidisc_delta_for_probe(probe_delta, m);
  const auto inc = bidisc_inclusion(d, m);
  if (!inc.ok)
    throw Error(ErrorKind::InclusionFailed, "bidisc for probe delta " + std::to_string(probe_delta) +
                                                " fails (" + inc.failed + ") at corner " +
                                                point_str(inc.corner));
  return 1.0 / (4.0 * std::numbers::pi * std::numbers::pi * std::pow(d, 2.0 + 2.0 / m.tau));
}

double SampleSet::volume() const {
  if (drawn == 0) return 0.0;
  double s = 0.0;
  for (double w : weights) s += w;
  return s / static_cast<double>(drawn);
}

SampleSet draw_samples(const Domain& d, const SamplePlan& plan) {
  SampleSet out;
  if (plan.accepted == 0) return out;
  out.points.reserve(plan.accepted);
  out.weights.reserve(plan.accepted);
  const std::size_t max_draws = 100000 + 2000 * plan.accepted;

  if (const auto* disc = std::get_if<DiscFixture>(&d)) {
    const double r = disc->radius;
    HaltonSequence h(2, plan.seed);
    double u[2];
    const double w = 4.0 * r * r;
    while (out.points.size() < plan.accepted && out.drawn < max_draws) {
      h.next(u);
      ++out.drawn;
      const CPoint p{cplx((2 * u[0] - 1) * r, (2 * u[1] - 1) * r), 0.0};
      if (std::abs(p.z1) < r) {
        out.points.push_back(p);
        out.weights.push_back(w);
      }
    }
  } else {
    const auto& m = std::get<ModelDomain>(d);
    m.validate();
    HaltonSequence h(4, plan.seed);
    double u[4];
    const bool log_stretch = plan.sampler != SamplerKind::Box;
    if (log_stretch && !(plan.x_min > 0.0 && plan.x_min < m.eps))
      throw Error(ErrorKind::InvalidArgument, "x_min must lie in (0, eps)");
    const double log_range = std::log(m.eps / plan.x_min);
    const double box_r1 = std::min(m.eps, std::pow(m.eps / m.C, 1.0 / m.tau));
    const double box_h = std::min(m.eps, m.eps / m.C);
    const double box_w = 4.0 * box_r1 * box_r1 * m.eps * 2.0 * box_h;
    while (out.points.size() < plan.accepted && out.drawn < max_draws) {
      h.next(u);
      ++out.drawn;
      double x, hy, r, w;
      if (log_stretch) {
        x = plan.x_min * std::exp(log_range * u[0]);
        hy = std::min(x / m.C, m.eps);
        r = std::min(std::pow(x / m.C, 1.0 / m.tau), m.eps);
        w = x * log_range * 2.0 * hy * 4.0 * r * r;
      } else {
        x = m.eps * u[0];
        hy = box_h;
        r = box_r1;
        w = box_w;
      }
      const CPoint p{cplx((2 * u[2] - 1) * r, (2 * u[3] - 1) * r), cplx(x, (2 * u[1] - 1) * hy)};
      if (model_contains(p, m)) {
        out.points.push_back(p);
        out.weights.push_back(w);
      }
    }
  }
  if (out.points.size() < plan.accepted)
    throw Error(ErrorKind::DegenerateGram, "sampler could not reach the requested accepted count");
  return out;
}

SampleSet restrict_samples(const SampleSet& s, const ModelDomain& m) {
  SampleSet out;
  out.drawn = s.drawn;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (model_contains(s.points[i], m)) {
      out.points.push_back(s.points[i]);
      out.weights.push_back(s.weights[i]);
    }
  return out;
}

std::vector<double> default_pole_scales(std::span<const double> deltas) {
  if (deltas.empty()) return {};
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  std::vector<double> s;
  for (double v = *lo / 10.0; v <= *hi * (1.0 + 1e-9); v *= 10.0) s.push_back(v);
  return s;
}

BasisSet::BasisSet(BasisSpec spec) : spec_(std::move(spec)) {
  const int cap = spec_.degree_cap;
  if (cap < 0) throw Error(ErrorKind::InvalidArgument, "degree_cap must be >= 0");
  if (spec_.complex_dim != 1 && spec_.complex_dim != 2)
    throw Error(ErrorKind::InvalidArgument, "basis complex dimension must be 1 or 2");
  for (double s : spec_.pole_scales)
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "pole scales must be positive");

  if (spec_.complex_dim == 1) {
    for (int a = 0; a <= cap; ++a) terms_.push_back({a, 0, -1.0});
  } else {
    for (int deg = 0; deg <= cap; ++deg)
      for (int a = deg; a >= 0; --a) terms_.push_back({a, deg - a, -1.0});
    for (double s : spec_.pole_scales)
      for (int k = 1; k <= cap; ++k)
        for (int a = 0; a + k <= cap; ++a) terms_.push_back({a, k, s});
  }
  for (const auto& t : terms_) {
    max_a_ = std::max(max_a_, t.a);
    max_k_ = std::max(max_k_, t.k);
  }
}

void BasisSet::evaluate(const CPoint& p, std::span<cplx> out) const {
  const int na = max_a_ + 1;
  const int nk = max_k_ + 1;
  constexpr int kStack = 64;
  cplx pa[kStack], pz[kStack], pinv[kStack];
  if (na > kStack || nk > kStack) throw Error(ErrorKind::InvalidArgument, "degree_cap too large");
  pa[0] = pz[0] = 1.0;
  for (int i = 1; i < na; ++i) pa[i] = pa[i - 1] * p.z1;
  for (int i = 1; i < nk; ++i) pz[i] = pz[i - 1] * p.z2;
  double current_s = -2.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& t = terms_[i];
    if (t.s < 0.0) {
      out[i] = pa[t.a] * pz[t.k];
      continue;
    }
    if (t.s != current_s) {
      current_s = t.s;
      const cplx inv = 1.0 / (p.z2 + t.s);
      pinv[0] = 1.0;
      for (int j = 1; j < nk; ++j) pinv[j] = pinv[j - 1] * inv;
    }
    out[i] = pa[t.a] * pinv[t.k];
  }
}

OrthoBasis::OrthoBasis(BasisSet basis, Eigen::VectorXd scale, Eigen::MatrixXcd coeffs, GramReport report)
    : basis_(std::move(basis)), scale_(std::move(scale)), coeffs_(std::move(coeffs)), report_(report) {}

Eigen::VectorXcd OrthoBasis::raw_values(const CPoint& p) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(basis_.size()));
  basis_.evaluate(p, std::span<cplx>(v.data(), basis_.size()));
  return v.cwiseQuotient(scale_.cast<cplx>());
}

Eigen::VectorXcd OrthoBasis::values(const CPoint& p) const {
  return coeffs_.transpose() * raw_values(p);
}

double OrthoBasis::kernel_diag(const CPoint& p) const { return values(p).squaredNorm(); }

cplx OrthoBasis::kernel(const CPoint& z, const CPoint& w) const {
  return values(z).cwiseProduct(values(w).conjugate()).sum();
}

Eigen::MatrixXcd gram_matrix(const BasisSet& basis, const SampleSet& samples) {
  return kernels::omp::gram(basis, samples);
}

OrthoBasis gram_orthobasis(const BasisSet& basis, const SampleSet& samples, double cutoff) {
  const std::size_t n = basis.size();
  if (samples.size() == 0 || samples.size() < 50 * n)
    throw Error(ErrorKind::DegenerateGram, "need at least 50 accepted samples per basis function (have " +
                                               std::to_string(samples.size()) + " for " +
                                               std::to_string(n) + ")");
  const Eigen::MatrixXcd g = gram_matrix(basis, samples);
  Eigen::VectorXd scale(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    const double d = g(i, i).real();
    if (!(d > 0.0) || !std::isfinite(d))
      throw Error(ErrorKind::DegenerateGram, "basis function " + std::to_string(i) + " has zero norm");
    scale(i) = std::sqrt(d);
  }
  Eigen::MatrixXcd gs = g;
  for (Eigen::Index i = 0; i < gs.rows(); ++i)
    for (Eigen::Index j = 0; j < gs.cols(); ++j) gs(i, j) /= scale(i) * scale(j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::DegenerateGram, "eigensolver failed");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0)) throw Error(ErrorKind::DegenerateGram, "Gram matrix has no positive eigenvalue");

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam(i) > cutoff * lmax) keep.push_back(i);
  if (keep.empty()) throw Error(ErrorKind::DegenerateGram, "no direction survives the cutoff");

  Eigen::MatrixXcd coeffs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c)
    coeffs.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]) / std::sqrt(lam(keep[c]));

  GramReport rep;
  rep.basis_size = n;
  rep.kept = keep.size();
  rep.cutoff_count = n - keep.size();
  rep.max_eigenvalue = lmax;
  rep.min_kept_eigenvalue = lam(keep.front());
  rep.condition = lmax / rep.min_kept_eigenvalue;
  return OrthoBasis(basis, std::move(scale), std::move(coeffs), rep);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1)
    throw Error(ErrorKind::InvalidArgument, "log_spaced needs 0 < lo <= hi and n >= 1");
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * i / (n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

bool KernelEstimate::sandwich_holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const KernelRow& r) { return r.k_hat <= r.upper_bound; });
}

namespace {

CPoint probe_point(double delta) { return {0.0, cplx(delta, 0.0)}; }

void check_probe(const ModelDomain& m, const KernelProbe& probe) {
  if (probe.deltas.empty()) throw Error(ErrorKind::InvalidArgument, "probe has no delta values");
  for (double d : probe.deltas) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonpositiveDelta, "probe delta must be > 0");
    if (!model_contains(probe_point(d), m))
      throw Error(ErrorKind::InvalidArgument, "probe point (0, " + std::to_string(d) + ") is outside the domain");
  }
}

}  // namespace

KernelEstimate kernel_diag_estimate(const ModelDomain& m, const KernelProbe& probe, const OrthoBasis& ob,
                                    const SampleSet& samples) {
  m.validate();
  check_probe(m, probe);
  KernelEstimate est;
  est.model = m;
  est.gram = ob.report();
  est.volume = samples.volume();
  est.samples = samples.size();
  std::vector<double> xs, ys;
  for (double d : probe.deltas) {
    KernelRow row;
    row.delta = d;
    row.upper_bound = kernel_upper_bound(d, m);
    row.k_hat = ob.kernel_diag(probe_point(d));
    xs.push_back(d);
    ys.push_back(row.k_hat);
    row.slope_so_far = std::numeric_limits<double>::quiet_NaN();
    if (xs.size() >= 2) {
      try {
        row.slope_so_far = fit_loglog(xs, ys).slope;
      } catch (const Error&) {
      }
    }
    est.rows.push_back(row);
  }
  try {
    est.fit = catlin_exponent_fit(est);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientData) throw;
  }
  return est;
}

KernelEstimate kernel_diag_estimate(const ModelDomain& m, const KernelProbe& probe, const BasisSpec& basis,
                                    const SamplePlan& plan) {
  m.validate();
  check_probe(m, probe);
  for (double d : probe.deltas) (void)kernel_upper_bound(d, m);  // fail fast on the window
  const SampleSet samples = draw_samples(m, plan);
  const OrthoBasis ob = gram_orthobasis(BasisSet(basis), samples);
  return kernel_diag_estimate(m, probe, ob, samples);
}

CatlinFit catlin_exponent_fit(const KernelEstimate& est) {
  std::vector<double> xs, ys;
  for (const auto& r : est.rows)
    if (r.k_hat > 0.0 && std::isfinite(r.k_hat)) {
      xs.push_back(r.delta);
      ys.push_back(r.k_hat);
    }
  if (xs.size() < 4)
    throw Error(ErrorKind::InsufficientData, "exponent fit needs at least 4 positive kernel values");
  const LineFit f = fit_loglog(xs, ys);
  CatlinFit out;
  out.slope = f.slope;
  out.residual = f.residual;
  out.target = est.target_slope();
  out.deviation = f.slope - out.target;
  return out;
}

bool WitnessReport::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const WitnessRow& r) { return r.chain_ok && r.monotone_ok; });
}

WitnessReport noncompactness_witness(const ModelDomain& outer, const ModelDomain& inner, const KernelProbe& probe,
                                     const BasisSpec& basis, const SamplePlan& plan, const WitnessOptions& opts) {
  outer.validate();
  inner.validate();
  if (probe.deltas.empty()) throw Error(ErrorKind::InvalidArgument, "probe has no delta values");

  WitnessReport rep;
  rep.mass_tol = opts.mass_tol;

  SamplePlan check_plan = plan;
  check_plan.accepted = opts.containment_samples;
  check_plan.seed = plan.seed + 0x9e3779b97f4a7c15ULL;
  const SampleSet check = draw_samples(inner, check_plan);
  for (const auto& p : check.points)
    if (!model_contains(p, outer))
      throw Error(ErrorKind::ContainmentViolated, "inner domain point " + point_str(p) + " lies outside the outer domain");
  rep.containment_checked = check.size();

  for (double d : probe.deltas) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonpositiveDelta, "probe delta must be > 0");
    if (!model_contains(probe_point(d), inner))
      throw Error(ErrorKind::InvalidArgument, "probe point (0, " + std::to_string(d) + ") is outside the inner domain");
    if (!model_contains(probe_point(d), outer))
      throw Error(ErrorKind::ContainmentViolated, "probe point (0, " + std::to_string(d) + ") is outside the outer domain");
  }
  if (!model_contains(opts.z0, outer))
    throw Error(ErrorKind::InvalidArgument, "reference point z0 is outside the outer domain");

  const SampleSet s1 = draw_samples(outer, plan);
  const OrthoBasis ob = gram_orthobasis(BasisSet(basis), s1);
  rep.gram = ob.report();
  const SampleSet s2 = restrict_samples(s1, inner);
  if (s2.size() == 0) throw Error(ErrorKind::DegenerateGram, "no outer sample falls inside the inner domain");

  // Inner Gram of the outer orthonormal family.
  Eigen::MatrixXcd g2 = gram_matrix(ob.basis(), s2);
  for (Eigen::Index i = 0; i < g2.rows(); ++i)
    for (Eigen::Index j = 0; j < g2.cols(); ++j) g2(i, j) /= ob.scale()(i) * ob.scale()(j);
  const Eigen::MatrixXcd h = ob.coeffs().adjoint() * g2 * ob.coeffs();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::DegenerateGram, "eigensolver failed on inner Gram");
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();

  const Eigen::VectorXcd at_z0 = ob.values(opts.z0);
  std::vector<double> order(probe.deltas.begin(), probe.deltas.end());
  std::sort(order.begin(), order.end(), std::greater<>());
  int n = 0;
  for (double d : order) {
    const Eigen::VectorXcd v = ob.values(probe_point(d));
    const Eigen::VectorXcd b = v.conjugate();
    const double k1 = v.squaredNorm();
    const Eigen::VectorXcd wb = es.eigenvectors().adjoint() * b;
    double k2 = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam(i) > 1e-13 * lmax) k2 += std::norm(wb(i)) / lam(i);
    const double mass = (b.adjoint() * h * b)(0, 0).real() / k1;

    WitnessRow row;
    row.n = n++;
    row.delta = d;
    row.k1 = k1;
    row.k2 = k2;
    row.ratio = k1 / k2;
    row.mass = mass;
    row.f_at_z0 = std::abs(at_z0.cwiseProduct(b).sum()) / std::sqrt(k1);
    row.chain_ok = mass >= row.ratio - opts.mass_tol;
    row.monotone_ok = k2 >= k1 - opts.kernel_rel_tol * k1;
    rep.rows.push_back(row);
  }
  rep.kernel_tol = opts.kernel_rel_tol;
  return rep;
}

}  // namespace pcvx3
