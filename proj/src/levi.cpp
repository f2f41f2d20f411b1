#include "pcvx3/levi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcvx3/error.hpp"
#include "pcvx3/kernels.hpp"

namespace pcvx3 {

double SmallHermitian::min_eigenvalue() const {
  if (dim == 1) return m[0].real();
  const double a = m[0].real();
  const double d = m[3].real();
  return 0.5 * (a + d) - std::hypot(0.5 * (a - d), std::abs(m[1]));
}

double SmallHermitian::max_eigenvalue() const {
  if (dim == 1) return m[0].real();
  const double a = m[0].real();
  const double d = m[3].real();
  return 0.5 * (a + d) + std::hypot(0.5 * (a - d), std::abs(m[1]));
}

double SmallHermitian::determinant() const {
  if (dim == 1) return m[0].real();
  return m[0].real() * m[3].real() - std::norm(m[1]);
}

double SmallHermitian::quadratic_form(std::span<const cplx> u) const {
  if (static_cast<int>(u.size()) != dim)
    throw Error(ErrorKind::InvalidArgument, "quadratic_form: dimension mismatch");
  cplx s{};
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k) s += std::conj(u[j]) * (*this)(j, k) * u[k];
  return s.real();
}

std::vector<Point5> tensor_grid(const GridSpec& spec) {
  if (spec.count < 1) throw Error(ErrorKind::InvalidArgument, "grid count must be >= 1");
  auto axis = [&](double center, double radius) {
    std::vector<double> v;
    if (radius == 0.0 || spec.count == 1) {
      v.push_back(center);
      return v;
    }
    for (int i = 0; i < spec.count; ++i)
      v.push_back(center - radius + 2.0 * radius * i / (spec.count - 1));
    return v;
  };
  const auto x1 = axis(spec.center.z1.real(), spec.radius_z1);
  const auto y1 = axis(spec.center.z1.imag(), spec.radius_z1);
  const auto x2 = axis(spec.center.z2.real(), spec.radius_z2);
  const auto y2 = axis(spec.center.z2.imag(), spec.radius_z2);
  const auto tt = axis(spec.center.t, spec.radius_t);
  std::vector<Point5> out;
  out.reserve(x1.size() * y1.size() * x2.size() * y2.size() * tt.size());
  for (double a : x1)
    for (double b : y1)
      for (double c : x2)
        for (double d : y2)
          for (double e : tt) out.push_back({{a, b}, {c, d}, e});
  return out;
}

namespace {

std::vector<Var> active_vars(int n) {
  if (n == 3) return {Var::z1, Var::z2};
  if (n == 2) return {Var::z2};
  throw Error(ErrorKind::InvalidArgument, "graph dimension n must be 2 or 3");
}

Var bar(Var v) { return v == Var::z1 ? Var::z1bar : Var::z2bar; }

}  // namespace

LeviForm::LeviForm(const Jet& phi, int n, double real_tol)
    : n_(n),
      dy_(wirtinger_derive(phi, Var::t)),
      dyy_(wirtinger_derive(phi, Var::t, 2)) {
  const auto vars = active_vars(n);
  if (!is_real(phi, vanish_threshold(phi, real_tol)))
    throw Error(ErrorKind::NonRealInput, "defining function is not real-valued");
  for (Var v : vars) {
    const Jet d = wirtinger_derive(phi, v);
    dz_.emplace_back(d);
    dzy_.emplace_back(wirtinger_derive(d, Var::t));
    for (Var w : vars) dzzbar_.emplace_back(wirtinger_derive(d, bar(w)));
  }
}

std::array<cplx, 2> LeviForm::gradient_at(const Point5& p) const {
  std::array<cplx, 2> g{};
  for (std::size_t j = 0; j < dz_.size(); ++j) g[j] = dz_[j](p);
  return g;
}

double LeviForm::dy_at(const Point5& p) const { return dy_(p).real(); }

SmallHermitian LeviForm::hessian_at(const Point5& p) const {
  const int d = n_ - 1;
  SmallHermitian h;
  h.dim = d;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) h(j, k) = dzzbar_[k * d + j](p);
  for (int j = 0; j < d; ++j) h(j, j) = h(j, j).real();
  if (d == 2) {
    const cplx off = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    h(0, 1) = off;
    h(1, 0) = std::conj(off);
  }
  return h;
}

SmallHermitian LeviForm::matrix_at(const Point5& p) const {
  const int d = n_ - 1;
  SmallHermitian h;
  h.dim = d;
  const cplx denom(1.0, dy_(p).real());
  const double phi_yy = dyy_(p).real();
  std::array<cplx, 2> a{}, b{};
  for (int j = 0; j < d; ++j) {
    a[j] = dz_[j](p) / denom;
    b[j] = cplx(0.0, 1.0) * dzy_[j](p);
  }
  // Coefficient of ū_j u_k collects into h(j, k).
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      h(j, k) = dzzbar_[k * d + j](p);
      h(j, k) += phi_yy * std::conj(a[j]) * a[k];
      h(j, k) += b[k] * std::conj(a[j]);
      h(j, k) += std::conj(b[j]) * a[k];
    }
  for (int j = 0; j < d; ++j) h(j, j) = h(j, j).real();
  if (d == 2) {
    const cplx off = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    h(0, 1) = off;
    h(1, 0) = std::conj(off);
  }
  return h;
}

std::vector<cplx> tangent_lift(const Jet& phi, const Point5& p, std::span<const cplx> u_prime) {
  const int n = static_cast<int>(u_prime.size()) + 1;
  const auto vars = active_vars(n);
  cplx num{};
  for (std::size_t j = 0; j < vars.size(); ++j)
    num += jet_eval(wirtinger_derive(phi, vars[j]), p) * u_prime[j];
  const cplx dy = jet_eval(wirtinger_derive(phi, Var::t), p);
  std::vector<cplx> u(u_prime.begin(), u_prime.end());
  u.push_back(num / (0.5 * (1.0 + cplx(0.0, 1.0) * dy)));
  return u;
}

SmallHermitian levi_form_matrix(const Jet& phi, const Point5& p, int n) {
  return LeviForm(phi, n).matrix_at(p);
}

SmallHermitian complex_hessian(const Jet& phi, const Point5& p) {
  return LeviForm(phi, 3).hessian_at(p);
}

LeviReport pseudoconvexity_scan(const Jet& phi, std::span<const Point5> grid, double tol, int n) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "pseudoconvexity_scan: empty grid");
  const LeviForm form(phi, n);
  const auto lam = kernels::omp::levi_min_eigenvalues(form, grid, kernels::LeviMatrix::Levi);
  LeviReport rep;
  rep.tol = tol;
  rep.rows.reserve(grid.size());
  rep.global_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.rows.push_back({grid[i], lam[i]});
    if (lam[i] < rep.global_min) {
      rep.global_min = lam[i];
      rep.worst_index = i;
    }
  }
  return rep;
}

namespace {

void require_t_free(const Jet& phi) {
  for (const auto& [k, c] : phi.terms())
    if (k[Var::t] > 0)
      throw Error(ErrorKind::TDependentInput, "key " + k.to_string() + " depends on Im(z3)");
}

}  // namespace

double psh_min_eigenvalue(const Jet& phi, std::span<const Point5> grid) {
  require_t_free(phi);
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "is_psh: empty grid");
  const LeviForm form(phi, 3);
  const auto lam = kernels::omp::levi_min_eigenvalues(form, grid, kernels::LeviMatrix::Hessian);
  return *std::min_element(lam.begin(), lam.end());
}

bool is_psh(const Jet& phi, std::span<const Point5> grid, double tol) {
  return psh_min_eigenvalue(phi, grid) >= -tol;
}

}  // namespace pcvx3
