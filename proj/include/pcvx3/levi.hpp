#pragma once

// Pseudoconvexity of graph domains {Re z_n > φ(z', Im z_n)}, n ∈ {2, 3}.
//
// At a boundary point the complex tangent space is parametrized by u' ∈ C^{n-1}
// with u_n = Σ_j ∂_{z_j}φ u_j / (½(1 + i∂_yφ)). Pseudoconvexity is the
// nonnegativity of
//
//   Σ_{j,k} ∂²_{z_j z̄_k}φ u_j ū_k + ∂²_yφ |s|² + 2 Re{ Σ_j i ∂²_{z_j y}φ u_j conj(s) },
//   s = Σ_k ∂_{z_k}φ u_k / (1 + i∂_yφ),
//
// a Hermitian form in u'. For n = 3 the active variables are (z1, z2); for
// n = 2 only z2 is active and z1 is held at the point's value.
//
// A finite grid scan can falsify pseudoconvexity, not prove it.

#include <array>
#include <span>
#include <vector>

#include "pcvx3/jet.hpp"

namespace pcvx3 {

struct SmallHermitian {
  int dim = 0;                   // 1 or 2
  std::array<cplx, 4> m{};       // row-major

  cplx operator()(int i, int j) const { return m[i * 2 + j]; }
  cplx& operator()(int i, int j) { return m[i * 2 + j]; }

  double min_eigenvalue() const;
  double max_eigenvalue() const;
  double determinant() const;
  // u^* H u (real part; the imaginary part is zero for Hermitian H).
  double quadratic_form(std::span<const cplx> u) const;
};

// Real grid over (Re z1, Im z1, Re z2, Im z2, t): `count` points per real
// dimension spread uniformly over [center - radius, center + radius]; a zero
// radius collapses that dimension to the center.
struct GridSpec {
  Point5 center{};
  double radius_z1 = 0.5;
  double radius_z2 = 0.5;
  double radius_t = 0.5;
  int count = 9;
};

std::vector<Point5> tensor_grid(const GridSpec& spec);

class LeviForm {
 public:
  // Throws NonRealInput if φ fails is_real at the tolerance.
  LeviForm(const Jet& phi, int n = 3, double real_tol = kVanishRelative);

  int dim() const { return n_; }
  SmallHermitian matrix_at(const Point5& p) const;
  // ∂²_{z_j z̄_k}φ alone: the complex Hessian in the active variables.
  SmallHermitian hessian_at(const Point5& p) const;
  // ∂_{z_j} φ for the active variables, and ∂_yφ.
  std::array<cplx, 2> gradient_at(const Point5& p) const;
  double dy_at(const Point5& p) const;

 private:
  int n_;
  std::vector<JetEvaluator> dz_;       // ∂_{z_j}φ, j active
  JetEvaluator dy_;                    // ∂_yφ
  std::vector<JetEvaluator> dzzbar_;   // ∂²_{z_j z̄_k}φ, row-major over active
  JetEvaluator dyy_;                   // ∂²_yφ
  std::vector<JetEvaluator> dzy_;      // ∂²_{z_j y}φ
};

// Tangent vector (u', u_n) of the boundary at (z', y).
std::vector<cplx> tangent_lift(const Jet& phi, const Point5& p, std::span<const cplx> u_prime);

SmallHermitian levi_form_matrix(const Jet& phi, const Point5& p, int n = 3);

// Complex Hessian of a t-free φ in the active variables (z1, z2).
SmallHermitian complex_hessian(const Jet& phi, const Point5& p);

struct LeviRow {
  Point5 point;
  double lambda_min = 0.0;
};

struct LeviReport {
  std::vector<LeviRow> rows;
  double global_min = 0.0;
  std::size_t worst_index = 0;
  double tol = 1e-8;

  bool pseudoconvex() const { return global_min >= -tol; }
};

inline constexpr double kLeviTolerance = 1e-8;

LeviReport pseudoconvexity_scan(const Jet& phi, std::span<const Point5> grid,
                                double tol = kLeviTolerance, int n = 3);

// For t-free φ: complex Hessian positive semidefinite (λ_min >= -tol) on the grid.
// Throws TDependentInput if φ has a key with positive t exponent.
bool is_psh(const Jet& phi, std::span<const Point5> grid, double tol = kLeviTolerance);

// Minimum over the grid of the smallest complex-Hessian eigenvalue.
double psh_min_eigenvalue(const Jet& phi, std::span<const Point5> grid);

}  // namespace pcvx3
