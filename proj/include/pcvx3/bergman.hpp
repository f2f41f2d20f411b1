#pragma once

// Subspace Bergman-kernel estimates on model domains
//   Ω_{τ,C} ∩ W = {Re z2 > C|z1|^τ + C|Im z2|, |z1|² + |z2|² < ε²}
// and on a disc calibration fixture.
//
// K̂(p) = sup{|f(p)|² : f ∈ V, ‖f‖ = 1} over a finite-dimensional space V of
// holomorphic functions, with the L² norm replaced by a quasi-Monte-Carlo
// quadrature. V is spanned by monomials z1^a z2^b (a + b <= cap) plus, for
// each pole scale s, the functions z1^a (z2 + s)^{-k} (k >= 1, a + k <= cap).
// The pole functions are holomorphic on Re z2 > -s and resolve the boundary
// singularity at 0 across the scales in the probe grid; monomials alone
// cannot at moderate degree.

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pcvx3 {

using cplx = std::complex<double>;

struct CPoint {
  cplx z1{};
  cplx z2{};
};

struct ModelDomain {
  double tau = 2.0;
  double C = 1.0;
  double eps = 1.0;  // window radius

  void validate() const;
};

// Unit-type calibration fixture: the disc |z1| < radius in C (z2 unused).
struct DiscFixture {
  double radius = 1.0;
};

using Domain = std::variant<ModelDomain, DiscFixture>;

bool model_contains(const CPoint& p, const ModelDomain& m);
bool domain_contains(const CPoint& p, const Domain& d);
int complex_dim(const Domain& d);

struct InclusionCheck {
  bool ok = false;
  CPoint corner;       // worst-case corner of the closed bidisc
  std::string failed;  // which condition failed, empty when ok
};

// E_δ = D(0, δ^{1/τ}) × D((2C+1)δ, δ) inside Ω_{τ,C} ∩ W.
InclusionCheck bidisc_inclusion(double delta, const ModelDomain& m);

// Bidisc parameter δ' = δ / (2C + 1) whose center is the probe point (0, δ).
double bidisc_delta_for_probe(double probe_delta, const ModelDomain& m);

// 1 / (4π² δ'^{2 + 2/τ}) at the probe point (0, δ), δ' = δ/(2C+1).
// Throws InclusionFailed if E_{δ'} is not inside the windowed domain.
double kernel_upper_bound(double probe_delta, const ModelDomain& m);

enum class SamplerKind {
  Automatic,     // log-stretched for models, box for the disc
  Box,           // uniform low-discrepancy points in the bounding box
  LogStretched,  // Re z2 log-uniform, fibers scaled to the domain's cross-section
};

struct SamplePlan {
  std::size_t accepted = 200000;
  std::uint64_t seed = 1;
  SamplerKind sampler = SamplerKind::Automatic;
  double x_min = 1e-6;  // lower cut for Re z2 in the log-stretched sampler
};

// Weighted point set; ∫ f ≈ Σ_i weights[i] f(points[i]) / drawn.
struct SampleSet {
  std::vector<CPoint> points;
  std::vector<double> weights;
  std::size_t drawn = 0;

  std::size_t size() const { return points.size(); }
  double volume() const;
};

SampleSet draw_samples(const Domain& d, const SamplePlan& plan);

// Points of s lying in m, same weights and draw count (common random numbers).
SampleSet restrict_samples(const SampleSet& s, const ModelDomain& m);

struct BasisSpec {
  int degree_cap = 12;
  std::vector<double> pole_scales;  // empty: monomials only
  int complex_dim = 2;
};

// Pole scales one per decade from δ_min/10 up to δ_max.
std::vector<double> default_pole_scales(std::span<const double> deltas);

class BasisSet {
 public:
  struct Term {
    int a = 0;      // power of z1
    int k = 0;      // power of z2 (monomial) or pole order
    double s = -1;  // pole shift, < 0 for monomials
  };

  explicit BasisSet(BasisSpec spec);

  const BasisSpec& spec() const { return spec_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  void evaluate(const CPoint& p, std::span<cplx> out) const;

 private:
  BasisSpec spec_;
  std::vector<Term> terms_;
  int max_a_ = 0;
  int max_k_ = 0;
};

struct GramReport {
  std::size_t basis_size = 0;
  std::size_t kept = 0;
  std::size_t cutoff_count = 0;
  double max_eigenvalue = 0.0;
  double min_kept_eigenvalue = 0.0;
  double condition = 0.0;  // of the kept block
};

inline constexpr double kGramCutoff = 1e-10;

// Orthonormal family e_k = Σ_i coeffs(i, k) φ_i / scale_i.
class OrthoBasis {
 public:
  OrthoBasis(BasisSet basis, Eigen::VectorXd scale, Eigen::MatrixXcd coeffs, GramReport report);

  const BasisSet& basis() const { return basis_; }
  const GramReport& report() const { return report_; }
  const Eigen::MatrixXcd& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.cols()); }

  Eigen::VectorXcd raw_values(const CPoint& p) const;  // φ_i(p)/scale_i
  Eigen::VectorXcd values(const CPoint& p) const;      // e_k(p)
  double kernel_diag(const CPoint& p) const;           // Σ |e_k(p)|²
  cplx kernel(const CPoint& z, const CPoint& w) const; // Σ e_k(z) conj(e_k(w))

 private:
  BasisSet basis_;
  Eigen::VectorXd scale_;
  Eigen::MatrixXcd coeffs_;
  GramReport report_;
};

// Raw Gram matrix G_ij = Σ_n w_n conj(φ_i(x_n)) φ_j(x_n) / drawn.
Eigen::MatrixXcd gram_matrix(const BasisSet& basis, const SampleSet& samples);

// Throws DegenerateGram if the sample set has fewer than 50 points per basis
// function or no direction survives the eigenvalue cutoff.
OrthoBasis gram_orthobasis(const BasisSet& basis, const SampleSet& samples,
                           double cutoff = kGramCutoff);

struct KernelProbe {
  std::vector<double> deltas;  // probe points P - δν = (0, δ), ν = (0, -1)
};

std::vector<double> log_spaced(double lo, double hi, int n);

struct KernelRow {
  double delta = 0.0;
  double k_hat = 0.0;
  double upper_bound = 0.0;
  double slope_so_far = 0.0;  // NaN on the first row
};

struct CatlinFit {
  double slope = 0.0;
  double residual = 0.0;
  double target = 0.0;
  double deviation = 0.0;  // slope - target
};

struct KernelEstimate {
  ModelDomain model;
  std::vector<KernelRow> rows;
  GramReport gram;
  double volume = 0.0;
  std::size_t samples = 0;
  std::optional<CatlinFit> fit;

  double target_slope() const { return -2.0 - 2.0 / model.tau; }
  bool sandwich_holds() const;
};

KernelEstimate kernel_diag_estimate(const ModelDomain& m, const KernelProbe& probe,
                                    const BasisSpec& basis, const SamplePlan& plan);

// Same, reusing an existing orthonormal basis built on samples of m.
KernelEstimate kernel_diag_estimate(const ModelDomain& m, const KernelProbe& probe,
                                    const OrthoBasis& ob, const SampleSet& samples);

// Least-squares slope of log K̂ against log δ. Needs >= 4 positive K̂.
CatlinFit catlin_exponent_fit(const KernelEstimate& est);

struct WitnessRow {
  int n = 0;
  double delta = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double ratio = 0.0;  // k1 / k2
  double mass = 0.0;   // ∫_{M2} |f_n|², f_n = K̂1(·, P_n)/sqrt(K̂1(P_n, P_n))
  double f_at_z0 = 0.0;
  bool chain_ok = false;
  bool monotone_ok = false;
};

struct WitnessReport {
  std::vector<WitnessRow> rows;
  GramReport gram;
  std::size_t containment_checked = 0;
  double mass_tol = 1e-6;
  double kernel_tol = 0.0;

  bool all_ok() const;
};

struct WitnessOptions {
  CPoint z0{0.0, 0.5};
  double mass_tol = 1e-6;
  double kernel_rel_tol = 1e-9;
  std::size_t containment_samples = 20000;
};

// Kernel inequality chain on nested models M2 ⊆ M1 sharing the boundary point 0:
// both subspace kernels live on the same span (M1's orthonormal family) and
// M2's quadrature is the restriction of M1's, so K̂2 >= K̂1 and
// mass(n) >= K̂1/K̂2 hold up to rounding. Throws ContainmentViolated.
WitnessReport noncompactness_witness(const ModelDomain& outer, const ModelDomain& inner,
                                     const KernelProbe& probe, const BasisSpec& basis,
                                     const SamplePlan& plan, const WitnessOptions& opts = {});

}  // namespace pcvx3
