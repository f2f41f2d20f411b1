#pragma once

// Iterative normalization of a real hypersurface germ
//   {Re z3 = φ(z1, z2, Im z3)}
// along the curve z2 = z3 = 0.
//
// At stage m the function φ_m has all derivatives ∂^j_{z2}∂^k_{z̄2}, j + k <= m,
// vanishing on the curve, and ∂_t φ_m vanishes there too. Either some mixed
// derivative (j, k >= 1, j + k = m + 1) is nonzero, which stops the iteration
// with type τ = m + 1, or the pure terms of order m + 1 are removed by the
// holomorphic shear z3 ↦ z3 − (2/(m+1)!) c(z1) z2^{m+1}.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcvx3/error.hpp"
#include "pcvx3/jet.hpp"

namespace pcvx3 {

enum class StageClause {
  CurveOrder,    // ∂^j_{z2}∂^k_{z̄2}φ(z1,0,0) = 0 for j + k <= m
  TDerivative,   // ∂_tφ(z1,0,0) = 0
  PureTerm,      // ∂^{m+1}_{z2}φ(z1,0,0) = 0 and its conjugate
};

const char* stage_clause_name(StageClause c);

// HypothesisViolation with the offending clause, derivative orders and key.
class HypothesisError : public Error {
 public:
  HypothesisError(StageClause clause, int j, int k, ExponentKey key, const std::string& message);

  StageClause clause() const { return clause_; }
  int j() const { return j_; }
  int k() const { return k_; }
  const ExponentKey& key() const { return key_; }

 private:
  StageClause clause_;
  int j_, k_;
  ExponentKey key_;
};

struct ChainRuleResiduals {
  double t_derivative = 0.0;
  double low_order = 0.0;
  double mixed = 0.0;
  double pure_holomorphic = 0.0;
  double pure_antiholomorphic = 0.0;

  double max() const;
};

struct ShearRecord {
  int stage = 1;
  Jet c;  // holomorphic in z1; shear z3 ↦ z3 − (2/(stage+1)!) c(z1) z2^{stage+1}
  ChainRuleResiduals residuals;  // of the sheared function, relative to max(1, max|coefficient|)
};

struct NormalizationState {
  int stage = 1;
  Jet phi;
  std::vector<ShearRecord> shears;
};

struct NormalizationResult {
  int tau = 0;
  cplx z_star{};
  int j0 = 0;
  int k0 = 0;
  cplx witness{};
  bool halted = false;
  NormalizationState final_state;
};

// Square grid of count × count points in the z1 plane.
struct Z1Grid {
  cplx center{};
  double radius = 0.5;
  int count = 9;

  std::vector<cplx> points() const;
};

struct StageCertificate {
  int stage = 1;
  double threshold = 0.0;            // absolute vanishing threshold used
  bool mixed_vanish = true;          // j, k >= 1, j + k = m + 1
  std::vector<std::pair<int, int>> mixed_nonvanishing;
  bool pure_vanish = true;           // (m + 1, 0) and (0, m + 1)
};

// Verifies the curve-order and t-derivative clauses at stage m and reports
// the order-(m+1) mixed and pure terms. Throws HypothesisError.
StageCertificate check_stage_hypotheses(const Jet& phi, int m, double tol = kVanishRelative);

// Weight-(m+1) part of φ under z2 ↦ δ z2, t ↦ δ^{m+1} t: a homogeneous
// polynomial in (z2, z̄2) with z1-dependent coefficients.
Jet rescaled_limit(const Jet& phi, int m, double tol = kVanishRelative);

// For even m: the mixed coefficients of the rescaled limit vanish.
// Throws NotPseudoconvexWitness naming the first offending key.
StageCertificate even_step_vanishing(const Jet& phi, int m, double tol = kVanishRelative);

struct HolomorphyDiagnostics {
  Jet c;                                  // ∂^{m+1}_{z2}φ(z1,0,0)
  std::vector<ExponentKey> antiholomorphic_keys;  // keys of c with a z̄1 power
  double min_determinant = 0.0;           // complex-Hessian determinant of the limit, over samples
  double determinant_tol = 0.0;
  bool coefficient_detects = false;
  bool determinant_detects = false;
};

HolomorphyDiagnostics holomorphy_diagnostics(const Jet& phi, int m, const Z1Grid& grid = {},
                                             double tol = kVanishRelative);

// Returns c(z1) or throws NonPseudoconvexInput. The coefficient test and the
// Hessian-determinant test must agree (InternalInvariant otherwise).
Jet holomorphy_certificate(const Jet& phi, int m, const Z1Grid& grid = {},
                           double tol = kVanishRelative);

struct ShearOutcome {
  ShearRecord record;
  Jet phi_next;
};

inline constexpr double kChainRuleTolerance = 1e-9;

// φ_{m+1} = φ(z1, z2, t + Im P) − Re P with P = (2/(m+1)!) c(z1) z2^{m+1}.
// Throws TruncationUnsafe if trunc < 2(m+1), InternalInvariant if a residual
// exceeds kChainRuleTolerance.
ShearOutcome shear_step(const Jet& phi, int m, const Jet& c);

struct NormalizeOptions {
  int max_stage = 16;
  Z1Grid grid{};
  double tol = kVanishRelative;
};

NormalizationResult normalize_iterate(const Jet& phi1, const NormalizeOptions& opts = {});

struct ContactOrder {
  int order = 0;
  bool saturated = false;  // all coefficients vanished through min(cap, trunc)
};

// Vanishing order at 0 of ρ∘h where ρ = φ(z1, z2, Im z3) − Re z3 and
// h(w1, w2) = (w1, h2, h3). h2 and h3 are holomorphic jets written in the
// z1 slot (w1) and z2 slot (w2). Throws RankDeficient.
ContactOrder contact_order(const Jet& phi, const Jet& h2, const Jet& h3, int cap,
                           double tol = kVanishRelative);

}  // namespace pcvx3
