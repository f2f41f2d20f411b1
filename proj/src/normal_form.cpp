#include "pcvx3/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcvx3/aniso_scale.hpp"
#include "pcvx3/levi.hpp"

namespace pcvx3 {

const char* stage_clause_name(StageClause c) {
  switch (c) {
    case StageClause::CurveOrder: return "curve-order";
    case StageClause::TDerivative: return "t-derivative";
    case StageClause::PureTerm: return "pure-term";
  }
  return "unknown";
}

HypothesisError::HypothesisError(StageClause clause, int j, int k, ExponentKey key, const std::string& message)
    : Error(ErrorKind::HypothesisViolation, std::string(stage_clause_name(clause)) + " clause: " + message),
      clause_(clause),
      j_(j),
      k_(k),
      key_(key) {}

std::vector<cplx> Z1Grid::points() const {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "z1 grid count must be >= 1");
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(count) * count);
  for (int a = 0; a < count; ++a)
    for (int b = 0; b < count; ++b) {
      const double x = count == 1 ? 0.0 : -radius + 2.0 * radius * a / (count - 1);
      const double y = count == 1 ? 0.0 : -radius + 2.0 * radius * b / (count - 1);
      out.push_back(center + cplx(x, y));
    }
  return out;
}

namespace {

void require_stage(int m) {
  if (m < 1) throw Error(ErrorKind::InvalidArgument, "stage must be >= 1");
}

// Largest |∂^j_{z2}∂^k_{z̄2}φ(z1,0,0)| coefficient, with the key attaining it.
std::pair<double, ExponentKey> curve_coeff_max(const Jet& phi, int j, int k) {
  const double scale = factorial(j) * factorial(k);
  double best = 0.0;
  ExponentKey at;
  for (const auto& [key, c] : phi.terms())
    if (key[Var::z2] == j && key[Var::z2bar] == k && key[Var::t] == 0 && std::abs(c) * scale > best) {
      best = std::abs(c) * scale;
      at = key;
    }
  return {best, at};
}

}  // namespace

StageCertificate check_stage_hypotheses(const Jet& phi, int m, double tol) {
  require_stage(m);
  StageCertificate cert;
  cert.stage = m;
  cert.threshold = vanish_threshold(phi, tol);

  for (int s = 0; s <= m; ++s)
    for (int j = 0; j <= s; ++j) {
      const auto [v, key] = curve_coeff_max(phi, j, s - j);
      if (v > cert.threshold)
        throw HypothesisError(StageClause::CurveOrder, j, s - j, key,
                              "derivative (" + std::to_string(j) + "," + std::to_string(s - j) +
                                  ") is nonzero on the curve at key " + key.to_string() +
                                  " (|value| " + std::to_string(v) + ") at stage " + std::to_string(m));
    }
  for (const auto& [key, c] : phi.terms())
    if (key[Var::z2] == 0 && key[Var::z2bar] == 0 && key[Var::t] == 1 && std::abs(c) > cert.threshold)
      throw HypothesisError(StageClause::TDerivative, 0, 0, key,
                            "d/dt is nonzero on the curve at key " + key.to_string() + " at stage " +
                                std::to_string(m));

  for (int j = 1; j <= m; ++j)
    if (curve_coeff_max(phi, j, m + 1 - j).first > cert.threshold) {
      cert.mixed_vanish = false;
      cert.mixed_nonvanishing.emplace_back(j, m + 1 - j);
    }
  cert.pure_vanish = curve_coeff_max(phi, m + 1, 0).first <= cert.threshold &&
                     curve_coeff_max(phi, 0, m + 1).first <= cert.threshold;
  return cert;
}

Jet rescaled_limit(const Jet& phi, int m, double tol) {
  require_stage(m);
  Jet lim = scaling_limit(phi, WeightVector({1, 1, m + 1}), m + 1, tol);
  const double thr = vanish_threshold(phi, tol);
  Jet out(lim.trunc_degree(), lim.real_flag());
  for (const auto& [key, c] : lim.terms()) {
    if (key[Var::t] == 0) {
      out.add_term(key, c);
      continue;
    }
    if (std::abs(c) > thr)
      throw HypothesisError(StageClause::TDerivative, 0, 0, key,
                            "t term " + key.to_string() + " survives the rescaled limit at stage " +
                                std::to_string(m));
  }
  return out;
}

StageCertificate even_step_vanishing(const Jet& phi, int m, double tol) {
  require_stage(m);
  if (m % 2 != 0) throw Error(ErrorKind::InvalidArgument, "even_step_vanishing needs an even stage");
  const Jet lim = rescaled_limit(phi, m, tol);
  StageCertificate cert;
  cert.stage = m;
  cert.threshold = vanish_threshold(phi, tol);
  for (const auto& [key, c] : lim.terms())
    if (key[Var::z2] >= 1 && key[Var::z2bar] >= 1 && std::abs(c) > cert.threshold)
      throw Error(ErrorKind::NotPseudoconvexWitness,
                  "mixed coefficient at key " + key.to_string() + " of the odd-degree limit is nonzero (|c| = " +
                      std::to_string(std::abs(c)) + ") at stage " + std::to_string(m));
  cert.pure_vanish = curve_coeff_max(phi, m + 1, 0).first <= cert.threshold &&
                     curve_coeff_max(phi, 0, m + 1).first <= cert.threshold;
  return cert;
}

HolomorphyDiagnostics holomorphy_diagnostics(const Jet& phi, int m, const Z1Grid& grid, double tol) {
  require_stage(m);
  HolomorphyDiagnostics d;
  const double thr = vanish_threshold(phi, tol);
  d.c = curve_derivative(phi, m + 1, 0);
  for (const auto& [key, c] : d.c.terms())
    if (key[Var::z1bar] > 0 && std::abs(c) > thr) d.antiholomorphic_keys.push_back(key);
  d.coefficient_detects = !d.antiholomorphic_keys.empty();

  // L = 2 Re(c z2^{m+1}/(m+1)!). Its z2 z̄2 entry is identically zero, so the
  // determinant is -|∂_{z̄1}c z2^m/m!|^2 and is negative exactly where c
  // fails to be holomorphic.
  Jet lim(phi.trunc_degree());
  for (const auto& [key, c] : d.c.terms())
    lim.add_term({key[Var::z1], key[Var::z1bar], m + 1, 0, 0}, c / factorial(m + 1));
  lim = (lim + lim.conj()).with_real_flag(true);

  d.min_determinant = 0.0;
  constexpr int kAngles = 8;
  for (const cplx z1 : grid.points())
    for (int a = 0; a < kAngles; ++a) {
      const cplx z2 = std::polar(1.0, 2.0 * std::numbers::pi * (a + 0.5) / kAngles);
      d.min_determinant = std::min(d.min_determinant, complex_hessian(lim, {z1, z2, 0.0}).determinant());
    }
  d.determinant_tol = thr * thr;
  d.determinant_detects = d.min_determinant < -d.determinant_tol;
  return d;
}

Jet holomorphy_certificate(const Jet& phi, int m, const Z1Grid& grid, double tol) {
  const HolomorphyDiagnostics d = holomorphy_diagnostics(phi, m, grid, tol);
  if (d.coefficient_detects != d.determinant_detects)
    throw Error(ErrorKind::InternalInvariant,
                "coefficient and Hessian-determinant holomorphy tests disagree at stage " + std::to_string(m) +
                    " (min determinant " + std::to_string(d.min_determinant) + ")");
  if (d.coefficient_detects) {
    const ExponentKey& k = d.antiholomorphic_keys.front();
    throw Error(ErrorKind::NonPseudoconvexInput,
                "d^" + std::to_string(m + 1) + "/dz2 of phi on the curve depends on conj(z1): key " +
                    k.to_string() + ", coefficient magnitude " + std::to_string(std::abs(d.c.coeff(k))) +
                    ", min Hessian determinant " + std::to_string(d.min_determinant));
  }
  Jet c(d.c.trunc_degree());
  for (const auto& [key, v] : d.c.terms())
    if (key[Var::z1bar] == 0) c.add_term(key, v);
  return c;
}

double ChainRuleResiduals::max() const {
  return std::max({t_derivative, low_order, mixed, pure_holomorphic, pure_antiholomorphic});
}

ShearOutcome shear_step(const Jet& phi, int m, const Jet& c) {
  require_stage(m);
  if (phi.trunc_degree() < 2 * (m + 1))
    throw Error(ErrorKind::TruncationUnsafe, "truncation degree " + std::to_string(phi.trunc_degree()) +
                                                 " < 2(m+1) = " + std::to_string(2 * (m + 1)) + " at stage " +
                                                 std::to_string(m));
  for (const auto& [key, v] : c.terms())
    if (key[Var::z1bar] != 0 || key[Var::z2] != 0 || key[Var::z2bar] != 0 || key[Var::t] != 0)
      throw Error(ErrorKind::InvalidArgument, "shear coefficient must be a holomorphic jet in z1");

  ShearOutcome out;
  out.record.stage = m;
  out.record.c = c;

  const int trunc = phi.trunc_degree();
  Jet p(trunc);
  for (const auto& [key, v] : c.terms())
    p.add_term({key[Var::z1], 0, m + 1, 0, 0}, v * (2.0 / factorial(m + 1)));
  if (p.is_zero()) {
    out.phi_next = phi;
  } else {
    out.phi_next = substitute_t(phi, p.imag_part().with_real_flag(true)) - p.real_part();
    out.phi_next.prune();
  }
  out.phi_next.set_real_flag(phi.real_flag());

  const double scale = std::max(1.0, out.phi_next.max_abs());
  ChainRuleResiduals& r = out.record.residuals;
  for (const auto& [key, v] : out.phi_next.terms()) {
    if (key[Var::t] == 1 && key[Var::z2] == 0 && key[Var::z2bar] == 0)
      r.t_derivative = std::max(r.t_derivative, std::abs(v) / scale);
    if (key[Var::t] != 0) continue;
    const int j = key[Var::z2], k = key[Var::z2bar];
    const double val = std::abs(v) * factorial(j) * factorial(k) / scale;
    if (j + k <= m) r.low_order = std::max(r.low_order, val);
    else if (j + k == m + 1 && j >= 1 && k >= 1) r.mixed = std::max(r.mixed, val);
    else if (j == m + 1 && k == 0) r.pure_holomorphic = std::max(r.pure_holomorphic, val);
    else if (j == 0 && k == m + 1) r.pure_antiholomorphic = std::max(r.pure_antiholomorphic, val);
  }
  if (r.max() >= kChainRuleTolerance)
    throw Error(ErrorKind::InternalInvariant,
                "shear at stage " + std::to_string(m) + " leaves residuals t=" + std::to_string(r.t_derivative) +
                    " low=" + std::to_string(r.low_order) + " mixed=" + std::to_string(r.mixed) +
                    " pure=" + std::to_string(r.pure_holomorphic) + "/" + std::to_string(r.pure_antiholomorphic));
  return out;
}

NormalizationResult normalize_iterate(const Jet& phi1, const NormalizeOptions& opts) {
  if (opts.max_stage < 1) throw Error(ErrorKind::InvalidArgument, "max stage must be >= 1");
  if (!is_real(phi1, vanish_threshold(phi1, opts.tol)))
    throw Error(ErrorKind::NonRealInput, "input jet is not real-valued");

  NormalizationResult res;
  NormalizationState& st = res.final_state;
  st.stage = 1;
  st.phi = phi1.with_real_flag(true);
  const std::vector<cplx> grid = opts.grid.points();

  for (int m = 1;; ++m) {
    st.stage = m;
    try {
      const StageCertificate cert = check_stage_hypotheses(st.phi, m, opts.tol);
      if (m % 2 == 0) even_step_vanishing(st.phi, m, opts.tol);
      if (!cert.mixed_vanish) {
        const auto [j0, k0] = cert.mixed_nonvanishing.front();
        const Jet w = curve_derivative(st.phi, j0, k0);
        // Ties (within rounding) go to the point nearest the grid center.
        double best = -1.0;
        for (const cplx z : grid) {
          const cplx v = jet_eval(w, {z, 0.0, 0.0});
          const double a = std::abs(v);
          const bool tie = best >= 0.0 && std::abs(a - best) <= 1e-12 * std::max(1.0, best);
          if ((!tie && a > best) ||
              (tie && std::abs(z - opts.grid.center) < std::abs(res.z_star - opts.grid.center))) {
            best = std::max(best, a);
            res.z_star = z;
            res.witness = v;
          }
        }
        res.tau = m + 1;
        res.j0 = j0;
        res.k0 = k0;
        res.halted = true;
        return res;
      }
      if (m >= opts.max_stage) {
        res.tau = m + 1;
        res.halted = false;
        return res;
      }
      const Jet c = holomorphy_certificate(st.phi, m, opts.grid, opts.tol);
      ShearOutcome sh = shear_step(st.phi, m, c);
      st.shears.push_back(std::move(sh.record));
      st.phi = std::move(sh.phi_next);
    } catch (const HypothesisError& e) {
      throw HypothesisError(e.clause(), e.j(), e.k(), e.key(), "stage " + std::to_string(m) + ": " + e.detail());
    } catch (const Error& e) {
      throw Error(e.kind(), "stage " + std::to_string(m) + ": " + e.detail());
    }
  }
}

ContactOrder contact_order(const Jet& phi, const Jet& h2, const Jet& h3, int cap, double tol) {
  if (cap < 1) throw Error(ErrorKind::InvalidArgument, "contact order cap must be >= 1");
  for (const Jet* h : {&h2, &h3})
    for (const auto& [key, v] : h->terms()) {
      if (key[Var::z1bar] != 0 || key[Var::z2bar] != 0 || key[Var::t] != 0)
        throw Error(ErrorKind::InvalidArgument, "curve components must be holomorphic in (w1, w2)");
      if (key.total() == 0 && std::abs(v) > 0.0)
        throw Error(ErrorKind::InvalidArgument, "curve components must vanish at 0");
    }
  const ExponentKey dw2{0, 0, 1, 0, 0};
  const double thr_h = kVanishRelative;
  if (std::abs(h2.coeff(dw2)) <= thr_h && std::abs(h3.coeff(dw2)) <= thr_h)
    throw Error(ErrorKind::RankDeficient, "Jacobian of (w1, h2, h3) at 0 has rank < 2");

  const int trunc = phi.trunc_degree();
  const Jet s = h3.with_trunc(trunc).imag_part().with_real_flag(true);
  Jet comp = substitute_fiber(phi, h2.with_trunc(trunc), s) - h3.with_trunc(trunc).real_part();
  const double thr = vanish_threshold(comp, tol);
  int lowest = -1;
  for (const auto& [key, v] : comp.terms())
    if (std::abs(v) > thr && (lowest < 0 || key.total() < lowest)) lowest = key.total();
  ContactOrder out;
  if (lowest >= 0 && lowest <= cap) {
    out.order = lowest;
    return out;
  }
  out.order = std::min(cap, comp.trunc_degree() + 1);
  out.saturated = true;
  return out;
}

}  // namespace pcvx3
