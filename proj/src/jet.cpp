#include "pcvx3/jet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcvx3/error.hpp"

namespace pcvx3 {

const char* var_name(Var v) {
  switch (v) {
    case Var::z1: return "z1";
    case Var::z1bar: return "z1bar";
    case Var::z2: return "z2";
    case Var::z2bar: return "z2bar";
    case Var::t: return "t";
  }
  return "?";
}

std::string ExponentKey::to_string() const {
  std::ostringstream os;
  os << e[0] << ',' << e[1] << ',' << e[2] << ',' << e[3] << ',' << e[4];
  return os.str();
}

ExponentKey ExponentKey::parse(const std::string& text) {
  ExponentKey key;
  std::istringstream is(text);
  std::string part;
  int i = 0;
  while (std::getline(is, part, ',')) {
    if (i >= 5) throw Error(ErrorKind::ParseError, "exponent key has more than 5 entries: " + text);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad exponent key: " + text);
    }
    if (used != part.size() || v < 0) throw Error(ErrorKind::ParseError, "bad exponent key: " + text);
    key.e[i++] = v;
  }
  if (i != 5) throw Error(ErrorKind::ParseError, "exponent key needs 5 entries: " + text);
  return key;
}

Jet::Jet(int trunc_degree, bool real) : trunc_(trunc_degree), real_(real) {
  if (trunc_degree < 0) throw Error(ErrorKind::InvalidArgument, "negative truncation degree");
}

Jet Jet::constant(int trunc_degree, cplx value) {
  Jet j(trunc_degree, value.imag() == 0.0);
  j.add_term({}, value);
  return j.prune();
}

Jet Jet::monomial(int trunc_degree, const ExponentKey& key, cplx coeff) {
  Jet j(trunc_degree, false);
  j.add_term(key, coeff);
  return j.prune();
}

Jet Jet::variable(int trunc_degree, Var v) {
  ExponentKey key;
  key[v] = 1;
  Jet j = monomial(trunc_degree, key);
  j.real_ = (v == Var::t);
  return j;
}

cplx Jet::coeff(const ExponentKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? cplx{} : it->second;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

int Jet::max_total_degree() const {
  int m = -1;
  for (const auto& [k, c] : terms_) m = std::max(m, k.total());
  return m;
}

void Jet::add_term(const ExponentKey& key, cplx coeff) {
  if (key.total() > trunc_) return;
  if (coeff == cplx{}) return;
  terms_[key] += coeff;
}

Jet& Jet::prune(double rel) {
  const double cut = rel * max_abs();
  std::erase_if(terms_, [cut](const auto& kv) {
    return kv.second == cplx{} || std::abs(kv.second) <= cut;
  });
  return *this;
}

Jet Jet::with_real_flag(bool real) const {
  Jet j = *this;
  j.real_ = real;
  return j;
}

Jet Jet::truncated(int degree) const {
  Jet j(std::min(degree, trunc_), real_);
  for (const auto& [k, c] : terms_)
    if (k.total() <= j.trunc_) j.terms_.emplace(k, c);
  return j;
}

Jet Jet::with_trunc(int degree) const {
  Jet j(degree, real_);
  for (const auto& [k, c] : terms_)
    if (k.total() <= degree) j.terms_.emplace(k, c);
  return j;
}

Jet Jet::conj() const {
  Jet j(trunc_, real_);
  for (const auto& [k, c] : terms_) j.terms_.emplace(k.conjugate(), std::conj(c));
  return j;
}

Jet Jet::real_part() const {
  Jet j = (*this + conj()) * 0.5;
  j.real_ = true;
  return j;
}

Jet Jet::imag_part() const {
  Jet j = (*this - conj()) * cplx(0.0, -0.5);
  j.real_ = true;
  return j;
}

Jet Jet::operator-() const {
  Jet j = *this;
  for (auto& [k, c] : j.terms_) c = -c;
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.trunc_ < trunc_) *this = truncated(o.trunc_);
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  real_ = real_ && o.real_;
  return prune();
}

Jet& Jet::operator-=(const Jet& o) { return *this += -o; }

Jet& Jet::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
  } else {
    for (auto& [k, c] : terms_) c *= s;
  }
  if (s.imag() != 0.0) real_ = false;
  return *this;
}

Jet jet_mul(const Jet& a, const Jet& b) {
  Jet r(std::min(a.trunc_degree(), b.trunc_degree()), a.real_flag() && b.real_flag());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      const ExponentKey k = ka + kb;
      if (k.total() <= r.trunc_degree()) r.add_term(k, ca * cb);
    }
  return r.prune();
}

Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }

Jet jet_pow(const Jet& a, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative jet power");
  Jet r = Jet::constant(a.trunc_degree(), 1.0).with_real_flag(true);
  Jet base = a;
  while (n > 0) {
    if (n & 1) r = jet_mul(r, base);
    n >>= 1;
    if (n > 0) base = jet_mul(base, base);
  }
  return r;
}

Jet wirtinger_derive(const Jet& j, Var v, int order) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  const int trunc = std::max(0, j.trunc_degree() - order);
  Jet r(trunc, j.real_flag() && (v == Var::t || order == 0));
  for (const auto& [k, c] : j.terms()) {
    const int p = k[v];
    if (p < order) continue;
    double f = 1.0;
    for (int i = 0; i < order; ++i) f *= static_cast<double>(p - i);
    ExponentKey nk = k;
    nk[v] = p - order;
    r.add_term(nk, c * f);
  }
  return r.prune();
}

namespace {

// Multiplies `j` by the monomial `key` * coeff, accumulating into `out`.
void add_shifted(Jet& out, const Jet& j, const ExponentKey& key, cplx coeff) {
  for (const auto& [k, c] : j.terms()) {
    const ExponentKey nk = k + key;
    if (nk.total() <= out.trunc_degree()) out.add_term(nk, c * coeff);
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void require_vanishing_at_origin(const Jet& q, const char* what) {
  auto c = q.coeff({});
  if (std::abs(c) > vanish_threshold(q))
    throw Error(ErrorKind::NonzeroConstantSubstitution,
                std::string(what) + " has nonzero constant term " + std::to_string(c.real()) + "+" +
                    std::to_string(c.imag()) + "i");
}

}  // namespace

Jet substitute_t(const Jet& j, const Jet& q) {
  for (const auto& [k, c] : q.terms())
    if (k[Var::t] > 0) throw Error(ErrorKind::InvalidArgument, "substitute_t: q depends on t");
  require_vanishing_at_origin(q, "substitute_t: q");

  const int trunc = j.trunc_degree();
  int max_t = 0;
  for (const auto& [k, c] : j.terms()) max_t = std::max(max_t, k[Var::t]);

  Jet q0 = q.with_trunc(trunc);
  q0.add_term({}, -q0.coeff({}));  // drop a sub-threshold constant
  q0.prune();
  std::vector<Jet> qpow;
  qpow.reserve(max_t + 1);
  qpow.push_back(Jet::constant(trunc, 1.0));
  for (int i = 1; i <= max_t; ++i) qpow.push_back(jet_mul(qpow.back(), q0));

  Jet r(trunc, j.real_flag() && q.real_flag());
  for (const auto& [k, c] : j.terms()) {
    const int e = k[Var::t];
    for (int i = 0; i <= e; ++i) {
      ExponentKey base = k;
      base[Var::t] = e - i;
      add_shifted(r, qpow[i], base, c * binomial(e, i));
    }
  }
  return r.prune();
}

Jet substitute_fiber(const Jet& j, const Jet& h, const Jet& s) {
  require_vanishing_at_origin(h, "substitute_fiber: h");
  require_vanishing_at_origin(s, "substitute_fiber: s");
  const int trunc = j.trunc_degree();
  int mc = 0, md = 0, me = 0;
  for (const auto& [k, c] : j.terms()) {
    mc = std::max(mc, k[Var::z2]);
    md = std::max(md, k[Var::z2bar]);
    me = std::max(me, k[Var::t]);
  }
  auto powers = [trunc](const Jet& base, int n) {
    Jet b = base.with_trunc(trunc);
    b.add_term({}, -b.coeff({}));
    b.prune();
    std::vector<Jet> p{Jet::constant(trunc, 1.0)};
    for (int i = 1; i <= n; ++i) p.push_back(jet_mul(p.back(), b));
    return p;
  };
  const auto hp = powers(h, mc);
  const auto hbp = powers(h.conj(), md);
  const auto sp = powers(s, me);

  Jet r(trunc, j.real_flag() && s.real_flag());
  for (const auto& [k, c] : j.terms()) {
    Jet prod = jet_mul(jet_mul(hp[k[Var::z2]], hbp[k[Var::z2bar]]), sp[k[Var::t]]);
    add_shifted(r, prod, ExponentKey(k[Var::z1], k[Var::z1bar], 0, 0, 0), c);
  }
  return r.prune();
}

cplx jet_eval(const Jet& j, const Point5& p) { return JetEvaluator(j)(p); }

bool is_real(const Jet& j, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "is_real: tol must be positive");
  for (const auto& [k, c] : j.terms())
    if (std::abs(c - std::conj(j.coeff(k.conjugate()))) > tol) return false;
  return true;
}

bool approx_equal(const Jet& a, const Jet& b, double tol) {
  for (const auto& [k, c] : a.terms())
    if (std::abs(c - b.coeff(k)) > tol) return false;
  for (const auto& [k, c] : b.terms())
    if (std::abs(c - a.coeff(k)) > tol) return false;
  return true;
}

double vanish_threshold(const Jet& j, double rel) { return rel * std::max(1.0, j.max_abs()); }

Jet curve_derivative(const Jet& f, int j, int k) {
  Jet r(std::max(0, f.trunc_degree() - j - k), false);
  const double scale = factorial(j) * factorial(k);
  for (const auto& [key, c] : f.terms())
    if (key[Var::z2] == j && key[Var::z2bar] == k && key[Var::t] == 0)
      r.add_term({key[Var::z1], key[Var::z1bar], 0, 0, 0}, c * scale);
  return r.prune();
}

Jet curve_t_derivative(const Jet& f) {
  Jet r(std::max(0, f.trunc_degree() - 1), f.real_flag());
  for (const auto& [key, c] : f.terms())
    if (key[Var::z2] == 0 && key[Var::z2bar] == 0 && key[Var::t] == 1)
      r.add_term({key[Var::z1], key[Var::z1bar], 0, 0, 0}, c);
  return r.prune();
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

JetEvaluator::JetEvaluator(const Jet& j) {
  terms_.reserve(j.size());
  for (const auto& [k, c] : j.terms()) {
    Term t{};
    for (int i = 0; i < 5; ++i) {
      if (k.e[i] > 255) throw Error(ErrorKind::InvalidArgument, "exponent too large for evaluator");
      t.e[i] = static_cast<std::uint8_t>(k.e[i]);
      max_exp_ = std::max(max_exp_, k.e[i]);
    }
    t.c = c;
    terms_.push_back(t);
  }
}

cplx JetEvaluator::operator()(const Point5& p) const {
  const cplx base[5] = {p.z1, std::conj(p.z1), p.z2, std::conj(p.z2), cplx(p.t, 0.0)};
  constexpr int kStack = 64;
  if (max_exp_ < kStack) {
    cplx pw[5][kStack];
    for (int v = 0; v < 5; ++v) {
      pw[v][0] = 1.0;
      for (int i = 1; i <= max_exp_; ++i) pw[v][i] = pw[v][i - 1] * base[v];
    }
    cplx s{};
    for (const auto& t : terms_)
      s += t.c * pw[0][t.e[0]] * pw[1][t.e[1]] * pw[2][t.e[2]] * pw[3][t.e[3]] * pw[4][t.e[4]];
    return s;
  }
  cplx s{};
  for (const auto& t : terms_) {
    cplx m = t.c;
    for (int v = 0; v < 5; ++v) m *= std::pow(base[v], static_cast<int>(t.e[v]));
    s += m;
  }
  return s;
}

}  // namespace pcvx3
