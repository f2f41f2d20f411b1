#pragma once

// Truncated power series in the five formal variables (z1, z̄1, z2, z̄2, t),
// t standing for Im(z3). Coefficients are complex doubles; every operation
// returns a canonical jet (near-zero coefficients pruned).

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pcvx3 {

using cplx = std::complex<double>;

enum class Var : int { z1 = 0, z1bar = 1, z2 = 2, z2bar = 3, t = 4 };

const char* var_name(Var v);

struct ExponentKey {
  std::array<int, 5> e{};

  constexpr ExponentKey() = default;
  constexpr ExponentKey(int a, int b, int c, int d, int t) : e{a, b, c, d, t} {}

  constexpr int operator[](Var v) const { return e[static_cast<int>(v)]; }
  constexpr int& operator[](Var v) { return e[static_cast<int>(v)]; }

  constexpr int total() const { return e[0] + e[1] + e[2] + e[3] + e[4]; }

  // Exponent key of the complex-conjugate monomial.
  constexpr ExponentKey conjugate() const { return {e[1], e[0], e[3], e[2], e[4]}; }

  constexpr ExponentKey operator+(const ExponentKey& o) const {
    return {e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3], e[4] + o.e[4]};
  }

  auto operator<=>(const ExponentKey&) const = default;

  std::string to_string() const;  // "a,b,c,d,e"
  static ExponentKey parse(const std::string& text);
};

// Evaluation point (z1, z2, Im z3).
struct Point5 {
  cplx z1{};
  cplx z2{};
  double t = 0.0;
};

// Default relative magnitude below which coefficients are dropped after
// each operation.
inline constexpr double kPruneRelative = 1e-14;
// Default relative tolerance for "= 0" decisions on coefficients.
inline constexpr double kVanishRelative = 1e-9;

class Jet {
 public:
  using TermMap = std::map<ExponentKey, cplx>;

  explicit Jet(int trunc_degree = 0, bool real = false);

  static Jet constant(int trunc_degree, cplx value);
  static Jet monomial(int trunc_degree, const ExponentKey& key, cplx coeff = 1.0);
  static Jet variable(int trunc_degree, Var v);

  int trunc_degree() const { return trunc_; }
  bool real_flag() const { return real_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  cplx coeff(const ExponentKey& key) const;
  double max_abs() const;
  int max_total_degree() const;  // -1 for the zero jet

  // Accumulates coeff into key; keys above the truncation degree are dropped.
  void add_term(const ExponentKey& key, cplx coeff);
  void set_real_flag(bool real) { real_ = real; }

  // Drops coefficients with |c| <= rel * max_abs(), and exact zeros.
  Jet& prune(double rel = kPruneRelative);

  Jet with_real_flag(bool real) const;
  Jet truncated(int degree) const;
  // Re-declares the truncation degree. Raising it treats the stored
  // polynomial as exact.
  Jet with_trunc(int degree) const;

  Jet conj() const;
  Jet real_part() const;  // (j + conj j)/2
  Jet imag_part() const;  // (j - conj j)/(2i)

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(cplx s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= cplx(s); }
  friend Jet operator*(double s, Jet a) { return a *= cplx(s); }

 private:
  int trunc_;
  bool real_;
  TermMap terms_;
};

Jet jet_mul(const Jet& a, const Jet& b);
Jet jet_pow(const Jet& a, int n);
Jet operator*(const Jet& a, const Jet& b);

// Formal Wirtinger / partial derivative; truncation degree drops by order.
Jet wirtinger_derive(const Jet& j, Var v, int order = 1);

// Composition t <- t + q, q free of t and with q(0) = 0.
Jet substitute_t(const Jet& j, const Jet& q);

// Composition z2 <- h, z̄2 <- conj(h), t <- s, with h and s expressed in the
// same formal slots (z1 slot = w1, z2 slot = w2) and vanishing at 0.
Jet substitute_fiber(const Jet& j, const Jet& h, const Jet& s);

cplx jet_eval(const Jet& j, const Point5& p);

bool is_real(const Jet& j, double tol);

// Coefficientwise equality within tol (absolute).
bool approx_equal(const Jet& a, const Jet& b, double tol);

// Absolute threshold used for "= 0" decisions on coefficients of j:
// rel * max(1, max_abs(j)).
double vanish_threshold(const Jet& j, double rel = kVanishRelative);

// d^j/dz2^j d^k/dz̄2^k of f at z2 = t = 0, as a jet in (z1, z̄1) only.
Jet curve_derivative(const Jet& f, int j, int k);
// d/dt f at z2 = t = 0, as a jet in (z1, z̄1) only.
Jet curve_t_derivative(const Jet& f);

// n! as a double (exact up to n = 22).
double factorial(int n);

// Flat evaluator for repeated evaluation of a fixed jet at many points.
class JetEvaluator {
 public:
  explicit JetEvaluator(const Jet& j);
  cplx operator()(const Point5& p) const;
  int max_exponent() const { return max_exp_; }

 private:
  struct Term {
    std::array<std::uint8_t, 5> e;
    cplx c;
  };
  std::vector<Term> terms_;
  int max_exp_ = 0;
};

}  // namespace pcvx3
