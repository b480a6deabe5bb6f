#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace xrt {

using Rational = boost::rational<std::int64_t>;

/// Parses `num/den` or a bare integer. Decimal input is rejected so that
/// exponent arithmetic stays exact.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
double to_double(const Rational& value);

/// A Lebesgue exponent e in [1, inf], stored through its reciprocal 1/e so that
/// infinity is the distinguished value 0 and conjugation is 1 - 1/e.
class Exponent {
 public:
  Exponent() = default;
  Exponent(Rational value);  // NOLINT(google-explicit-constructor)

  static Exponent infinity();
  static Exponent from_reciprocal(Rational reciprocal);
  /// Accepts `inf`, `num/den` or an integer.
  static Exponent parse(std::string_view text);

  bool is_infinite() const { return reciprocal_ == Rational(0); }
  Rational reciprocal() const { return reciprocal_; }
  Rational value() const;
  double as_double() const;
  double reciprocal_double() const { return to_double(reciprocal_); }
  Exponent conjugate() const { return from_reciprocal(Rational(1) - reciprocal_); }

  std::string str() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  Rational reciprocal_{1};
};

struct ExponentTriple {
  Exponent p;
  Exponent q;
  Exponent r;

  ExponentTriple conjugate() const { return {p.conjugate(), q.conjugate(), r.conjugate()}; }
  /// `p=3/2 q=2 r=2`
  std::string str() const;

  friend bool operator==(const ExponentTriple&, const ExponentTriple&) = default;
};

/// The exponent (d^2+d-2)/(d^2+d) at which q = r.
Rational theta_zero(int d);

/// Exponents on the boundedness line, 1/p = 1-theta+theta d/(d+2),
/// 1/q = theta d/(d+2), 1/r = 1-theta+theta(d^2-d-2)/(d^2+d-2), theta in [0,1).
ExponentTriple triple_for_theta(int d, Rational theta);

/// The theta = 1 endpoint of the same line. It is excluded from the strong-type
/// range but serves as an interpolation endpoint.
ExponentTriple endpoint_triple(int d);

ExponentTriple conjugate(const ExponentTriple& t);

/// Constants relating two restricted-weak-type endpoints (s_j, u_j, v_j) and the
/// interpolated triple at `theta`.
struct InterpConstants {
  ExponentTriple endpoint0;
  ExponentTriple endpoint1;
  ExponentTriple intermediate;
  Rational theta;
  Rational a0, a1, b, c0, c1, d0, d1;
};

/// Interpolated triple: reciprocals are (1-theta) * endpoint0 + theta * endpoint1.
ExponentTriple interpolate(const ExponentTriple& e0, const ExponentTriple& e1, Rational theta);

/// Throws ErrorKind::degenerate when the conjugate inner exponents coincide and
/// ErrorKind::domain when theta is outside [0,1] or b would need an infinite u'.
InterpConstants interp_constants(const ExponentTriple& endpoint0, const ExponentTriple& endpoint1,
                                 Rational theta);

struct K0Inputs {
  double c0 = 1.0;
  double c1 = 1.0;
  double a = 1.0;
  double measure_e = 1.0;
  double g_norm = 1.0;
};

/// Central dyadic index k0 of the level sets carrying the pairing. Logs are base 2.
double k0_index(const InterpConstants& ic, const K0Inputs& in);

/// |E|^{1/p_theta0} |F|^{1/q'_theta0} / (|E|^{1/p_theta} * mixed_norm_f).
double balance_ratio(int d, Rational theta, double measure_e, double mixed_norm_f, double measure_f);

}  // namespace xrt
