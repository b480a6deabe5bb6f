#include "xrt/exponents.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "xrt/error.hpp"

namespace xrt {

namespace {

std::int64_t parse_integer(std::string_view text, std::string_view whole) {
  std::int64_t out = 0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorKind::parse, "not an exact rational (use num/den): '" + std::string(whole) + "'");
  }
  return out;
}

void require_dimension(int d) {
  if (d < 3) throw Error(ErrorKind::dimension, "dimension must be at least 3, got " + std::to_string(d));
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
  std::int64_t num = parse_integer(text.substr(0, slash), text);
  std::int64_t den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw Error(ErrorKind::parse, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

double to_double(const Rational& value) {
  return static_cast<double>(value.numerator()) / static_cast<double>(value.denominator());
}

Exponent::Exponent(Rational value) {
  if (value < Rational(1)) throw Error(ErrorKind::domain, "exponent must be >= 1, got " + to_string(value));
  reciprocal_ = Rational(1) / value;
}

Exponent Exponent::infinity() { return from_reciprocal(Rational(0)); }

Exponent Exponent::from_reciprocal(Rational reciprocal) {
  if (reciprocal < Rational(0) || reciprocal > Rational(1)) {
    throw Error(ErrorKind::domain, "reciprocal exponent outside [0,1]: " + to_string(reciprocal));
  }
  Exponent e;
  e.reciprocal_ = reciprocal;
  return e;
}

Exponent Exponent::parse(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "oo") return infinity();
  return Exponent(parse_rational(text));
}

Rational Exponent::value() const {
  if (is_infinite()) throw Error(ErrorKind::domain, "infinite exponent has no finite value");
  return Rational(1) / reciprocal_;
}

double Exponent::as_double() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return 1.0 / to_double(reciprocal_);
}

std::string Exponent::str() const { return is_infinite() ? "inf" : to_string(value()); }

std::string ExponentTriple::str() const { return "p=" + p.str() + " q=" + q.str() + " r=" + r.str(); }

Rational theta_zero(int d) {
  require_dimension(d);
  const std::int64_t dd = d;
  return Rational(dd * dd + dd - 2, dd * dd + dd);
}

ExponentTriple triple_for_theta(int d, Rational theta) {
  require_dimension(d);
  if (theta < Rational(0) || theta >= Rational(1)) {
    throw Error(ErrorKind::domain, "theta must lie in [0,1), got " + to_string(theta));
  }
  const std::int64_t dd = d;
  const Rational inv_p = Rational(1) - theta + theta * Rational(dd, dd + 2);
  const Rational inv_q = theta * Rational(dd, dd + 2);
  const Rational inv_r = Rational(1) - theta + theta * Rational(dd * dd - dd - 2, dd * dd + dd - 2);
  return {Exponent::from_reciprocal(inv_p), Exponent::from_reciprocal(inv_q), Exponent::from_reciprocal(inv_r)};
}

ExponentTriple endpoint_triple(int d) {
  require_dimension(d);
  const std::int64_t dd = d;
  return {Exponent::from_reciprocal(Rational(dd, dd + 2)), Exponent::from_reciprocal(Rational(dd, dd + 2)),
          Exponent::from_reciprocal(Rational(dd * dd - dd - 2, dd * dd + dd - 2))};
}

ExponentTriple conjugate(const ExponentTriple& t) { return t.conjugate(); }

ExponentTriple interpolate(const ExponentTriple& e0, const ExponentTriple& e1, Rational theta) {
  if (theta < Rational(0) || theta > Rational(1)) throw Error(ErrorKind::domain, "theta must lie in [0,1]");
  auto mix = [&](const Exponent& a, const Exponent& b) {
    return Exponent::from_reciprocal((Rational(1) - theta) * a.reciprocal() + theta * b.reciprocal());
  };
  return {mix(e0.p, e1.p), mix(e0.q, e1.q), mix(e0.r, e1.r)};
}

InterpConstants interp_constants(const ExponentTriple& endpoint0, const ExponentTriple& endpoint1,
                                 Rational theta) {
  InterpConstants ic;
  ic.endpoint0 = endpoint0;
  ic.endpoint1 = endpoint1;
  ic.theta = theta;
  ic.intermediate = interpolate(endpoint0, endpoint1, theta);

  // Reciprocals of the conjugate exponents: V_j = 1/v_j', U_j = 1/u_j', S_j = 1/s_j.
  const Rational v0 = endpoint0.r.conjugate().reciprocal();
  const Rational v1 = endpoint1.r.conjugate().reciprocal();
  const Rational u0 = endpoint0.q.conjugate().reciprocal();
  const Rational u1 = endpoint1.q.conjugate().reciprocal();
  const Rational s0 = endpoint0.p.reciprocal();
  const Rational s1 = endpoint1.p.reciprocal();
  const Rational u = ic.intermediate.q.conjugate().reciprocal();

  if (v0 == v1) throw Error(ErrorKind::degenerate, "endpoints share the conjugate inner exponent v'");
  if (u == Rational(0)) throw Error(ErrorKind::domain, "intermediate u' is infinite");

  ic.a0 = v0 / (v0 - v1);
  ic.a1 = v1 / (v0 - v1);
  ic.b = (v0 * u1 - u0 * v1) / (u * (v1 - v0));
  ic.c0 = v0 * (s0 - s1) / (v1 - v0);
  ic.c1 = v1 * (s0 - s1) / (v1 - v0);
  ic.d0 = u0 - (u1 - u0) * v0 / (v1 - v0);
  ic.d1 = u1 - (u1 - u0) * v1 / (v1 - v0);
  return ic;
}

double k0_index(const InterpConstants& ic, const K0Inputs& in) {
  for (double m : {in.c0, in.c1, in.a, in.measure_e, in.g_norm}) {
    if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::domain, "k0 inputs must be positive and finite");
  }
  const Rational v0 = ic.endpoint0.r.conjugate().reciprocal();
  const Rational u0 = ic.endpoint0.q.conjugate().reciprocal();
  const Rational s0 = ic.endpoint0.p.reciprocal();
  const Rational v = ic.intermediate.r.conjugate().reciprocal();
  const Rational u = ic.intermediate.q.conjugate().reciprocal();
  const Rational s = ic.intermediate.p.reciprocal();
  if (v == v0) throw Error(ErrorKind::degenerate, "v' equals v0'; k0 is undefined");
  if (v == Rational(0) || u == Rational(0)) throw Error(ErrorKind::domain, "intermediate conjugate exponents must be finite");

  // v'/v0' = V0/V and u'/u0' = U0/U in reciprocal form.
  const Rational v_ratio = v0 / v;
  const Rational u_ratio = u0 / u;
  const double lead = 1.0 / to_double(Rational(1) - v_ratio);
  const double body = to_double(ic.theta) * std::log2(in.c1 / in.c0) +
                      to_double(u_ratio - v_ratio) * std::log2(in.a) +
                      to_double(s - s0) * std::log2(in.measure_e) +
                      to_double(Rational(1) - u_ratio) * std::log2(in.g_norm);
  return lead * body;
}

double balance_ratio(int d, Rational theta, double measure_e, double mixed_norm_f, double measure_f) {
  if (!(measure_e > 0.0) || !(mixed_norm_f > 0.0) || !(measure_f > 0.0)) {
    throw Error(ErrorKind::domain, "balance_ratio needs positive measures and norm");
  }
  const ExponentTriple at0 = triple_for_theta(d, theta_zero(d));
  const ExponentTriple at = triple_for_theta(d, theta);
  const double num = std::pow(measure_e, at0.p.reciprocal_double()) *
                     std::pow(measure_f, at0.q.conjugate().reciprocal_double());
  const double den = std::pow(measure_e, at.p.reciprocal_double()) * mixed_norm_f;
  return num / den;
}

}  // namespace xrt
