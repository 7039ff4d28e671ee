#include "circleflow/rational.hpp"

#include <cctype>
#include <cmath>

#include "circleflow/errors.hpp"

namespace circleflow {

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw validation_error("rational denominator is zero");
  // mpq division canonicalizes; never build a Rat from a raw "p/q" string,
  // which the backend stores verbatim without reducing.
  return Rat(num) / Rat(den);
}

static Int parse_integer(const std::string& s, const std::string& whole) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  if (i == s.size())
    throw validation_error("malformed rational '" + whole + "'");
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw validation_error("malformed rational '" + whole + "'");
  return Int(s[0] == '+' ? s.substr(1) : s);
}

Rat parse_rat(const std::string& text) {
  const std::string ws = " \t\r\n";
  std::size_t b = text.find_first_not_of(ws);
  if (b == std::string::npos) throw validation_error("empty rational");
  std::size_t e = text.find_last_not_of(ws);
  std::string s = text.substr(b, e - b + 1);

  std::size_t slash = s.find('/');
  if (slash == std::string::npos) return Rat(parse_integer(s, s));
  Int p = parse_integer(s.substr(0, slash), s);
  if (slash + 1 >= s.size())
    throw validation_error("malformed rational '" + s + "'");
  Int q = parse_integer(s.substr(slash + 1), s);
  if (q <= 0)
    throw validation_error("rational denominator must be positive in '" + s + "'");
  return make_rat(p, q);
}

std::string format_rat(const Rat& x) {
  Int n = numerator(x);
  Int d = denominator(x);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

double to_double(const Rat& x) { return x.convert_to<double>(); }

Rat rat_of_double(double x) {
  if (!std::isfinite(x)) throw validation_error("non-finite real where a number is required");
  return Rat(x);  // mpq_set_d is exact and canonical for finite doubles
}

Int floor_rat(const Rat& x) {
  Int n = numerator(x);
  Int d = denominator(x);  // canonical => d > 0
  Int q = n / d;           // truncates toward zero
  if (n % d != 0 && n < 0) --q;
  return q;
}

Rat reduce_mod(const Rat& x, const Rat& m) {
  if (m <= 0) throw validation_error("modulus must be positive");
  Rat r = x - Rat(floor_rat(x / m)) * m;
  if (r < 0) r += m;    // unreachable mathematically; guards any backend surprise
  if (r >= m) r -= m;
  return r;
}

}  // namespace circleflow
