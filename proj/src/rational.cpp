#include <cctype>
#include <cstdint>
#include <string>

#include "rtsched/types.hpp"

namespace rtsched {

std::string to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::int64_t parse_int(const std::string& s, const std::string& ctx) {
  if (s.empty()) throw Error(ErrorKind::Parse, "empty number in " + ctx);
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "bad number '" + s + "' in " + ctx);
  }
  if (pos != s.size())
    throw Error(ErrorKind::Parse, "bad number '" + s + "' in " + ctx);
  return v;
}

}  // namespace

Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    std::int64_t num = parse_int(text.substr(0, slash), "rational");
    std::int64_t den = parse_int(text.substr(slash + 1), "rational");
    if (den <= 0)
      throw Error(ErrorKind::Parse, "non-positive denominator in '" + text + "'");
    return Rat(num, den);
  }
  auto dot = text.find('.');
  if (dot == std::string::npos) return Rat(parse_int(text, "rational"));
  std::string whole = text.substr(0, dot);
  std::string frac = text.substr(dot + 1);
  if (frac.size() > 6)
    throw Error(ErrorKind::Parse,
                "decimal '" + text + "' has more than 6 places");
  for (char c : frac)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorKind::Parse, "bad decimal '" + text + "'");
  bool negative = !whole.empty() && whole[0] == '-';
  std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole, "rational");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  std::int64_t f = frac.empty() ? 0 : parse_int(frac, "rational");
  std::int64_t num = std::abs(w) * den + f;
  if (negative || w < 0) num = -num;
  return Rat(num, den);
}

}  // namespace rtsched
