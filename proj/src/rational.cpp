#include "gnlab/rational.hpp"

#include "gnlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace gnlab {

namespace {

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

BigInt parse_integer(const std::string& text) {
  if (text.empty()) fail(ErrorCode::kParseError, "empty integer");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) fail(ErrorCode::kParseError, "bad integer '" + text + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      fail(ErrorCode::kParseError, "bad integer '" + text + "'");
  }
  BigInt value(text[0] == '+' ? text.substr(1) : text);
  return value;
}

}  // namespace

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) fail(ErrorCode::kInvalidArgument, "zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

Rational parse_rational(std::string_view raw) {
  const std::string text = trim(raw);
  if (text.empty()) fail(ErrorCode::kParseError, "empty rational");
  if (auto slash = text.find('/'); slash != std::string::npos) {
    BigInt num = parse_integer(trim(text.substr(0, slash)));
    BigInt den = parse_integer(trim(text.substr(slash + 1)));
    if (den == 0) fail(ErrorCode::kParseError, "zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(),
                                     [](unsigned char c) { return std::isdigit(c); }))
      fail(ErrorCode::kParseError, "bad decimal '" + text + "'");
    bool negative = !whole.empty() && whole[0] == '-';
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(frac.size()));
    BigInt magnitude = abs(parse_integer(whole)) * scale + BigInt(frac);
    return Rational(negative ? BigInt(-magnitude) : magnitude, scale);
  }
  return Rational(parse_integer(text));
}

std::string to_string(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

bool is_nonnegative_integer(const Rational& value) {
  return denominator(value) == 1 && value >= 0;
}

ExtReal ExtReal::from_reciprocal(const Rational& recip) {
  if (recip == 0) return infinity();
  return ExtReal(Rational(1) / recip);
}

const Rational& ExtReal::value() const {
  if (infinite_) fail(ErrorCode::kInvalidArgument, "value() of infinity");
  return value_;
}

Rational ExtReal::reciprocal() const {
  if (infinite_) return Rational(0);
  if (value_ == 0) fail(ErrorCode::kInvalidArgument, "reciprocal of zero");
  return Rational(1) / value_;
}

double ExtReal::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : gnlab::to_double(value_);
}

double ExtReal::reciprocal_double() const { return gnlab::to_double(reciprocal()); }

bool operator==(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
  if (a.infinite_) return std::partial_ordering::greater;
  if (b.infinite_) return std::partial_ordering::less;
  if (a.value_ < b.value_) return std::partial_ordering::less;
  if (a.value_ > b.value_) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

ExtReal parse_ext(std::string_view raw) {
  std::string text = trim(raw);
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return ExtReal::infinity();
  return ExtReal(parse_rational(text));
}

std::string to_string(const ExtReal& value) {
  return value.is_infinite() ? std::string("inf") : to_string(value.value());
}

}  // namespace gnlab
