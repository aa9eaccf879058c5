#include "gnlab/json_io.hpp"

#include "gnlab/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gnlab {

namespace {

constexpr char kMagic[4] = {'G', 'N', 'L', 'B'};
constexpr std::uint32_t kContainerVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    fail(ErrorCode::kParseError, "truncated grid container");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::vector<double> doubles(const Json& value, const char* what) {
  if (!value.is_array()) fail(ErrorCode::kParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& item : value) {
    if (!item.is_number()) fail(ErrorCode::kParseError, std::string(what) + " must hold numbers");
    out.push_back(item.get<double>());
  }
  return out;
}

int integer_field(const Json& object, const char* key, int fallback) {
  if (!object.contains(key)) return fallback;
  const auto& v = object.at(key);
  if (!v.is_number_integer()) fail(ErrorCode::kParseError, std::string(key) + " must be an integer");
  return v.get<int>();
}

std::string format_double(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

}  // namespace

Json to_json(const Rational& value) {
  const BigInt num = numerator(value), den = denominator(value);
  if (num > std::numeric_limits<std::int64_t>::max() || num < std::numeric_limits<std::int64_t>::min() ||
      den > std::numeric_limits<std::int64_t>::max())
    return to_string(value);
  return Json{{"num", static_cast<std::int64_t>(num)}, {"den", static_cast<std::int64_t>(den)}};
}

Json to_json(const ExtReal& value) {
  if (value.is_infinite()) return "inf";
  return to_json(value.value());
}

Rational rational_from_json(const Json& value) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_object() && value.contains("num")) {
    const auto& num = value.at("num");
    const Json den = value.value("den", Json(1));
    if (!num.is_number_integer() || !den.is_number_integer())
      fail(ErrorCode::kParseError, "rational num/den must be integers");
    if (den.get<std::int64_t>() == 0) fail(ErrorCode::kParseError, "zero denominator");
    return make_rational(num.get<std::int64_t>(), den.get<std::int64_t>());
  }
  if (value.is_number_float()) {
    // Shortest round-trip decimal, so 2.4 reads as 12/5.
    char buffer[512];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value.get<double>(),
                                      std::chars_format::fixed);
    if (result.ec != std::errc()) fail(ErrorCode::kParseError, "unrepresentable number");
    return parse_rational(std::string_view(buffer, static_cast<std::size_t>(result.ptr - buffer)));
  }
  fail(ErrorCode::kParseError, "cannot read a rational from " + value.dump());
}

ExtReal ext_from_json(const Json& value) {
  if (value.is_string()) return parse_ext(value.get<std::string>());
  return rational_from_json(value);
}

Json number_json(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

Json to_json(const GNParams& params) {
  Json out{{"n", params.n}, {"j", params.j}, {"k", params.k}, {"theta", to_json(params.theta)},
           {"q", to_json(params.q)}, {"r", to_json(params.r)}};
  if (params.p) out["p"] = to_json(*params.p);
  return out;
}

GNParams params_from_json(const Json& value) {
  if (!value.is_object()) fail(ErrorCode::kParseError, "params must be an object");
  GNParams params;
  params.n = integer_field(value, "n", 1);
  params.j = integer_field(value, "j", 0);
  params.k = integer_field(value, "k", 1);
  if (value.contains("theta")) params.theta = rational_from_json(value.at("theta"));
  if (value.contains("q")) params.q = ext_from_json(value.at("q"));
  if (value.contains("r")) params.r = ext_from_json(value.at("r"));
  if (value.contains("p") && !value.at("p").is_null()) params.p = ext_from_json(value.at("p"));
  return params;
}

Json to_json(const FamilySpec& spec) {
  Json out{{"kind", std::string(family_name(spec.kind))},
           {"params", spec.shape_params},
           {"center", spec.center}};
  if (spec.amplitude != 1.0) out["amplitude"] = spec.amplitude;
  return out;
}

FamilySpec family_from_json(const Json& value) {
  if (!value.is_object() || !value.contains("kind"))
    fail(ErrorCode::kParseError, "family needs a kind");
  FamilySpec spec;
  spec.kind = parse_family_kind(value.at("kind").get<std::string>());
  if (value.contains("params")) spec.shape_params = doubles(value.at("params"), "family params");
  if (value.contains("center")) spec.center = doubles(value.at("center"), "family center");
  if (value.contains("amplitude")) spec.amplitude = value.at("amplitude").get<double>();
  return spec;
}

Json to_json(const Box& box) { return Json{{"lo", box.lo}, {"hi", box.hi}}; }

Box box_from_json(const Json& value) {
  if (!value.is_object()) fail(ErrorCode::kParseError, "box must be an object");
  Box box{doubles(value.at("lo"), "box lo"), doubles(value.at("hi"), "box hi")};
  if (box.lo.size() != box.hi.size() || box.lo.empty())
    fail(ErrorCode::kParseError, "box lo/hi must be non-empty and of equal length");
  return box;
}

Json to_json(const GridSpec& grid) { return Json{{"box", to_json(grid.box)}, {"shape", grid.shape}}; }

GridSpec grid_from_json(const Json& value) {
  if (!value.is_object()) fail(ErrorCode::kParseError, "grid must be an object");
  GridSpec grid;
  grid.box = box_from_json(value.at("box"));
  for (const auto& m : value.at("shape")) {
    if (!m.is_number_integer() || m.get<std::int64_t>() < 1)
      fail(ErrorCode::kParseError, "grid shape must hold positive integers");
    grid.shape.push_back(m.get<std::size_t>());
  }
  if (grid.shape.size() != grid.box.dim()) fail(ErrorCode::kParseError, "grid shape/box mismatch");
  return grid;
}

Json to_json(const AdmissibilityVerdict& verdict) {
  Json out{{"admissible", verdict.admissible}, {"reason", std::string(reason_name(verdict.reason))}};
  if (!verdict.detail.empty()) out["detail"] = verdict.detail;
  return out;
}

Json to_json(const InequalityRecord& record) {
  Json factors = Json::array();
  for (const auto& f : record.factors)
    factors.push_back({{"order", f.order}, {"norm_exp", to_json(f.norm_exp)}, {"power", to_json(f.power)}});
  Json constants = Json::object();
  for (const auto& [name, power] : record.constant_expr) constants[name] = to_json(power);
  return Json{{"lhs_order", record.lhs_order},
              {"lhs_exp", to_json(record.lhs_exp)},
              {"factors", factors},
              {"constant", constants},
              {"text", record.to_string()}};
}

Json to_json(const VerificationReport& report) {
  Json rows = Json::array();
  for (const auto& row : report.rows)
    rows.push_back({{"label", row.label}, {"s", number_json(row.s)}, {"ratio", number_json(row.ratio)}});
  Json values = Json::object();
  for (const auto& [key, v] : report.values) values[key] = number_json(v);
  Json deltas = Json::object();
  for (const auto& [key, v] : report.refinement_deltas) deltas[key] = number_json(v);
  Json out{{"case_id", report.case_id},
           {"family", report.family_description},
           {"rows", rows},
           {"ratios",
            {{"count", report.rows.size()},
             {"min", number_json(report.ratio_min())},
             {"max", number_json(report.ratio_max())},
             {"mean", number_json(report.ratio_mean())}}},
           {"flags", report.flags},
           {"values", values},
           {"exact", report.exact},
           {"refinement_deltas", deltas},
           {"warnings", report.warnings},
           {"passed", report.passed()}};
  if (report.estimated_constant) {
    out["estimated_constant"] = number_json(*report.estimated_constant);
    out["argmax"] = report.argmax;
  }
  if (report.slope) {
    const auto& fit = *report.slope;
    Json log_ratios = Json::array();
    for (double v : fit.log_ratios) log_ratios.push_back(number_json(v));
    out["slope"] = {{"s_values", fit.s_values},
                    {"log_ratios", log_ratios},
                    {"discarded_s", fit.discarded_s},
                    {"slope", number_json(fit.slope)},
                    {"intercept", number_json(fit.intercept)},
                    {"deficit", to_json(fit.deficit)}};
  }
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
  return quoted + "\"";
}

std::string ratio_table_csv(const VerificationReport& report) {
  std::ostringstream out;
  out << "label,s,ratio\n";
  for (const auto& row : report.rows)
    out << csv_field(row.label) << ',' << format_double(row.s) << ',' << format_double(row.ratio) << '\n';
  return out.str();
}

Json to_json(const BalancedCover& cover) {
  Json intervals = Json::array();
  for (const auto& interval : cover.intervals)
    intervals.push_back({{"center", interval.center},
                         {"radius", interval.radius},
                         {"omega", interval.omega},
                         {"alpha", interval.alpha},
                         {"residual", interval.residual}});
  Json histogram = Json::object();
  const auto counts = cover.multiplicity_histogram();
  for (std::size_t m = 0; m < counts.size(); ++m) histogram[std::to_string(m)] = counts[m];
  return Json{{"intervals", intervals},
              {"histogram", histogram},
              {"max_multiplicity", cover.max_multiplicity},
              {"greedy_count", cover.greedy_count},
              {"greedy_max_multiplicity", cover.greedy_max_multiplicity},
              {"covers_support", cover.covers_support},
              {"max_residual", cover.max_residual},
              {"r0", cover.r0},
              {"support_diameter", cover.support_diameter},
              {"radius_bound", cover.radius_bound},
              {"max_balancing_length", cover.max_balancing_length}};
}

Json to_json(const CoverSumBound& bound) {
  return Json{{"exponent_identity", to_json(bound.exponent_identity)},
              {"holder_powers", {to_json(bound.holder_first), to_json(bound.holder_second)}},
              {"lhs", number_json(bound.lhs)},
              {"interval_sum", number_json(bound.interval_sum)},
              {"two_term_sum", number_json(bound.two_term_sum)},
              {"balanced_sum", number_json(bound.balanced_sum)},
              {"holder_bound", number_json(bound.holder_bound)},
              {"final_bound", number_json(bound.final_bound)},
              {"two_term_constant", number_json(bound.two_term_constant)},
              {"substitution_residual", number_json(bound.substitution_residual)},
              {"multiplicity", bound.multiplicity},
              {"ratio", number_json(bound.ratio)},
              {"chain_holds", bound.chain_holds}};
}

// ---------------------------------------------------------------------------

void write_grid(std::ostream& out, const GridFunction& u) {
  Json header{{"dim", u.dim()},
              {"box", to_json(u.box())},
              {"shape", u.shape()},
              {"interpolated", u.interpolated()},
              {"family", u.family() ? to_json(*u.family()) : Json(nullptr)}};
  const std::string text = header.dump();
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(out, kContainerVersion);
  put_le<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (double v : u.samples()) put_le<double>(out, v);
  if (!out) fail(ErrorCode::kIoError, "failed writing grid container");
}

GridFunction read_grid(std::istream& in) {
  char magic[4];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    fail(ErrorCode::kParseError, "not a grid container");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kContainerVersion)
    fail(ErrorCode::kParseError, "unsupported container version " + std::to_string(version));
  const auto length = get_le<std::uint64_t>(in);
  if (length > (1u << 24)) fail(ErrorCode::kParseError, "grid header too large");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length)))
    fail(ErrorCode::kParseError, "truncated grid header");
  Json header;
  try {
    header = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("grid header: ") + e.what());
  }
  GridSpec grid{box_from_json(header.at("box")), header.at("shape").get<std::vector<std::size_t>>()};
  std::size_t total = 1;
  for (auto m : grid.shape) total *= m;
  std::vector<double> samples(total);
  for (auto& v : samples) v = get_le<double>(in);
  std::optional<FamilySpec> family;
  if (header.contains("family") && !header.at("family").is_null())
    family = family_from_json(header.at("family"));
  GridFunction u(grid.box, grid.shape, std::move(samples), family);
  if (header.value("interpolated", false)) u.mark_interpolated();
  return u;
}

void save_grid(const std::string& path, const GridFunction& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write_grid(out, u);
}

GridFunction load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  return read_grid(in);
}

std::string grid_csv(const GridFunction& u) {
  if (u.dim() > 2) fail(ErrorCode::kInvalidArgument, "CSV export supports n <= 2");
  std::ostringstream out;
  out << (u.dim() == 1 ? "x,u\n" : "x,y,u\n");
  for (std::size_t flat = 0; flat < u.size(); ++flat) {
    for (double c : u.point(flat)) out << format_double(c) << ',';
    out << format_double(u[flat]) << '\n';
  }
  return out.str();
}

}  // namespace gnlab
