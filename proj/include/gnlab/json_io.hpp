#pragma once
// JSON encodings of the domain types, CSV ratio tables, and the binary
// GridFunction container.
//
// Rationals are {"num": int, "den": int}; infinity is the string "inf". On
// input a rational may also be an integer or a "num/den" / decimal string.
//
// Container layout (all integers little-endian):
//   "GNLB" | u32 version | u64 header bytes | JSON header | f64 samples, row-major

#include "gnlab/covering.hpp"
#include "gnlab/exponents.hpp"
#include "gnlab/gridfn.hpp"
#include "gnlab/verifier.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace gnlab {

using Json = nlohmann::json;

Json to_json(const Rational& value);
Json to_json(const ExtReal& value);
Rational rational_from_json(const Json& value);
ExtReal ext_from_json(const Json& value);

/// Non-finite doubles become "inf", "-inf" or "nan".
Json number_json(double value);

Json to_json(const GNParams& params);
/// Fields n, j, k, theta, q, r and optional p. Missing theta is left at 0.
GNParams params_from_json(const Json& value);

Json to_json(const FamilySpec& spec);
FamilySpec family_from_json(const Json& value);
Json to_json(const Box& box);
Box box_from_json(const Json& value);
Json to_json(const GridSpec& grid);
GridSpec grid_from_json(const Json& value);

Json to_json(const AdmissibilityVerdict& verdict);
Json to_json(const InequalityRecord& record);
Json to_json(const VerificationReport& report);
/// label,s,ratio with a header row.
/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);
std::string ratio_table_csv(const VerificationReport& report);

Json to_json(const BalancedCover& cover);
Json to_json(const CoverSumBound& bound);

void write_grid(std::ostream& out, const GridFunction& u);
GridFunction read_grid(std::istream& in);
void save_grid(const std::string& path, const GridFunction& u);
GridFunction load_grid(const std::string& path);
/// "x,u" rows in 1-D, "x,y,u" in 2-D. Throws kInvalidArgument for n > 2.
std::string grid_csv(const GridFunction& u);

}  // namespace gnlab
