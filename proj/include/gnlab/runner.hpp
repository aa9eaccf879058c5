#pragma once
// Command dispatch shared by the C API and the CLI.
//
// A run takes a JSON config (see RunConfig), executes one command and returns
// a deterministic JSON report, a CSV table and a short text summary. Exit
// codes: 0 when every contract in scope holds, 1 when one fails, 2 when the
// config is invalid.

#include "gnlab/error.hpp"
#include "gnlab/json_io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gnlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitContractFailed = 1;
inline constexpr int kExitConfigInvalid = 2;

enum class Command { kExponents, kVerify, kCover, kSharpness, kConstant };
enum class VerifyCheck { kGn, kLine, kGn21, kMean, kInterval, kModular, kChain };
enum class OutputFormat { kJson, kCsv };

std::string_view command_name(Command command) noexcept;
std::string_view check_name(VerifyCheck check) noexcept;

struct RunConfig {
  Command command = Command::kExponents;
  VerifyCheck check = VerifyCheck::kGn;
  GNParams params;
  bool has_theta = false;
  std::vector<FamilySpec> families;
  std::optional<GridSpec> grid;
  std::optional<std::string> input;  // grid container path, instead of families
  std::vector<double> s_values;
  std::vector<double> dilations;
  std::optional<Box> region;
  std::vector<double> t_values;
  bool fixed_box = false;
  bool refine = false;
  bool search = true;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  OutputFormat format = OutputFormat::kJson;
};

/// Throws kConfigInvalid (or kParseError) on malformed input.
RunConfig config_from_json(const Json& value);
Json to_json(const RunConfig& config);

/// Largest grid the runner accepts, in samples.
inline constexpr std::size_t kMaxGridSamples = std::size_t{1} << 28;

struct RunResult {
  int exit_code = kExitOk;
  ErrorCode status = ErrorCode::kOk;
  Json report;
  std::string csv;
  std::string summary;
};

RunResult run(const RunConfig& config);
/// Parses the text and runs it; parse failures give exit code 2.
RunResult run_json(const std::string& config_text);

}  // namespace gnlab
