// Command-line front end over the C API.
//
//   gnlab exponents --n 2 --j 1 --k 2 --theta 1/2 --q 2 --r 2
//   gnlab cover --family bump --p 2 --q 2 --r 2 --output cover.json
//   gnlab sharpness --n 2 --j 1 --k 2 --theta 1/2 --q 2 --r 2 --p 11/5
//
// Flags override the fields of an optional --config file. The summary goes to
// stdout; with --output the report is written there and run metadata (which
// is not deterministic) goes to <output>.meta.json.

#include "gnlab/gnlab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using Json = nlohmann::json;

namespace {

constexpr int kExitConfigInvalid = 2;

struct Flags {
  std::string config_path;
  std::string output;
  std::string format;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  bool refine = false;
  bool fixed_box = false;
  bool no_search = false;
  std::optional<int> n, j, k, dim;
  std::string theta, p, q, r;
  std::string family, width, params, center, box, shape;
  std::string s_values, dilations, region, t_values, check, input;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + text + "' is not a comma-separated list of numbers");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

void add_run_options(CLI::App* app, Flags& f) {
  app->add_option("--n", f.n, "Dimension");
  app->add_option("--j", f.j, "Intermediate derivative order");
  app->add_option("--k", f.k, "Top derivative order");
  app->add_option("--theta", f.theta, "Interpolation weight, e.g. 1/2");
  app->add_option("--p", f.p, "Left exponent (rational or inf)");
  app->add_option("--q", f.q, "Function exponent (rational or inf)");
  app->add_option("--r", f.r, "Derivative exponent (rational)");
  app->add_option("--family", f.family, "gaussian, bump, sine_bump or poly_gaussian");
  app->add_option("--width", f.width, "Family width (first shape parameter)");
  app->add_option("--params", f.params, "All shape parameters, comma separated");
  app->add_option("--center", f.center, "Family center, comma separated");
  app->add_option("--box", f.box, "lo,hi for a cube or lo1,hi1,lo2,hi2,... per axis");
  app->add_option("--shape", f.shape, "Points per axis, one value or one per axis");
  app->add_option("--dim", f.dim, "Dimension of the default grid and center");
  app->add_option("--input", f.input, "Grid container to use instead of a family");
}

Json build_config(const std::string& command, const Flags& f) {
  Json config = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream file(f.config_path);
    if (!file) throw CLI::ValidationError("--config", "cannot read " + f.config_path);
    try {
      config = Json::parse(file);
    } catch (const Json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!config.is_object()) throw CLI::ValidationError("--config", "config must be a JSON object");
  }
  config.erase("output");
  if (!command.empty()) config["command"] = command;

  Json& params = config["params"];
  if (params.is_null()) params = Json::object();
  if (f.n) params["n"] = *f.n;
  if (f.j) params["j"] = *f.j;
  if (f.k) params["k"] = *f.k;
  if (!f.theta.empty()) params["theta"] = f.theta;
  if (!f.p.empty()) params["p"] = f.p;
  if (!f.q.empty()) params["q"] = f.q;
  if (!f.r.empty()) params["r"] = f.r;
  if (params.empty()) config.erase("params");

  const int dim = f.dim.value_or(f.n.value_or(1));
  if (!f.family.empty() || !f.width.empty() || !f.params.empty() || !f.center.empty()) {
    Json family = config.contains("family") ? config["family"] : Json{{"kind", "gaussian"}};
    if (!f.family.empty()) family["kind"] = f.family;
    if (!f.params.empty()) {
      family["params"] = parse_list(f.params, "--params");
    } else if (!f.width.empty()) {
      auto shape = family.value("params", std::vector<double>{});
      const double w = parse_list(f.width, "--width").front();
      if (shape.empty()) shape.push_back(w);
      else shape.front() = w;
      // A sine bump needs a frequency; default to one full period across the support.
      if (family["kind"] == "sine_bump" && shape.size() < 2) shape.push_back(3.14159265358979 / w);
      family["params"] = shape;
    } else if (!family.contains("params")) {
      family["params"] = family["kind"] == "sine_bump" ? std::vector<double>{1.0, 3.14159265358979}
                                                       : std::vector<double>{1.0};
    }
    if (!f.center.empty()) family["center"] = parse_list(f.center, "--center");
    config["family"] = family;
  }

  if (!f.box.empty() || !f.shape.empty()) {
    Json grid = config.contains("grid") ? config["grid"] : Json::object();
    if (!f.box.empty()) {
      const auto bounds = parse_list(f.box, "--box");
      std::vector<double> lo, hi;
      if (bounds.size() == 2) {
        lo.assign(static_cast<std::size_t>(dim), bounds[0]);
        hi.assign(static_cast<std::size_t>(dim), bounds[1]);
      } else if (bounds.size() % 2 == 0) {
        for (std::size_t i = 0; i < bounds.size(); i += 2) {
          lo.push_back(bounds[i]);
          hi.push_back(bounds[i + 1]);
        }
      } else {
        throw CLI::ValidationError("--box", "needs lo,hi pairs");
      }
      grid["box"] = {{"lo", lo}, {"hi", hi}};
    }
    const std::size_t axes = grid.contains("box") ? grid["box"]["lo"].size() : static_cast<std::size_t>(dim);
    if (!f.shape.empty()) {
      const auto counts = parse_list(f.shape, "--shape");
      std::vector<long long> shape;
      for (double c : counts) shape.push_back(static_cast<long long>(c));
      if (shape.size() == 1) shape.assign(axes, shape.front());
      grid["shape"] = shape;
    }
    if (!grid.contains("box") || !grid.contains("shape"))
      throw CLI::ValidationError("--box/--shape", "give both --box and --shape (or a grid in --config)");
    config["grid"] = grid;
  }

  if (!f.input.empty()) config["input"] = f.input;
  if (!f.check.empty()) config["check"] = f.check;
  if (!f.s_values.empty()) config["s_values"] = parse_list(f.s_values, "--s-values");
  if (!f.dilations.empty()) config["dilations"] = parse_list(f.dilations, "--dilations");
  if (!f.t_values.empty()) config["t_values"] = parse_list(f.t_values, "--t-values");
  if (!f.region.empty()) {
    const auto bounds = parse_list(f.region, "--region");
    if (bounds.size() % 2 != 0) throw CLI::ValidationError("--region", "needs lo,hi pairs");
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < bounds.size(); i += 2) {
      lo.push_back(bounds[i]);
      hi.push_back(bounds[i + 1]);
    }
    config["region"] = {{"lo", lo}, {"hi", hi}};
  }
  if (f.refine) config["refine"] = true;
  if (f.fixed_box) config["fixed_box"] = true;
  if (f.no_search) config["search"] = false;
  if (f.seed) config["seed"] = *f.seed;
  if (f.threads) config["threads"] = f.threads;
  if (!f.format.empty()) config["format"] = f.format;
  return config;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  file << text;
  return static_cast<bool>(file);
}

int run_command(const std::string& command, const Flags& f) {
  const Json config = build_config(command, f);
  if (!config.contains("command")) {
    std::cerr << "error: no command given (use a subcommand or a config with \"command\")\n";
    return kExitConfigInvalid;
  }
  const auto started = std::chrono::steady_clock::now();
  gnl_report* report = nullptr;
  gnl_run(config.dump().c_str(), &report);
  if (report == nullptr) {
    std::cerr << "error: " << gnl_last_error() << "\n";
    return kExitConfigInvalid;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const int exit_code = gnl_report_exit_code(report);
  std::cout << gnl_report_summary(report);

  if (!f.output.empty()) {
    const bool csv = config.value("format", std::string("json")) == "csv";
    const std::string body = csv ? gnl_report_csv(report) : gnl_report_json(report);
    const Json meta{{"created", iso_timestamp()},
                    {"elapsed_seconds", elapsed},
                    {"version", gnl_version()},
                    {"command", config["command"]},
                    {"exit_code", exit_code}};
    if (!write_file(f.output, body) || !write_file(f.output + ".meta.json", meta.dump(2) + "\n")) {
      std::cerr << "error: cannot write " << f.output << "\n";
      gnl_report_free(report);
      return kExitConfigInvalid;
    }
  }
  gnl_report_free(report);
  return exit_code;
}

int run_sample(const Flags& f) {
  const Json config = build_config("", f);
  if (!config.contains("family") || !config.contains("grid")) {
    std::cerr << "error: sample needs --family, --box and --shape\n";
    return kExitConfigInvalid;
  }
  if (f.output.empty()) {
    std::cerr << "error: sample needs --output\n";
    return kExitConfigInvalid;
  }
  Json family = config["family"];
  if (!family.contains("center")) family["center"] = std::vector<double>(config["grid"]["shape"].size(), 0.0);
  gnl_grid* grid = nullptr;
  if (gnl_grid_sample(family.dump().c_str(), config["grid"].dump().c_str(), &grid) != GNL_OK) {
    std::cerr << "error: " << gnl_last_error() << "\n";
    return kExitConfigInvalid;
  }
  const bool csv = f.format == "csv";
  const int status = csv ? gnl_grid_export_csv(grid, f.output.c_str()) : gnl_grid_save(grid, f.output.c_str());
  double norm = 0;
  gnl_grid_lp_norm(grid, "2", &norm);
  std::cout << "sampled " << gnl_grid_size(grid) << " points, L2 norm " << norm << "\n";
  gnl_grid_free(grid);
  if (status != GNL_OK) {
    std::cerr << "error: " << gnl_last_error() << "\n";
    return kExitConfigInvalid;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Gagliardo-Nirenberg type inequalities"};
  app.set_version_flag("--version", std::string(gnl_version()));
  Flags f;
  app.add_option("--config", f.config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  app.add_option("--output,-o", f.output, "Report path");
  app.add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", f.threads, "Worker thread cap (0 = all cores)");
  app.add_option("--seed", f.seed, "Seed for randomized refinement restarts");
  app.add_flag("--refine", f.refine, "Rerun on a 2x grid and report relative deltas");
  app.require_subcommand(0, 1);

  auto* exponents = app.add_subcommand("exponents", "Solve and check the exponent relation");
  auto* verify = app.add_subcommand("verify", "Measure inequality ratios on test functions");
  auto* cover = app.add_subcommand("cover", "Build a balanced cover of a 1-D function");
  auto* sharpness = app.add_subcommand("sharpness", "Fit the dilation slope of the ratio");
  auto* constant = app.add_subcommand("constant", "Estimate the constant over a family sweep");
  auto* sample = app.add_subcommand("sample", "Sample a family into a grid container or CSV");
  for (auto* sub : {exponents, verify, cover, sharpness, constant, sample}) {
    add_run_options(sub, f);
    sub->add_option("--output,-o", f.output, "Report path");
    sub->add_option("--format", f.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--refine", f.refine, "Rerun on a 2x grid and report relative deltas");
    sub->add_option("--seed", f.seed, "Seed for randomized refinement restarts");
    sub->add_option("--threads", f.threads, "Worker thread cap (0 = all cores)");
  }
  verify->add_option("--check", f.check, "gn, line, gn21, mean, interval, modular or chain")
      ->check(CLI::IsMember({"gn", "line", "gn21", "mean", "interval", "modular", "chain"}));
  verify->add_option("--region", f.region, "lo,hi pairs for mean/interval/modular checks");
  verify->add_option("--t-values", f.t_values, "Amplitude factors for the modular check");
  sharpness->add_option("--s-values", f.s_values, "Dilation factors, comma separated");
  sharpness->add_flag("--fixed-box", f.fixed_box, "Evaluate dilates on the original grid");
  constant->add_option("--dilations", f.dilations, "Dilation factors, comma separated");
  constant->add_flag("--no-search", f.no_search, "Skip the coordinate search");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigInvalid;
  }

  try {
    if (sample->parsed()) return run_sample(f);
    std::string command;
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    return run_command(command, f);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }
}
