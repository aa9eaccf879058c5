#include "doctest.h"
#include "gnlab/gnlab.h"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

using Json = nlohmann::json;

namespace {

struct Report {
  gnl_report* handle = nullptr;
  int status = 0;
  explicit Report(const std::string& config) { status = gnl_run(config.c_str(), &handle); }
  ~Report() { gnl_report_free(handle); }
  Json json() const { return Json::parse(gnl_report_json(handle)); }
};

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gnlab_capi_" + name);
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(gnl_version()) == "0.1.0");
  CHECK(std::string(gnl_status_name(GNL_OK)) == "OK");
  CHECK(std::string(gnl_status_name(GNL_CONFIG_INVALID)) == "CONFIG_INVALID");
  CHECK(std::string(gnl_status_name(GNL_INTERNAL)) == "INTERNAL");
  CHECK(std::string(gnl_status_name(-3)) == "UNKNOWN");
}

TEST_CASE("gnl_run exponents") {
  const Report report(R"({"command": "exponents", "params": {"n": 2, "j": 1, "k": 2, "theta": "1/2", "q": 2, "r": 2}})");
  REQUIRE(report.status == GNL_OK);
  CHECK(gnl_report_exit_code(report.handle) == 0);
  CHECK(gnl_report_passed(report.handle) == 1);
  const Json json = report.json();
  CHECK(json["status"] == "OK");
  CHECK(json["results"]["p"] == Json{{"num", 2}, {"den", 1}});
  CHECK(std::string(gnl_report_summary(report.handle)).find("admissible") != std::string::npos);
}

TEST_CASE("gnl_run is deterministic") {
  const std::string config =
      R"({"command": "constant", "params": {"n": 1, "j": 1, "k": 2, "theta": "1/2", "q": 2, "r": 2},
          "family": {"kind": "poly_gaussian", "params": [1, 1, 0.5]}, "seed": 7, "threads": 1})";
  const Report first(config), second(config);
  REQUIRE(first.status == GNL_OK);
  CHECK(std::string(gnl_report_json(first.handle)) == gnl_report_json(second.handle));
  CHECK(std::string(gnl_report_csv(first.handle)) == gnl_report_csv(second.handle));
}

TEST_CASE("gnl_run rejects invalid configs with a report") {
  for (const char* config : {"{not json", R"({"command": "bogus"})", R"({"command": "exponents", "colour": 1})",
                             R"({"command": "verify", "input": "/nonexistent/grid.gnlb"})"}) {
    const Report report(config);
    CHECK(report.status == GNL_CONFIG_INVALID);
    REQUIRE(report.handle != nullptr);
    CHECK(gnl_report_exit_code(report.handle) == 2);
    CHECK(report.json()["status"] == "CONFIG_INVALID");
    CHECK(std::string(gnl_last_error()).size() > 0);
  }
  gnl_report* out = nullptr;
  CHECK(gnl_run(nullptr, &out) == GNL_INVALID_ARGUMENT);
  CHECK(out == nullptr);
}

TEST_CASE("gnl_run reports failed contracts") {
  // 41 nodes across the box leave the ratio visibly unconverged under refinement.
  const Report report(R"({"command": "verify", "check": "gn", "refine": true,
                          "params": {"n": 1, "j": 1, "k": 2, "theta": "1/2", "q": 2, "r": 2},
                          "grid": {"box": {"lo": [-9], "hi": [9]}, "shape": [41]}})");
  CHECK(report.status == GNL_CONTRACT_FAILED);
  CHECK(gnl_report_exit_code(report.handle) == 1);
  CHECK(gnl_report_passed(report.handle) == 0);
  CHECK(report.json()["results"]["warnings"][0] == "GRID_UNCONVERGED");
}

TEST_CASE("inadmissible params are a config error") {
  const Report report(R"({"command": "verify", "check": "gn",
                          "params": {"n": 1, "j": 1, "k": 2, "theta": "1/4", "q": 2, "r": 2}})");
  CHECK(report.status == GNL_CONFIG_INVALID);
  CHECK(report.json()["error"]["code"] == "INADMISSIBLE_PARAMS");
}

TEST_CASE("grid handles") {
  const std::vector<double> lo{0.0}, hi{2.0};
  const std::vector<std::size_t> shape{9};
  const std::vector<double> ones(9, 1.0);
  gnl_grid* grid = nullptr;
  REQUIRE(gnl_grid_create(1, lo.data(), hi.data(), shape.data(), ones.data(), &grid) == GNL_OK);
  CHECK(gnl_grid_dim(grid) == 1);
  CHECK(gnl_grid_size(grid) == 9);
  double norm = 0;
  REQUIRE(gnl_grid_lp_norm(grid, "1", &norm) == GNL_OK);
  CHECK(norm == doctest::Approx(2.0));
  REQUIRE(gnl_grid_lp_norm(grid, "2", &norm) == GNL_OK);
  CHECK(norm == doctest::Approx(std::sqrt(2.0)));
  REQUIRE(gnl_grid_lp_norm(grid, "inf", &norm) == GNL_OK);
  CHECK(norm == 1.0);
  CHECK(gnl_grid_lp_norm(grid, "x/y", &norm) != GNL_OK);
  CHECK(gnl_grid_lp_norm(grid, nullptr, &norm) == GNL_INVALID_ARGUMENT);
  gnl_grid_free(grid);

  REQUIRE(gnl_grid_sample(R"({"kind": "gaussian", "params": [1], "center": [0, 0]})",
                          R"({"box": {"lo": [-6, -6], "hi": [6, 6]}, "shape": [65, 65]})", &grid) == GNL_OK);
  REQUIRE(gnl_grid_lp_norm(grid, "2", &norm) == GNL_OK);
  // ||exp(-|x|^2)||_2 = sqrt(pi/2) in the plane.
  CHECK(norm == doctest::Approx(std::sqrt(M_PI / 2)).epsilon(1e-6));

  const auto path = temp_path("grid.gnlb");
  REQUIRE(gnl_grid_save(grid, path.c_str()) == GNL_OK);
  gnl_grid* loaded = nullptr;
  REQUIRE(gnl_grid_load(path.c_str(), &loaded) == GNL_OK);
  REQUIRE(gnl_grid_size(loaded) == gnl_grid_size(grid));
  for (std::size_t i = 0; i < gnl_grid_size(grid); ++i)
    CHECK(gnl_grid_samples(loaded)[i] == gnl_grid_samples(grid)[i]);
  const auto csv = temp_path("grid.csv");
  CHECK(gnl_grid_export_csv(grid, csv.c_str()) == GNL_OK);
  CHECK(std::filesystem::file_size(csv) > 0);
  gnl_grid_free(loaded);
  gnl_grid_free(grid);
  std::filesystem::remove(path);
  std::filesystem::remove(csv);

  CHECK(gnl_grid_load("/nonexistent/grid.gnlb", &loaded) == GNL_IO_ERROR);
  CHECK(gnl_grid_sample(R"({"kind": "bump", "params": [3], "center": [0]})",
                        R"({"box": {"lo": [-1], "hi": [1]}, "shape": [33]})", &grid) == GNL_SUPPORT_EXCEEDS_BOX);
  CHECK(std::string(gnl_last_error()).find("SUPPORT_EXCEEDS_BOX") != std::string::npos);
}

TEST_CASE("gnl_cover_build") {
  gnl_grid* grid = nullptr;
  REQUIRE(gnl_grid_sample(R"({"kind": "bump", "params": [1], "center": [0]})",
                          R"({"box": {"lo": [-1.5], "hi": [1.5]}, "shape": [1201]})", &grid) == GNL_OK);
  gnl_report* report = nullptr;
  REQUIRE(gnl_cover_build(grid, "2", "2", "2", &report) == GNL_OK);
  CHECK(gnl_report_passed(report) == 1);
  const Json json = Json::parse(gnl_report_json(report));
  CHECK(json["max_multiplicity"].get<int>() <= 4);
  CHECK(json["intervals"].size() > 0);
  CHECK(std::string(gnl_report_csv(report)).rfind("center,radius", 0) == 0);
  gnl_report_free(report);
  CHECK(gnl_cover_build(grid, "2", "oops", "2", &report) != GNL_OK);
  gnl_grid_free(grid);
}

TEST_CASE("thread cap does not change results") {
  const std::string config =
      R"({"command": "sharpness", "params": {"n": 2, "j": 1, "k": 2, "theta": "1/2", "q": 2, "r": 2, "p": "11/5"}})";
  gnl_set_threads(1);
  const Report serial(config);
  gnl_set_threads(0);
  const Report parallel(config);
  CHECK(std::string(gnl_report_json(serial.handle)) == gnl_report_json(parallel.handle));
}
