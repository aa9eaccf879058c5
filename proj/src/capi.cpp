#include "gnlab/gnlab.h"

#include "gnlab/covering.hpp"
#include "gnlab/error.hpp"
#include "gnlab/json_io.hpp"
#include "gnlab/parallel.hpp"
#include "gnlab/runner.hpp"

#include <fstream>
#include <new>
#include <string>

struct gnl_grid {
  gnlab::GridFunction function;
};

struct gnl_report {
  int exit_code = 0;
  bool passed = false;
  std::string json;
  std::string csv;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

int record(int status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const gnlab::Error& e) {
    return record(static_cast<int>(e.code()), e.what());
  } catch (const gnlab::Json::exception& e) {
    return record(GNL_PARSE_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return record(GNL_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(GNL_INTERNAL, e.what());
  }
}

int require(const void* pointer, const char* what) {
  if (pointer == nullptr) gnlab::fail(gnlab::ErrorCode::kInvalidArgument, std::string(what) + " is null");
  return GNL_OK;
}

}  // namespace

extern "C" {

const char* gnl_version(void) { return "0.1.0"; }

const char* gnl_status_name(int status) {
  if (status == GNL_INTERNAL) return "INTERNAL";
  if (status < 0 || status > GNL_PARSE_ERROR) return "UNKNOWN";
  return gnlab::error_name(static_cast<gnlab::ErrorCode>(status)).data();
}

const char* gnl_last_error(void) { return g_last_error.c_str(); }

void gnl_set_threads(unsigned count) { gnlab::set_max_threads(count); }

int gnl_run(const char* config_json, gnl_report** out) {
  return guarded([&] {
    require(config_json, "config");
    require(out, "out");
    *out = nullptr;
    const auto result = gnlab::run_json(config_json);
    auto* report = new gnl_report;
    report->exit_code = result.exit_code;
    report->passed = result.exit_code == gnlab::kExitOk;
    report->json = result.report.dump(2) + "\n";
    report->csv = result.csv;
    report->summary = result.summary;
    *out = report;
    if (result.exit_code == gnlab::kExitOk) return GNL_OK;
    g_last_error = result.summary;
    return result.exit_code == gnlab::kExitConfigInvalid ? GNL_CONFIG_INVALID : GNL_CONTRACT_FAILED;
  });
}

int gnl_report_exit_code(const gnl_report* report) { return report ? report->exit_code : -1; }
int gnl_report_passed(const gnl_report* report) { return report && report->passed ? 1 : 0; }
const char* gnl_report_json(const gnl_report* report) { return report ? report->json.c_str() : ""; }
const char* gnl_report_csv(const gnl_report* report) { return report ? report->csv.c_str() : ""; }
const char* gnl_report_summary(const gnl_report* report) { return report ? report->summary.c_str() : ""; }
void gnl_report_free(gnl_report* report) { delete report; }

int gnl_grid_sample(const char* family_json, const char* grid_json, gnl_grid** out) {
  return guarded([&] {
    require(family_json, "family");
    require(grid_json, "grid");
    require(out, "out");
    const auto family = gnlab::family_from_json(gnlab::Json::parse(family_json));
    const auto grid = gnlab::grid_from_json(gnlab::Json::parse(grid_json));
    *out = new gnl_grid{gnlab::sample_family(family, grid)};
    return GNL_OK;
  });
}

int gnl_grid_create(size_t dim, const double* lo, const double* hi, const size_t* shape,
                    const double* samples, gnl_grid** out) {
  return guarded([&] {
    require(lo, "lo");
    require(hi, "hi");
    require(shape, "shape");
    require(samples, "samples");
    require(out, "out");
    if (dim == 0) gnlab::fail(gnlab::ErrorCode::kInvalidArgument, "dim must be positive");
    gnlab::Box box{{lo, lo + dim}, {hi, hi + dim}};
    std::vector<std::size_t> counts(shape, shape + dim);
    std::size_t total = 1;
    for (auto m : counts) total *= m;
    *out = new gnl_grid{gnlab::GridFunction(box, counts, std::vector<double>(samples, samples + total))};
    return GNL_OK;
  });
}

int gnl_grid_load(const char* path, gnl_grid** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new gnl_grid{gnlab::load_grid(path)};
    return GNL_OK;
  });
}

int gnl_grid_save(const gnl_grid* grid, const char* path) {
  return guarded([&] {
    require(grid, "grid");
    require(path, "path");
    gnlab::save_grid(path, grid->function);
    return GNL_OK;
  });
}

int gnl_grid_export_csv(const gnl_grid* grid, const char* path) {
  return guarded([&] {
    require(grid, "grid");
    require(path, "path");
    const std::string text = gnlab::grid_csv(grid->function);
    std::ofstream file(path);
    if (!(file << text)) gnlab::fail(gnlab::ErrorCode::kIoError, std::string("cannot write ") + path);
    return GNL_OK;
  });
}

size_t gnl_grid_dim(const gnl_grid* grid) { return grid ? grid->function.dim() : 0; }
size_t gnl_grid_size(const gnl_grid* grid) { return grid ? grid->function.size() : 0; }
const double* gnl_grid_samples(const gnl_grid* grid) {
  return grid ? grid->function.samples().data() : nullptr;
}

int gnl_grid_lp_norm(const gnl_grid* grid, const char* exponent, double* out) {
  return guarded([&] {
    require(grid, "grid");
    require(exponent, "exponent");
    require(out, "out");
    *out = gnlab::lp_norm(grid->function, gnlab::parse_ext(exponent));
    return GNL_OK;
  });
}

void gnl_grid_free(gnl_grid* grid) { delete grid; }

int gnl_cover_build(const gnl_grid* grid, const char* p, const char* q, const char* r,
                    gnl_report** out) {
  return guarded([&] {
    require(grid, "grid");
    require(p, "p");
    require(q, "q");
    require(r, "r");
    require(out, "out");
    *out = nullptr;
    const auto& u = grid->function;
    const auto cover = gnlab::build_cover(u, gnlab::parse_ext(p), gnlab::parse_ext(q), gnlab::parse_ext(r));
    auto* report = new gnl_report;
    report->passed = cover.max_multiplicity <= 4 && cover.max_residual <= 1e-6 && cover.covers_support;
    report->exit_code = report->passed ? gnlab::kExitOk : gnlab::kExitContractFailed;
    report->json = gnlab::to_json(cover).dump(2) + "\n";
    report->csv = "center,radius,omega,alpha,residual\n";
    for (const auto& interval : cover.intervals) {
      const gnlab::Json row{interval.center, interval.radius, interval.omega, interval.alpha, interval.residual};
      std::string line = row.dump();
      report->csv += line.substr(1, line.size() - 2) + "\n";
    }
    report->summary = gnlab::render_cover_strip(cover, u.box().lo[0], u.box().hi[0]);
    *out = report;
    return GNL_OK;
  });
}

}  // extern "C"
