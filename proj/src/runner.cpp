#include "gnlab/runner.hpp"

#include "gnlab/error.hpp"
#include "gnlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>

namespace gnlab {

namespace {

const std::vector<std::pair<Command, std::string_view>> kCommands{
    {Command::kExponents, "exponents"}, {Command::kVerify, "verify"},
    {Command::kCover, "cover"},         {Command::kSharpness, "sharpness"},
    {Command::kConstant, "constant"}};

const std::vector<std::pair<VerifyCheck, std::string_view>> kChecks{
    {VerifyCheck::kGn, "gn"},         {VerifyCheck::kLine, "line"},
    {VerifyCheck::kGn21, "gn21"},     {VerifyCheck::kMean, "mean"},
    {VerifyCheck::kInterval, "interval"}, {VerifyCheck::kModular, "modular"},
    {VerifyCheck::kChain, "chain"}};

template <typename E>
E lookup(const std::vector<std::pair<E, std::string_view>>& table, const std::string& name,
         const char* what) {
  for (const auto& [value, text] : table)
    if (text == name) return value;
  fail(ErrorCode::kConfigInvalid, std::string("unknown ") + what + " '" + name + "'");
}

bool config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidIndex:
    case ErrorCode::kNegativeReciprocal:
    case ErrorCode::kInadmissibleParams:
    case ErrorCode::kSupportExceedsBox:
    case ErrorCode::kGridTooCoarse:
    case ErrorCode::kEmptyRegion:
    case ErrorCode::kAxisOutOfRange:
    case ErrorCode::kNonpositiveScale:
    case ErrorCode::kEpsTooSmall:
    case ErrorCode::kExponentMismatch:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kIoError:
    case ErrorCode::kParseError:
      return true;
    default:
      return false;
  }
}

std::vector<double> number_list(const Json& value, const char* key) {
  if (!value.is_array()) fail(ErrorCode::kConfigInvalid, std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) fail(ErrorCode::kConfigInvalid, std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(10);
  out << value;
  return out.str();
}

// ---------------------------------------------------------------------------
// Inputs.

double family_extent(const FamilySpec& spec) {
  const auto& w = spec.shape_params;
  if (w.empty()) return 1;
  switch (spec.kind) {
    case FamilyKind::kGaussian: {
      const std::size_t widths = w.size() == 3 ? 2 : w.size();
      return 9 * *std::max_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(widths));
    }
    case FamilyKind::kPolyGaussian:
      return 12 * w.front();
    case FamilyKind::kBump:
    case FamilyKind::kSineBump:
      return 1.5 * w.front();
  }
  return 1;
}

std::size_t default_points(std::size_t dim, Command command) {
  switch (dim) {
    case 1: return command == Command::kCover ? 1201 : 1025;
    case 2: return 161;
    case 3: return 41;
    default: return 17;
  }
}

GridSpec default_grid(const std::vector<FamilySpec>& families, std::size_t dim, Command command) {
  double half = 0;
  for (const auto& f : families) {
    double offset = 0;
    for (double c : f.center) offset = std::max(offset, std::abs(c));
    half = std::max(half, offset + family_extent(f));
  }
  return {Box::cube(dim, -half, half), std::vector<std::size_t>(dim, default_points(dim, command))};
}

FamilySpec default_family(Command command, std::size_t dim) {
  if (command == Command::kCover) return {FamilyKind::kBump, {1.0}, std::vector<double>(dim, 0.0)};
  return {FamilyKind::kGaussian, {1.0}, std::vector<double>(dim, 0.0)};
}

struct Inputs {
  std::vector<GridFunction> functions;
  std::vector<std::string> labels;
  std::optional<GridSpec> grid;  // set when the functions were sampled
};

std::string label_of(const FamilySpec& spec) {
  std::ostringstream out;
  out << family_name(spec.kind) << "[";
  for (std::size_t i = 0; i < spec.shape_params.size(); ++i) out << (i ? "," : "") << spec.shape_params[i];
  out << "]@(";
  for (std::size_t i = 0; i < spec.center.size(); ++i) out << (i ? "," : "") << spec.center[i];
  out << ")";
  return out.str();
}

std::vector<FamilySpec> resolved_families(const RunConfig& config) {
  std::vector<FamilySpec> families = config.families;
  const std::size_t dim = config.grid ? config.grid->box.dim() : static_cast<std::size_t>(config.params.n);
  if (families.empty()) families.push_back(default_family(config.command, dim));
  for (auto& f : families)
    if (f.center.empty()) f.center.assign(dim, 0.0);
  return families;
}

GridSpec resolved_grid(const RunConfig& config, const std::vector<FamilySpec>& families) {
  if (config.grid) return *config.grid;
  return default_grid(families, families.front().center.size(), config.command);
}

Inputs sample_inputs(const RunConfig& config, const std::optional<GridSpec>& override_grid = {}) {
  Inputs inputs;
  if (config.input) {
    inputs.functions.push_back(load_grid(*config.input));
    inputs.labels.push_back(std::filesystem::path(*config.input).filename().string());
    return inputs;
  }
  const auto families = resolved_families(config);
  const GridSpec grid = override_grid ? *override_grid : resolved_grid(config, families);
  inputs.grid = grid;
  for (const auto& f : families) {
    inputs.functions.push_back(sample_family(f, grid));
    inputs.labels.push_back(label_of(f));
  }
  return inputs;
}

void validate_grid(const GridSpec& grid) {
  std::size_t total = 1;
  for (auto m : grid.shape) {
    if (m < 8) fail(ErrorCode::kConfigInvalid, "grid needs at least 8 points per axis");
    if (total > kMaxGridSamples / m) fail(ErrorCode::kConfigInvalid, "grid exceeds 2^28 samples");
    total *= m;
  }
  for (std::size_t a = 0; a < grid.box.dim(); ++a)
    if (!(grid.box.hi[a] > grid.box.lo[a])) fail(ErrorCode::kConfigInvalid, "grid box is empty");
}

// ---------------------------------------------------------------------------
// Exponent helpers.

/// p from 2/p = 1/q + 1/r when unset.
ExtReal balanced_p(const RunConfig& config) {
  if (config.params.p) return *config.params.p;
  return ExtReal::from_reciprocal((config.params.q.reciprocal() + config.params.r.reciprocal()) / 2);
}

GNParams admissible_params(const RunConfig& config) {
  if (!config.has_theta) fail(ErrorCode::kConfigInvalid, "theta is required for this command");
  const auto verdict = check_admissible(config.params);
  if (!verdict.admissible)
    fail(ErrorCode::kInadmissibleParams,
         std::string(reason_name(verdict.reason)) + ": " + verdict.detail);
  return config.params.p ? config.params : config.params.with_solved_p();
}

struct Outcome {
  Json results = Json::object();
  std::map<std::string, bool> contracts;
  std::string csv;
  std::string summary;
};

void merge_flags(Outcome& outcome, const VerificationReport& report, const std::string& prefix = "") {
  for (const auto& [name, ok] : report.flags) outcome.contracts[prefix + name] = ok;
}

// Relative change of every row ratio between two reports with matching rows.
void add_row_deltas(VerificationReport& coarse, const VerificationReport& fine) {
  for (std::size_t i = 0; i < coarse.rows.size() && i < fine.rows.size(); ++i) {
    const double a = coarse.rows[i].ratio, b = fine.rows[i].ratio;
    coarse.refinement_deltas[coarse.rows[i].label + " s=" + fmt(coarse.rows[i].s)] =
        std::abs(b - a) / std::abs(a);
  }
  coarse.check_refinement();
}

// ---------------------------------------------------------------------------
// Commands.

Outcome run_exponents(const RunConfig& config) {
  Outcome out;
  GNParams params = config.params;
  Json& r = out.results;
  r["params"] = to_json(params);
  if (!config.has_theta && !params.p)
    fail(ErrorCode::kConfigInvalid, "exponents needs theta or p");

  std::ostringstream summary;
  if (!config.has_theta) {
    params.theta = solve_theta(params.n, params.j, params.k, *params.p, params.q, params.r);
    r["theta"] = to_json(params.theta);
    summary << "theta = " << to_string(params.theta) << "\n";
  }
  std::optional<ExtReal> solved;
  try {
    solved = solve_p(params.n, params.j, params.k, params.theta, params.q, params.r);
    r["p"] = to_json(*solved);
    r["p_decimal"] = number_json(solved->to_double());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNegativeReciprocal) throw;
    r["p"] = nullptr;
    r["p_error"] = e.what();
    r["reciprocal_p"] = to_json(gn_reciprocal_p(params.n, params.j, params.k, params.theta, params.q, params.r));
  }
  if (!params.p && solved) params.p = solved;
  if (config.params.p) r["p_supplied"] = to_json(*config.params.p);
  if (solved) summary << "p = " << to_string(*solved) << "\n";

  if (params.p) {
    const Rational deficit = scaling_deficit(params);
    r["deficit"] = to_json(deficit);
    r["deficit_decimal"] = to_double(deficit);
    summary << "deficit = " << to_string(deficit) << "\n";
    out.contracts["deficit_zero_iff_consistent"] =
        (deficit == 0) == (solved.has_value() && *solved == *params.p);
  }
  const auto verdict = check_admissible(params);
  r["admissibility"] = to_json(verdict);
  summary << (verdict.admissible ? "admissible" : "inadmissible (" + std::string(reason_name(verdict.reason)) + ")")
          << "\n";

  if (params.r.is_finite() && params.j < params.k) {
    try {
      const ExtReal special = solve_special_p(params.j, params.k, params.q, params.r);
      r["special_p"] = to_json(special);
      out.contracts["special_p_matches"] =
          special == solve_p(params.n, params.j, params.k, Rational(params.j, params.k), params.q, params.r);
    } catch (const Error& e) {
      r["special_p_error"] = e.what();
    }
  }
  if (solved) {
    try {
      out.contracts["theta_roundtrip"] =
          solve_theta(params.n, params.j, params.k, *solved, params.q, params.r) == params.theta;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
      r["theta_roundtrip"] = "DEGENERATE";
    }
  }
  if (params.p && params.p->is_finite() && params.q.is_finite() && params.r.is_finite() &&
      *params.p >= ExtReal(1) && params.q >= ExtReal(1) && params.r >= ExtReal(1)) {
    const auto balance = gagliardo_balance(*params.p, params.q, params.r);
    r["gagliardo_balance"] = {{"lambda", to_json(balance.lambda)},
                              {"mu", to_json(balance.mu)},
                              {"second_derivative_exps",
                               {to_json(balance.second_derivative_exp_first),
                                to_json(balance.second_derivative_exp_second)}},
                              {"function_exps",
                               {to_json(balance.function_exp_first), to_json(balance.function_exp_second)}},
                              {"balanced", balance.balanced()}};
  }
  if (params.p) {
    try {
      r["interpolation_alpha"] = to_json(interpolation_alpha(*params.p, params.r, params.q));
    } catch (const Error& e) {
      r["interpolation_alpha"] = std::string(error_name(e.code()));
    }
  }
  if (params.k >= 2 && params.j == 1 && params.q.is_finite() && params.r.is_finite()) {
    try {
      const auto step = induction_step1_exponents(params.k, params.q, params.r);
      r["induction_step1"] = {{"p", to_json(step.p)}, {"p_tilde", to_json(step.p_tilde)}};
    } catch (const Error& e) {
      r["induction_step1"] = std::string(error_name(e.code()));
    }
  }
  if (params.j >= 1 && params.j < params.k) {
    try {
      const auto step = induction_step2_exponents(params.k, params.j, params.q, params.r);
      r["induction_step2"] = {{"p", to_json(step.p)}, {"q_tilde", to_json(step.q_tilde)}};
    } catch (const Error& e) {
      r["induction_step2"] = std::string(error_name(e.code()));
    }
  }

  std::ostringstream csv;
  csv << "key,value\n";
  for (const auto& key : {"theta", "p", "p_supplied", "deficit", "special_p", "interpolation_alpha"})
    if (r.contains(key)) {
      const auto& v = r[key];
      csv << key << ',' << (v.is_string() ? v.get<std::string>() : v.is_object() ? to_string(rational_from_json(v)) : v.dump())
          << '\n';
    }
  csv << "admissible," << (verdict.admissible ? "true" : "false") << '\n';
  csv << "reason," << reason_name(verdict.reason) << '\n';
  out.csv = csv.str();
  out.summary = summary.str();
  return out;
}

using Evaluator = std::function<VerificationReport(const Inputs&)>;

// Runs `evaluate` on the configured grid and, with --refine, on the 2x grid.
VerificationReport evaluate_with_refinement(const RunConfig& config, const Evaluator& evaluate) {
  const Inputs inputs = sample_inputs(config);
  if (inputs.grid) validate_grid(*inputs.grid);
  VerificationReport report = evaluate(inputs);
  for (std::size_t i = 0; i < inputs.functions.size(); ++i)
    if (inputs.functions[i].edge_warning())
      report.warnings.push_back(inputs.labels[i] + ": not decayed at the box edge");
  if (config.refine) {
    if (!inputs.grid) {
      report.warnings.push_back("refinement skipped: input grid has no family to re-sample");
    } else {
      const GridSpec fine = inputs.grid->refined();
      validate_grid(fine);
      add_row_deltas(report, evaluate(sample_inputs(config, fine)));
    }
  }
  return report;
}

Outcome run_verify(const RunConfig& config) {
  Outcome out;
  const ExtReal& q = config.params.q;
  const ExtReal& r = config.params.r;
  Json extra = Json::object();
  Evaluator evaluate;

  switch (config.check) {
    case VerifyCheck::kGn: {
      const GNParams params = admissible_params(config);
      extra["params"] = to_json(params);
      evaluate = [params](const Inputs& in) {
        VerificationReport report;
        report.case_id = "gn_ratio";
        std::vector<double> ratios(in.functions.size());
        parallel_for(in.functions.size(), [&](std::size_t i) { ratios[i] = gn_ratio(in.functions[i], params).ratio; });
        bool finite = true;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
          report.add_ratio(in.labels[i], ratios[i]);
          finite = finite && std::isfinite(ratios[i]) && ratios[i] > 0;
        }
        report.flags["ratios_finite"] = finite;
        return report;
      };
      break;
    }
    case VerifyCheck::kLine:
    case VerifyCheck::kGn21: {
      const ExtReal p = balanced_p(config);
      extra["p"] = to_json(p);
      const bool line = config.check == VerifyCheck::kLine;
      evaluate = [p, q, r, line](const Inputs& in) {
        VerificationReport report;
        report.case_id = line ? "line_ratio" : "gn21_ratio";
        bool finite = true, fubini = true, pointwise = true, holder = true;
        for (std::size_t i = 0; i < in.functions.size(); ++i) {
          const auto& u = in.functions[i];
          double ratio;
          if (line) {
            ratio = line_ratio(u, p, q, r);
          } else {
            const auto result = gn21_ratio(u, p, q, r);
            ratio = result.ratio;
            const auto& s = result.split;
            if (s.available) {
              fubini = fubini && std::abs(s.fubini_prime / s.full_q - 1) <= 1e-10 &&
                       std::abs(s.fubini_last / s.full_q - 1) <= 1e-10;
              pointwise = pointwise && s.pointwise_excess <= 1e-10;
              holder = holder && s.slice_prime <= s.holder_prime * (1 + 1e-12) &&
                       s.slice_last <= s.holder_last * (1 + 1e-12);
              if (i == 0) {
                report.values["split.grad_prime_p"] = s.grad_prime_p;
                report.values["split.grad_last_p"] = s.grad_last_p;
                report.values["split.slice_prime"] = s.slice_prime;
                report.values["split.slice_last"] = s.slice_last;
                report.values["split.holder_prime"] = s.holder_prime;
                report.values["split.holder_last"] = s.holder_last;
                report.values["split.full_q"] = s.full_q;
                report.values["split.pointwise_excess"] = s.pointwise_excess;
              }
            }
          }
          report.add_ratio(in.labels[i], ratio);
          finite = finite && std::isfinite(ratio) && ratio > 0;
        }
        report.flags["ratios_finite"] = finite;
        if (!line) {
          report.flags["fubini_consistent"] = fubini;
          report.flags["pointwise_bound"] = pointwise;
          report.flags["slice_holder"] = holder;
        }
        return report;
      };
      break;
    }
    case VerifyCheck::kMean: {
      const ExtReal p = config.params.p.value_or(ExtReal(2));
      const auto region = config.region;
      evaluate = [p, region](const Inputs& in) {
        VerificationReport report;
        report.case_id = "mean_approx_ratio";
        bool bound = true;
        for (std::size_t i = 0; i < in.functions.size(); ++i) {
          const auto result = mean_approx_ratio(in.functions[i], region, p);
          report.add_ratio(in.labels[i], result.ratio);
          if (result.degenerate) report.warnings.push_back(in.labels[i] + ": constant on the region");
          bound = bound && result.ratio <= 2 + 1e-6;
        }
        report.flags["mean_bound"] = bound;
        return report;
      };
      break;
    }
    case VerifyCheck::kInterval: {
      if (!config.region || config.region->dim() != 1)
        fail(ErrorCode::kConfigInvalid, "interval check needs a one-dimensional region");
      const ExtReal p = balanced_p(config);
      const double a = config.region->lo[0], b = config.region->hi[0];
      evaluate = [p, q, r, a, b](const Inputs& in) {
        VerificationReport report;
        report.case_id = "interval_inequality_ratio";
        bool finite = true;
        for (std::size_t i = 0; i < in.functions.size(); ++i) {
          const double ratio = interval_inequality_ratio(in.functions[i], a, b, p, q, r);
          report.add_ratio(in.labels[i], ratio);
          finite = finite && std::isfinite(ratio);
        }
        report.flags["ratios_finite"] = finite;
        return report;
      };
      break;
    }
    case VerifyCheck::kModular: {
      if (!config.region || config.region->dim() != 1)
        fail(ErrorCode::kConfigInvalid, "modular check needs a one-dimensional region");
      const ExtReal p = config.params.p.value_or(ExtReal::from_reciprocal(
          config.params.r.reciprocal() / 2 + config.params.q.reciprocal() / 2));
      const double a = config.region->lo[0], length = config.region->hi[0] - a;
      const std::vector<double> ts = config.t_values.empty() ? std::vector<double>{1, 10, 100} : config.t_values;
      evaluate = [p, q, r, a, length, ts](const Inputs& in) {
        VerificationReport report;
        report.case_id = "gagliardo_modular";
        bool droppable = true;
        for (std::size_t i = 0; i < in.functions.size(); ++i) {
          const auto check = gagliardo_modular_check(in.functions[i], a, length, p, q, r, ts);
          report.add_ratio(in.labels[i], check.merged_c);
          droppable = droppable && check.third_term_droppable;
          if (i == 0) {
            report.values["three_term_c"] = check.three_term_c;
            report.values["two_term_c"] = check.two_term_c;
            report.values["merged_c"] = check.merged_c;
            report.values["merged_spread"] = check.merged_spread;
            report.values["two_term_min_c"] = check.two_term_min_c;
            report.values["two_term_min_spread"] = check.two_term_min_spread;
            report.exact["merged_second_exp"] = to_string(check.merged_second_exp);
            report.exact["merged_function_exp"] = to_string(check.merged_function_exp);
            for (std::size_t t = 0; t < ts.size(); ++t) {
              report.values["three_term_c@t=" + fmt(ts[t])] = check.three_term_c_by_t[t];
              report.values["two_term_c@t=" + fmt(ts[t])] = check.two_term_c_by_t[t];
              report.values["two_term_min_c@t=" + fmt(ts[t])] = check.two_term_min_c_by_t[t];
            }
          }
        }
        report.flags["third_term_droppable"] = droppable;
        return report;
      };
      break;
    }
    case VerifyCheck::kChain: {
      const int k = config.params.k;
      if (k < 2) fail(ErrorCode::kConfigInvalid, "chain check needs k >= 2");
      if (config.input) fail(ErrorCode::kConfigInvalid, "chain check samples families; input not supported");
      evaluate = [&config, k, q, r](const Inputs& in) {
        VerificationReport report;
        report.case_id = "induction_chain";
        const auto check = induction_chain_check(resolved_families(config), *in.grid, k, q, r);
        for (std::size_t i = 0; i < check.direct_ratios.size(); ++i) report.add_ratio(in.labels[i], check.direct_ratios[i]);
        report.values["outer_constant"] = check.outer_constant;
        report.values["inner_constant"] = check.inner_constant;
        report.values["implied_constant"] = check.implied_constant;
        report.exact["chained"] = check.chained.to_string();
        double worst = 0;
        for (double res : check.identity_residuals) worst = std::max(worst, res);
        report.values["max_identity_residual"] = worst;
        report.flags["dominated"] = check.dominated;
        report.flags["identity_holds"] = worst <= 1e-8;
        return report;
      };
      break;
    }
  }

  VerificationReport report = evaluate_with_refinement(config, evaluate);
  merge_flags(out, report);
  out.results = to_json(report);
  for (auto& [key, value] : extra.items()) out.results[key] = value;
  out.csv = ratio_table_csv(report);
  std::ostringstream summary;
  summary << report.case_id << ": " << report.rows.size() << " functions, ratio min " << fmt(report.ratio_min())
          << " max " << fmt(report.ratio_max()) << "\n";
  for (const auto& w : report.warnings) summary << "warning: " << w << "\n";
  out.summary = summary.str();
  return out;
}

Outcome run_cover(const RunConfig& config) {
  Outcome out;
  const ExtReal q = config.params.q, r = config.params.r;
  const ExtReal p = balanced_p(config);
  const Inputs inputs = sample_inputs(config);
  if (inputs.grid) validate_grid(*inputs.grid);
  Json covers = Json::array();
  std::ostringstream csv, summary;
  csv << "function,center,radius,omega,alpha,residual\n";
  csv.precision(17);
  bool multiplicity = true, residuals = true, coverage = true, bounded = true, chain = true;
  const bool eq10 = 2 * p.reciprocal() == q.reciprocal() + r.reciprocal() && q.is_finite() && r.is_finite();
  for (std::size_t i = 0; i < inputs.functions.size(); ++i) {
    const auto& u = inputs.functions[i];
    if (u.dim() != 1) fail(ErrorCode::kConfigInvalid, "cover needs a one-dimensional function");
    const auto cover = build_cover(u, p, q, r);
    Json entry = to_json(cover);
    entry["function"] = inputs.labels[i];
    multiplicity = multiplicity && cover.max_multiplicity <= 4;
    residuals = residuals && cover.max_residual <= 1e-6;
    coverage = coverage && cover.covers_support;
    bounded = bounded && cover.max_balancing_length <= cover.radius_bound;
    if (eq10) {
      const auto bound = cover_sum_bound(u, cover, p, q, r);
      entry["cover_sum"] = to_json(bound);
      chain = chain && bound.chain_holds;
    }
    covers.push_back(entry);
    for (const auto& interval : cover.intervals)
      csv << csv_field(inputs.labels[i]) << ',' << interval.center << ',' << interval.radius << ',' << interval.omega << ','
          << interval.alpha << ',' << interval.residual << '\n';
    const auto& box = u.box();
    summary << inputs.labels[i] << ": " << cover.intervals.size() << " intervals, max multiplicity "
            << cover.max_multiplicity << ", max residual " << fmt(cover.max_residual) << "\n"
            << render_cover_strip(cover, box.lo[0], box.hi[0]);
  }
  out.results = {{"p", to_json(p)}, {"q", to_json(q)}, {"r", to_json(r)}, {"covers", covers}};
  out.contracts["multiplicity_at_most_4"] = multiplicity;
  out.contracts["balance_residual"] = residuals;
  out.contracts["covers_support"] = coverage;
  out.contracts["radius_bound"] = bounded;
  if (eq10) out.contracts["cover_sum_chain"] = chain;
  out.csv = csv.str();
  out.summary = summary.str();
  return out;
}

Outcome run_sharpness(const RunConfig& config) {
  Outcome out;
  if (!config.has_theta) fail(ErrorCode::kConfigInvalid, "sharpness needs theta");
  GNParams params = config.params;
  if (!params.p) params = params.with_solved_p();
  if (config.input) fail(ErrorCode::kConfigInvalid, "sharpness needs an analytic family, not an input grid");
  const auto families = resolved_families(config);
  GridSpec grid = resolved_grid(config, families);
  validate_grid(grid);
  const std::vector<double> s_values = config.s_values.empty() ? log_spaced(0.5, 2.0, 7) : config.s_values;
  SharpnessOptions options;
  options.fixed_box = config.fixed_box;

  Json scans = Json::array();
  std::ostringstream csv, summary;
  bool ok = true, converged = true;
  csv << "label,s,ratio\n";
  csv.precision(17);
  for (const auto& family : families) {
    VerificationReport report = sharpness_scan(family, grid, params, s_values, options);
    if (config.refine) {
      const GridSpec fine = grid.refined();
      validate_grid(fine);
      add_row_deltas(report, sharpness_scan(family, fine, params, s_values, options));
      converged = converged && report.flags["grid_converged"];
    }
    ok = ok && report.flags["slope_matches_deficit"];
    Json entry = to_json(report);
    entry["function"] = label_of(family);
    scans.push_back(entry);
    for (const auto& row : report.rows) csv << csv_field(label_of(family)) << ',' << row.s << ',' << row.ratio << '\n';
    summary << label_of(family) << ": slope " << fmt(report.slope->slope) << ", deficit "
            << to_string(report.slope->deficit) << " (" << fmt(to_double(report.slope->deficit)) << ")\n";
  }
  out.results = {{"params", to_json(params)}, {"scans", scans}};
  out.contracts["slope_matches_deficit"] = ok;
  if (config.refine) out.contracts["grid_converged"] = converged;
  out.csv = csv.str();
  out.summary = summary.str();
  return out;
}

Outcome run_constant(const RunConfig& config) {
  Outcome out;
  const GNParams params = admissible_params(config);
  if (config.input) fail(ErrorCode::kConfigInvalid, "constant sweeps need families, not an input grid");
  ConstantSweep sweep;
  sweep.members = resolved_families(config);
  sweep.grid = resolved_grid(config, sweep.members);
  validate_grid(sweep.grid);
  sweep.dilations = config.dilations.empty() ? log_spaced(0.5, 2.0, 5) : config.dilations;
  sweep.refine = config.search;
  sweep.seed = config.seed;
  VerificationReport report = estimate_constant(sweep, params);
  if (config.refine) {
    ConstantSweep fine = sweep;
    fine.grid = sweep.grid.refined();
    validate_grid(fine.grid);
    add_row_deltas(report, estimate_constant(fine, params));
  }
  merge_flags(out, report);
  out.results = to_json(report);
  out.results["params"] = to_json(params);
  out.csv = ratio_table_csv(report);
  out.summary = "estimated constant " + fmt(*report.estimated_constant) + " at " + report.argmax +
                " (supremum over " + report.family_description + "; a lower bound, not the best constant)\n";
  return out;
}

}  // namespace

std::string_view command_name(Command command) noexcept {
  for (const auto& [value, text] : kCommands)
    if (value == command) return text;
  return "unknown";
}

std::string_view check_name(VerifyCheck check) noexcept {
  for (const auto& [value, text] : kChecks)
    if (value == check) return text;
  return "unknown";
}

RunConfig config_from_json(const Json& value) {
  if (!value.is_object()) fail(ErrorCode::kConfigInvalid, "config must be a JSON object");
  static const std::vector<std::string> kKnown{
      "command", "check", "params", "families", "family", "grid", "input", "s_values", "dilations",
      "region", "t_values", "fixed_box", "refine", "search", "seed", "threads", "format", "output"};
  for (const auto& [key, _] : value.items())
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end())
      fail(ErrorCode::kConfigInvalid, "unknown config key '" + key + "'");

  RunConfig config;
  try {
    if (!value.contains("command")) fail(ErrorCode::kConfigInvalid, "config needs a command");
    config.command = lookup(kCommands, value.at("command").get<std::string>(), "command");
    if (value.contains("check")) config.check = lookup(kChecks, value.at("check").get<std::string>(), "check");
    if (value.contains("params")) {
      config.params = params_from_json(value.at("params"));
      config.has_theta = value.at("params").contains("theta");
    }
    if (value.contains("family")) config.families.push_back(family_from_json(value.at("family")));
    if (value.contains("families"))
      for (const auto& f : value.at("families")) config.families.push_back(family_from_json(f));
    if (value.contains("grid")) config.grid = grid_from_json(value.at("grid"));
    if (value.contains("input")) config.input = value.at("input").get<std::string>();
    if (value.contains("s_values")) config.s_values = number_list(value.at("s_values"), "s_values");
    if (value.contains("dilations")) config.dilations = number_list(value.at("dilations"), "dilations");
    if (value.contains("region")) config.region = box_from_json(value.at("region"));
    if (value.contains("t_values")) config.t_values = number_list(value.at("t_values"), "t_values");
    config.fixed_box = value.value("fixed_box", false);
    config.refine = value.value("refine", false);
    config.search = value.value("search", true);
    config.seed = value.value("seed", std::uint64_t{0});
    config.threads = value.value("threads", 0u);
    if (value.contains("format")) {
      const auto format = value.at("format").get<std::string>();
      if (format == "json") config.format = OutputFormat::kJson;
      else if (format == "csv") config.format = OutputFormat::kCsv;
      else fail(ErrorCode::kConfigInvalid, "format must be json or csv");
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kConfigInvalid, std::string("malformed config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    fail(ErrorCode::kConfigInvalid, e.what());
  }

  if (config.input && !std::filesystem::exists(*config.input))
    fail(ErrorCode::kConfigInvalid, "input file '" + *config.input + "' does not exist");
  if (config.input && !config.families.empty())
    fail(ErrorCode::kConfigInvalid, "give either input or families, not both");
  if (config.grid) validate_grid(*config.grid);
  for (const auto& f : config.families) {
    const std::size_t dim = config.grid ? config.grid->box.dim()
                                        : (f.center.empty() ? static_cast<std::size_t>(config.params.n) : f.center.size());
    try {
      FamilySpec probe = f;
      if (probe.center.empty()) probe.center.assign(dim, 0.0);
      probe.validate(dim);
    } catch (const Error& e) {
      fail(ErrorCode::kConfigInvalid, e.what());
    }
  }
  for (double s : config.s_values)
    if (!(s > 0)) fail(ErrorCode::kConfigInvalid, "s values must be positive");
  for (double s : config.dilations)
    if (!(s > 0)) fail(ErrorCode::kConfigInvalid, "dilations must be positive");
  return config;
}

Json to_json(const RunConfig& config) {
  Json out{{"command", std::string(command_name(config.command))}, {"params", to_json(config.params)}};
  if (!config.has_theta) out["params"].erase("theta");
  if (config.command == Command::kVerify) out["check"] = std::string(check_name(config.check));
  if (!config.families.empty()) {
    Json families = Json::array();
    for (const auto& f : config.families) families.push_back(to_json(f));
    out["families"] = families;
  }
  if (config.grid) out["grid"] = to_json(*config.grid);
  if (config.input) out["input"] = *config.input;
  if (!config.s_values.empty()) out["s_values"] = config.s_values;
  if (!config.dilations.empty()) out["dilations"] = config.dilations;
  if (config.region) out["region"] = to_json(*config.region);
  if (!config.t_values.empty()) out["t_values"] = config.t_values;
  out["fixed_box"] = config.fixed_box;
  out["refine"] = config.refine;
  out["search"] = config.search;
  out["seed"] = config.seed;
  out["format"] = config.format == OutputFormat::kJson ? "json" : "csv";
  return out;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  set_max_threads(config.threads);
  Outcome outcome;
  try {
    switch (config.command) {
      case Command::kExponents: outcome = run_exponents(config); break;
      case Command::kVerify: outcome = run_verify(config); break;
      case Command::kCover: outcome = run_cover(config); break;
      case Command::kSharpness: outcome = run_sharpness(config); break;
      case Command::kConstant: outcome = run_constant(config); break;
    }
  } catch (const Error& e) {
    result.status = config_error(e.code()) ? ErrorCode::kConfigInvalid : ErrorCode::kContractFailed;
    result.exit_code = config_error(e.code()) ? kExitConfigInvalid : kExitContractFailed;
    result.report = {{"command", std::string(command_name(config.command))},
                     {"config", to_json(config)},
                     {"status", std::string(error_name(result.status))},
                     {"error", {{"code", std::string(error_name(e.code()))}, {"message", e.what()}}},
                     {"passed", false}};
    result.summary = std::string(e.what()) + "\n";
    result.csv = "error,message\n" + std::string(error_name(e.code())) + "," + csv_field(e.what()) + "\n";
    return result;
  }
  bool passed = true;
  for (const auto& [_, ok] : outcome.contracts) passed = passed && ok;
  result.status = passed ? ErrorCode::kOk : ErrorCode::kContractFailed;
  result.exit_code = passed ? kExitOk : kExitContractFailed;
  result.report = {{"command", std::string(command_name(config.command))},
                   {"config", to_json(config)},
                   {"results", outcome.results},
                   {"contracts", outcome.contracts},
                   {"passed", passed},
                   {"status", std::string(error_name(result.status))}};
  result.csv = outcome.csv;
  result.summary = outcome.summary;
  if (!passed)
    for (const auto& [name, ok] : outcome.contracts)
      if (!ok) result.summary += "contract failed: " + name + "\n";
  return result;
}

RunResult run_json(const std::string& config_text) {
  auto rejected = [](const std::string& code, const std::string& message) {
    RunResult result;
    result.exit_code = kExitConfigInvalid;
    result.status = ErrorCode::kConfigInvalid;
    result.report = {{"status", "CONFIG_INVALID"}, {"error", {{"code", code}, {"message", message}}}, {"passed", false}};
    result.summary = message + "\n";
    result.csv = "error,message\n" + code + "," + csv_field(message) + "\n";
    return result;
  };
  RunConfig config;
  try {
    config = config_from_json(Json::parse(config_text));
  } catch (const Json::exception& e) {
    return rejected("PARSE_ERROR", std::string("PARSE_ERROR: ") + e.what());
  } catch (const Error& e) {
    return rejected(std::string(error_name(e.code())), e.what());
  }
  return run(config);
}

}  // namespace gnlab
