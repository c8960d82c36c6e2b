#pragma once

// Orchestration of the suites for one ProblemSpec and the JSON report.

#include "indefrep/error.hpp"
#include "indefrep/problem.hpp"
#include "indefrep/rep_general.hpp"
#include "indefrep/rep_offdiag.hpp"
#include "indefrep/stability.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace indefrep {

enum class RunMode { all, verify, kernel, stability, family };

const char* to_string(RunMode mode) noexcept;

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RepresentationSummary {
  bool certified = false;
  double c = 0.0;
  double gap_margin = 0.0;  // min_abs_eig(B + J) - c
  double norm_B = 0.0;
  double scale = 1.0;
  double consistency_residual = 0.0;
  double first_rep_residual = 0.0;
  double second_rep_residual = 0.0;
  double clamp_magnitude = 0.0;
  std::optional<double> hat_H_residual;   // off-diagonal problems only
  std::optional<double> form_bound_ratio;  // off-diagonal problems only
  std::string involution_source;          // "supplied", "sweep", "reference", "diagonal split"
  Matrix J;
};

struct KernelSummary {
  Index dim_ker_A_plus = 0;
  Index dim_ker_A_minus = 0;
  Index dim_L_plus = 0;
  Index dim_L_minus = 0;
  Index dim_plus_part = 0;
  Index dim_minus_part = 0;
  Index theorem_dim = 0;
  Index oracle_dim = 0;
  bool dims_match = false;
  double principal_angle = 0.0;
  double definitional_residual = 0.0;
  Matrix theorem_kernel;
};

struct SufficiencySummary {
  std::optional<bool> b_definite;
  std::optional<SemiboundedSearch> c_semibounded;
};

struct Report {
  ProblemSpec spec;
  RunMode mode = RunMode::all;
  std::optional<GapCertificate> certificate;
  std::optional<std::uint64_t> involutions_tried;
  std::optional<RepresentationSummary> representation;
  std::optional<KernelSummary> kernel;
  std::optional<StabilityReport> stability;
  std::optional<SufficiencySummary> sufficiency;
  std::optional<FamilyDiagnostics> family;
  std::vector<CheckResult> checks;
  double wall_time_seconds = 0.0;

  bool passed() const;
  /// 0 when every check passed, 1 otherwise.
  int exit_code() const { return passed() ? 0 : 1; }
  nlohmann::json to_json(bool include_wall_time = true) const;
};

/// Runs the suites selected by `mode`. Input problems raise Error with
/// ErrorKind::input; failed checks are recorded in the report.
Report run(const ProblemSpec& spec, RunMode mode = RunMode::all);

/// Exit code for an error escaping run(): 2 for input errors, 1 otherwise.
int exit_code_for(const Error& error) noexcept;

}  // namespace indefrep
