#include "indefrep/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace indefrep {

using nlohmann::json;

namespace {

constexpr const char* kModule = "harness";

constexpr double kRepTol = 1e-10;
constexpr double kGapMarginTol = 1e-8;
constexpr double kAngleTol = 1e-8;
constexpr double kNormTol = 1e-12;

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(format_decimal(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

class Checks {
 public:
  explicit Checks(std::vector<CheckResult>& out) : out_(out) {}

  void at_most(std::string name, double value, double threshold) {
    out_.push_back({std::move(name), value <= threshold, value, threshold, "<="});
  }
  void at_least(std::string name, double value, double threshold) {
    out_.push_back({std::move(name), value >= threshold, value, threshold, ">="});
  }
  void expect(std::string name, bool ok, std::string detail) {
    out_.push_back({std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)});
  }

 private:
  std::vector<CheckResult>& out_;
};

bool is_diagonal(const Matrix& m) {
  return (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

void stability_checks(Report& report, const SymMatrix& a, const SymMatrix& b,
                      double ts) {
  StabilityOptions options;
  options.tol.scale = ts;
  options.residual_tol = kRepTol * ts;
  const StabilityReport st = stability_suite(a, b, SgnChoice::plus(), options);
  Checks checks(report.checks);
  const double t = kRepTol * ts;
  checks.at_least("stability.min_abs_eig_shifted", st.min_abs_eig_shifted, 1.0 - t);
  checks.at_most("stability.K_involution", st.K_involution_residual,
                 t * std::max(1.0, st.norm_K * st.norm_K));
  checks.at_most("stability.XY_inverse", st.XY_inverse_residual,
                 t * std::max(1.0, st.norm_X_tilde * st.norm_Y_tilde));
  checks.at_most("stability.K_factorization", st.K_factor_residual,
                 t * std::max(1.0, st.norm_X_tilde * st.norm_X + st.norm_Y * st.norm_Y_tilde));
  checks.at_most("stability.sgn_invariance", st.sgn_invariance_residual,
                 t * std::max(1.0, op_norm(b)));
  checks.expect("stability.conditions_agree", st.conditions_agree(),
                "all equivalence flags agree");
  report.stability = st;
}

RepresentationSummary summarize(const RepresentationResult& rep,
                                std::string source) {
  RepresentationSummary s;
  s.certified = rep.certified;
  s.c = rep.c;
  s.gap_margin = gap_certificate_check(rep);
  s.norm_B = op_norm(rep.B);
  s.scale = rep.scale;
  s.consistency_residual = rep.consistency_residual;
  s.first_rep_residual = rep.first_rep_residual;
  s.second_rep_residual = rep.second_rep_residual;
  s.clamp_magnitude = rep.clamp_magnitude;
  s.involution_source = std::move(source);
  s.J = rep.J.J().matrix();
  return s;
}

void run_general(Report& report) {
  const ProblemSpec& spec = report.spec;
  const double ts = spec.tol_scale;
  HypothesisOptions hopts;
  hopts.tol.scale = ts;
  const SymMatrix a(spec.matrix("A"));
  const SymMatrix h(spec.matrix("H"));
  const Index n = a.dim();

  if (report.mode == RunMode::kernel) {
    throw Error(ErrorKind::input, kModule, "kernel analysis requires an offdiag problem");
  }

  std::optional<Involution> j;
  std::string source;
  GapCertificate cert;
  if (spec.has("J")) {
    j = make_involution(SymMatrix(spec.matrix("J")));
    source = "supplied";
    cert = check_hypothesis1(a, h, *j, hopts);
  } else {
    if (!is_diagonal(a.matrix())) {
      throw Error(ErrorKind::input, kModule,
                  "field J required for kind general unless A is diagonal");
    }
    std::uint64_t tried = 0;
    std::optional<Involution> found;
    const bool ok = diagonal_gap_search(a, h, &tried, &found);
    report.involutions_tried = tried;
    if (ok) {
      j = std::move(found);
      source = "sweep";
      cert = check_hypothesis1(a, h, *j, hopts);
    } else {
      j = alternating_involution(n);
      source = "reference";
      cert = check_hypothesis1(a, h, *j, hopts);
      std::ostringstream os;
      os << "no diagonal involution certifies the gap hypothesis (" << tried
         << " tried)";
      cert.refusal = os.str();
    }
  }
  report.certificate = cert;

  Checks checks(report.checks);
  if (spec.expect == Expectation::certified) {
    // --force turns a refusal into an uncertified construction, not a failure.
    checks.expect("gap_hypothesis", cert.satisfied || spec.force,
                  cert.satisfied ? "certified" : cert.refusal);
  } else {
    checks.expect("gap_failure_expected", !cert.satisfied,
                  cert.satisfied ? "hypothesis unexpectedly certified" : cert.refusal);
  }
  if (!cert.satisfied && !spec.force) return;

  GeneralOptions gopts;
  gopts.force = true;
  gopts.seed = spec.seed;
  gopts.hypothesis = hopts;
  const RepresentationResult rep = associate_general(a, h, *j, gopts);
  report.representation = summarize(rep, source);
  const RepresentationSummary& s = *report.representation;

  if (report.mode == RunMode::all || report.mode == RunMode::verify) {
    const double t = kRepTol * ts;
    checks.at_most("first_representation", s.first_rep_residual, t);
    checks.at_most("second_representation", s.second_rep_residual, t);
    checks.at_most("shift_consistency", s.consistency_residual, t * s.scale);
    if (rep.certified) {
      checks.at_least("gap_certificate_margin", s.gap_margin, -kGapMarginTol * ts);
      // The block bounds keep σ(H̃) out of (-α*, α*), so c ≥ α*.
      checks.at_least("gap_radius_at_least_alpha", s.c, *cert.alpha_star - t);
    }
  }
  if (report.mode == RunMode::all || report.mode == RunMode::stability) {
    stability_checks(report, rep.A, rep.B, ts);
    KernelTolerance ktol;
    ktol.scale = ts;
    SufficiencySummary suff;
    suff.b_definite = sufficient_b_definite(rep.A, h, rep.B, kRepTol * ts);
    suff.c_semibounded = sufficient_c_semibounded(rep.A, rep.H_tilde, rep.B, *j, ktol);
    checks.expect("sufficiency.c_semibounded", suff.c_semibounded->found,
                  "doubling search for c");
    report.sufficiency = suff;
  }
}

void run_offdiag(Report& report) {
  const ProblemSpec& spec = report.spec;
  const double ts = spec.tol_scale;
  KernelTolerance ktol;
  ktol.scale = ts;
  const OffDiagonalProblem p(SymMatrix(spec.matrix("A_plus")),
                             SymMatrix(spec.matrix("A_minus")), spec.matrix("T"), ktol);
  const RepresentationResult rep = assemble_offdiag(p, spec.seed);
  report.representation = summarize(rep, "diagonal split");
  RepresentationSummary& s = *report.representation;
  const double t = kRepTol * ts;
  Checks checks(report.checks);

  if (report.mode == RunMode::all || report.mode == RunMode::verify) {
    const OffDiagonalCheck od = check_offdiagonal(p.S(), rep.J, t);
    s.hat_H_residual = hat_H_identity_residual(p);
    s.form_bound_ratio = form_bound_ratio(p, spec.seed);
    checks.expect("off_diagonal", od.off_diagonal, "S has vanishing diagonal blocks");
    checks.at_most("first_representation", s.first_rep_residual, t);
    checks.at_most("second_representation", s.second_rep_residual, t);
    checks.at_most("hat_H_identity", *s.hat_H_residual, t * s.scale);
    checks.at_most("form_bound", *s.form_bound_ratio, 1.0 + t);
    checks.at_least("gap_certificate_margin", s.gap_margin, -kGapMarginTol * ts);
    checks.at_least("gap_radius_at_least_one", s.c, 1.0 - t);
  }
  if (report.mode == RunMode::all || report.mode == RunMode::kernel) {
    KernelOptions kopts;
    kopts.tol = ktol;
    kopts.seed = spec.seed;
    const KernelReport k = kernel_via_theorem(p, kopts);
    KernelSummary ks;
    ks.dim_ker_A_plus = k.ker_A_plus.dim();
    ks.dim_ker_A_minus = k.ker_A_minus.dim();
    ks.dim_L_plus = k.L_plus.dim();
    ks.dim_L_minus = k.L_minus.dim();
    ks.dim_plus_part = k.plus_part.dim();
    ks.dim_minus_part = k.minus_part.dim();
    ks.theorem_dim = k.theorem_kernel.dim();
    ks.oracle_dim = k.oracle_kernel.dim();
    ks.dims_match = k.dims_match;
    ks.principal_angle = k.principal_angle;
    ks.definitional_residual = k.definitional_residual;
    ks.theorem_kernel = k.theorem_kernel.vectors;
    checks.expect("kernel.dims_match", k.dims_match,
                  std::to_string(ks.theorem_dim) + " (theorem) vs " +
                      std::to_string(ks.oracle_dim) + " (nullspace of B)");
    checks.at_most("kernel.principal_angle", k.principal_angle, kAngleTol * ts);
    checks.at_most("kernel.definitional", k.definitional_residual,
                   t * std::max(1.0, p.beta()));
    report.kernel = ks;
  }
  if (report.mode == RunMode::all || report.mode == RunMode::stability) {
    stability_checks(report, rep.A, rep.B, ts);
  }
}

void run_family(Report& report) {
  const ProblemSpec& spec = report.spec;
  const FamilySpec& fam = *spec.family;
  const bool counterexample = fam.name == "counterexample";
  const FamilyGenerator generator = counterexample ? FamilyGenerator(counterexample_instance)
                                                   : FamilyGenerator(identity_instance);
  FamilyOptions options;
  options.seed = spec.seed;
  options.exhaustive =
      *std::max_element(fam.sizes.begin(), fam.sizes.end()) <= kMaxExhaustiveFamilySize;
  const FamilyDiagnostics d = family_diagnostics(generator, fam.sizes, options);
  report.family = d;

  Checks checks(report.checks);
  const double ts = spec.tol_scale;
  for (std::size_t i = 0; i < d.truncation_sizes.size(); ++i) {
    const int n = d.truncation_sizes[i];
    const std::string tag = "family[N=" + std::to_string(n) + "].";
    if (d.gap_search_outcomes[i]) {
      const bool certified = *d.gap_search_outcomes[i];
      if (counterexample) {
        checks.expect(tag + "gap_search_fails", !certified,
                      std::to_string(d.involutions_tried[i]) + " involutions tried");
      } else {
        checks.expect(tag + "gap_search_succeeds", certified, "diagonal involution sweep");
      }
    }
    checks.at_most(tag + "norm_B_is_one", std::abs(d.norm_B[i] - 1.0), kNormTol * ts);
    const double expected_cond = counterexample ? (n + 1.0) * (n + 1.0) : 1.0;
    checks.at_most(tag + "cond_A", std::abs(d.cond_A[i] - expected_cond) / expected_cond,
                   kRepTol * ts);
  }
}

json certificate_json(const GapCertificate& c) {
  json j;
  j["satisfied"] = c.satisfied;
  j["alpha_star"] = c.alpha_star ? json(*c.alpha_star) : json(nullptr);
  j["lambda_min_plus"] = c.lambda_min_plus;
  j["lambda_max_minus"] = c.lambda_max_minus;
  j["uncapped_bound"] = c.uncapped_bound;
  j["refusal"] = c.refusal;
  return j;
}

json stability_json(const StabilityReport& s) {
  json j;
  j["norm_X"] = number(s.norm_X);
  j["norm_Y"] = number(s.norm_Y);
  j["norm_K"] = number(s.norm_K);
  j["norm_X_tilde"] = number(s.norm_X_tilde);
  j["norm_Y_tilde"] = number(s.norm_Y_tilde);
  j["K_involution_residual"] = number(s.K_involution_residual);
  j["XY_inverse_residual"] = number(s.XY_inverse_residual);
  j["sgn_invariance_residual"] = number(s.sgn_invariance_residual);
  j["K_factor_residual"] = number(s.K_factor_residual);
  j["min_abs_eig_shifted"] = number(s.min_abs_eig_shifted);
  json flags = json::object();
  for (const auto& [k, v] : s.conditions) flags[k] = v;
  j["conditions"] = std::move(flags);
  j["conditions_agree"] = s.conditions_agree();
  return j;
}

json family_json(const FamilyDiagnostics& d) {
  auto numbers = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  json j;
  j["truncation_sizes"] = d.truncation_sizes;
  j["norm_X"] = numbers(d.norm_X);
  j["norm_Y"] = numbers(d.norm_Y);
  j["norm_K"] = numbers(d.norm_K);
  j["norm_B"] = numbers(d.norm_B);
  j["cond_A"] = numbers(d.cond_A);
  j["criterion_a_proxy"] = numbers(d.criterion_a_proxy);
  json outcomes = json::array();
  for (const auto& o : d.gap_search_outcomes) outcomes.push_back(o ? json(*o) : json(nullptr));
  j["gap_search_outcomes"] = std::move(outcomes);
  j["involutions_tried"] = d.involutions_tried;
  return j;
}

}  // namespace

const char* to_string(RunMode mode) noexcept {
  switch (mode) {
    case RunMode::all: return "all";
    case RunMode::verify: return "verify";
    case RunMode::kernel: return "kernel";
    case RunMode::stability: return "stability";
    case RunMode::family: return "family";
  }
  return "unknown";
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

json Report::to_json(bool include_wall_time) const {
  json j;
  json echo;
  echo["kind"] = to_string(spec.kind);
  echo["seed"] = spec.seed;
  echo["force"] = spec.force;
  echo["expect"] = to_string(spec.expect);
  echo["tol_scale"] = spec.tol_scale;
  echo["max_asymmetry"] = spec.max_asymmetry;
  json shapes = json::object();
  for (const auto& [name, m] : spec.matrices) shapes[name] = {m.rows(), m.cols()};
  echo["shapes"] = std::move(shapes);
  if (spec.family) echo["family"] = {{"name", spec.family->name}, {"sizes", spec.family->sizes}};
  j["spec"] = std::move(echo);
  j["mode"] = to_string(mode);

  if (certificate) j["certificate"] = certificate_json(*certificate);
  if (involutions_tried) j["involutions_tried"] = *involutions_tried;
  if (representation) {
    const RepresentationSummary& r = *representation;
    json rj;
    rj["certified"] = r.certified;
    rj["c"] = number(r.c);
    rj["gap_margin"] = number(r.gap_margin);
    rj["norm_B"] = number(r.norm_B);
    rj["scale"] = number(r.scale);
    rj["consistency_residual"] = number(r.consistency_residual);
    rj["first_rep_residual"] = number(r.first_rep_residual);
    rj["second_rep_residual"] = number(r.second_rep_residual);
    rj["clamp_magnitude"] = number(r.clamp_magnitude);
    if (r.hat_H_residual) rj["hat_H_residual"] = number(*r.hat_H_residual);
    if (r.form_bound_ratio) rj["form_bound_ratio"] = number(*r.form_bound_ratio);
    rj["involution_source"] = r.involution_source;
    rj["J"] = matrix_json(r.J);
    j["representation"] = std::move(rj);
  }
  if (kernel) {
    const KernelSummary& k = *kernel;
    j["kernel"] = {{"dim_ker_A_plus", k.dim_ker_A_plus},
                   {"dim_ker_A_minus", k.dim_ker_A_minus},
                   {"dim_L_plus", k.dim_L_plus},
                   {"dim_L_minus", k.dim_L_minus},
                   {"dim_plus_part", k.dim_plus_part},
                   {"dim_minus_part", k.dim_minus_part},
                   {"theorem_dim", k.theorem_dim},
                   {"oracle_dim", k.oracle_dim},
                   {"dims_match", k.dims_match},
                   {"principal_angle", number(k.principal_angle)},
                   {"definitional_residual", number(k.definitional_residual)},
                   {"theorem_kernel", matrix_json(k.theorem_kernel)}};
  }
  if (stability) j["stability"] = stability_json(*stability);
  if (sufficiency) {
    json sj;
    sj["b_definite"] = sufficiency->b_definite ? json(*sufficiency->b_definite) : json(nullptr);
    if (sufficiency->c_semibounded) {
      const SemiboundedSearch& c = *sufficiency->c_semibounded;
      sj["c_semibounded"] = {{"found", c.found}, {"c", number(c.c)}, {"steps", c.steps}};
    }
    j["sufficiency"] = std::move(sj);
  }
  if (family) j["family"] = family_json(*family);

  json cj = json::array();
  for (const CheckResult& c : checks) {
    cj.push_back({{"name", c.name},
                  {"passed", c.passed},
                  {"value", number(c.value)},
                  {"threshold", number(c.threshold)},
                  {"detail", c.detail}});
  }
  j["checks"] = std::move(cj);
  j["passed"] = passed();
  if (include_wall_time) j["wall_time_seconds"] = wall_time_seconds;
  return j;
}

Report run(const ProblemSpec& spec, RunMode mode) {
  const auto start = std::chrono::steady_clock::now();
  Report report;
  report.spec = spec;
  report.mode = mode;
  if (mode == RunMode::family && spec.kind != ProblemKind::family) {
    throw Error(ErrorKind::input, kModule, "family mode requires a family problem");
  }
  switch (spec.kind) {
    case ProblemKind::general: run_general(report); break;
    case ProblemKind::offdiag: run_offdiag(report); break;
    case ProblemKind::family: run_family(report); break;
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int exit_code_for(const Error& error) noexcept {
  return error.kind() == ErrorKind::input ? 2 : 1;
}

}  // namespace indefrep
