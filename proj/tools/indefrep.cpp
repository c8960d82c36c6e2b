// indefrep: verify, kernel, stability, family and generate subcommands.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 input error.

#include "indefrep/error.hpp"
#include "indefrep/problem.hpp"
#include "indefrep/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace indefrep;

struct GlobalOptions {
  double tol_scale = 1.0;
  bool force = false;
  std::string json_out;
};

std::vector<int> parse_sizes(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw Error(ErrorKind::input, "cli", "invalid size '" + s + "' in --sizes " + text);
    }
    return v;
  };
  std::vector<int> sizes;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw Error(ErrorKind::input, "cli", "empty range in --sizes " + text);
    for (int n = lo; n <= hi; ++n) sizes.push_back(n);
    return sizes;
  }
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) sizes.push_back(to_int(item));
  return sizes;
}

void print_report(const Report& report, std::ostream& os) {
  for (const CheckResult& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
       << " threshold=" << c.threshold;
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << '\n';
  }
  if (report.certificate && !report.certificate->satisfied) {
    os << "gap hypothesis refused: " << report.certificate->refusal << '\n';
  }
  os << (report.passed() ? "passed" : "FAILED") << " (" << report.checks.size()
     << " checks, " << report.wall_time_seconds << " s)\n";
}

int finish(const Report& report, const GlobalOptions& g) {
  // With the JSON report on stdout the summary moves to stderr.
  const bool json_to_stdout = g.json_out == "-";
  print_report(report, json_to_stdout ? std::cerr : std::cout);
  if (!g.json_out.empty()) {
    const std::string text = report.to_json().dump(2) + "\n";
    if (json_to_stdout) {
      std::cout << text;
    } else {
      std::ofstream out(g.json_out);
      if (!out) throw Error(ErrorKind::input, "cli", "cannot write " + g.json_out);
      out << text;
    }
  }
  return report.exit_code();
}

ProblemSpec with_globals(ProblemSpec spec, const GlobalOptions& g) {
  spec.tol_scale *= g.tol_scale;
  spec.force = spec.force || g.force;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operators associated with sign-indefinite quadratic forms"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--tol-scale", g.tol_scale, "Multiply every tolerance by this factor")
      ->check(CLI::PositiveNumber);
  app.add_flag("--force", g.force, "Build B even when the gap hypothesis is refused");
  app.add_option("--json-out", g.json_out, "Write the JSON report here ('-' for stdout)");

  std::string spec_path;
  RunMode mode = RunMode::all;
  for (const auto& [name, m, help] :
       {std::tuple{"verify", RunMode::verify, "Representation identities and gap certificate"},
        std::tuple{"kernel", RunMode::kernel, "Kernel formula against the nullspace oracle"},
        std::tuple{"stability", RunMode::stability, "Domain-stability suite and sufficient criteria"}}) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("spec", spec_path, "ProblemSpec JSON file")->required();
    sub->callback([&mode, m = m] { mode = m; });
  }

  std::string family_name;
  std::string sizes_text;
  CLI::App* family = app.add_subcommand("family", "Truncation family diagnostics");
  family->add_option("name", family_name, "counterexample or identity")->required();
  family->add_option("--sizes", sizes_text, "Range 1..N or comma list")->required();

  std::string gen_kind;
  RandomSpecOptions gen;
  std::string gen_out;
  std::vector<int> kernel_dims;
  int plus_dim = 0;
  CLI::App* generate = app.add_subcommand("generate", "Write a ProblemSpec");
  generate->add_option("kind", gen_kind, "general, offdiag or counterexample")->required();
  generate->add_option("--n", gen.n, "Dimension, or N for counterexample")->required();
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen_out, "Output path")->required();
  generate->add_option("--alpha", gen.alpha_target, "general: gap target")
      ->check(CLI::Range(1e-6, 1.0));
  generate->add_option("--plus-dim", plus_dim, "offdiag: dim of the plus block");
  generate->add_option("--kernel-dims", kernel_dims, "offdiag: dim Ker A+ and dim Ker A-")
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      ProblemSpec spec;
      if (gen_kind == "counterexample") {
        spec = gen_counterexample(gen.n);
      } else if (gen_kind == "general" || gen_kind == "offdiag") {
        gen.kind = gen_kind == "general" ? ProblemKind::general : ProblemKind::offdiag;
        if (plus_dim > 0) gen.plus_dim = plus_dim;
        if (kernel_dims.size() == 2) {
          gen.kernel_plus = kernel_dims[0];
          gen.kernel_minus = kernel_dims[1];
        }
        spec = gen_random(gen);
      } else {
        throw Error(ErrorKind::input, "cli", "unknown kind '" + gen_kind + "'");
      }
      spec = with_globals(std::move(spec), g);
      save_spec(spec, gen_out);
      std::cout << "wrote " << gen_out << '\n';
      return 0;
    }
    if (family->parsed()) {
      ProblemSpec spec;
      spec.kind = ProblemKind::family;
      spec.family = FamilySpec{family_name, parse_sizes(sizes_text)};
      // Round-trip through the parser so the same validation applies.
      spec = with_globals(parse_spec(dump_spec(spec)), g);
      return finish(run(spec, RunMode::family), g);
    }
    return finish(run(with_globals(load_spec(spec_path), g), mode), g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
