#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "indefrep/error.hpp"
#include "indefrep/problem.hpp"
#include "indefrep/report.hpp"

namespace py = pybind11;
using namespace indefrep;

namespace {

KernelTolerance tolerance(std::optional<double> absolute, double scale) {
  KernelTolerance tol;
  tol.absolute = absolute;
  tol.scale = scale;
  return tol;
}

py::dict representation_dict(const RepresentationResult& r) {
  py::dict d;
  d["A"] = r.A.matrix();
  d["J"] = r.J.J().matrix();
  d["B"] = r.B.matrix();
  d["B_tilde"] = r.B_tilde.matrix();
  d["H0"] = r.H0.matrix();
  d["H_tilde"] = r.H_tilde.matrix();
  d["c"] = r.c;
  d["scale"] = r.scale;
  d["consistency_residual"] = r.consistency_residual;
  d["first_rep_residual"] = r.first_rep_residual;
  d["second_rep_residual"] = r.second_rep_residual;
  d["gap_margin"] = gap_certificate_check(r);
  d["certified"] = r.certified;
  return d;
}

RunMode parse_mode(const std::string& mode) {
  for (RunMode m : {RunMode::all, RunMode::verify, RunMode::kernel, RunMode::stability,
                    RunMode::family}) {
    if (mode == to_string(m)) return m;
  }
  throw Error(ErrorKind::input, "python", "unknown mode '" + mode + "'");
}

}  // namespace

PYBIND11_MODULE(_indefrep, m) {
  m.doc() = "Operators associated with sign-indefinite quadratic forms";

  static py::exception<Error> error_type(m, "Error", PyExc_RuntimeError);
  static py::exception<Error> input_error_type(m, "InputError", error_type.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::input) {
        py::set_error(input_error_type, e.what());
      } else {
        py::set_error(error_type, e.what());
      }
    }
  });

  m.def(
      "eig_sym",
      [](const Matrix& a) {
        const SpectralDecomposition d = eig_sym(SymMatrix(a));
        return py::make_tuple(d.eigenvalues, d.eigenvectors);
      },
      py::arg("m"), "Ascending eigenvalues and orthonormal eigenvectors.");
  m.def(
      "nullspace",
      [](const Matrix& a, std::optional<double> absolute, double scale) {
        return nullspace(SymMatrix(a), tolerance(absolute, scale)).vectors;
      },
      py::arg("m"), py::arg("tol") = py::none(), py::arg("tol_scale") = 1.0);
  m.def("op_norm", [](const Matrix& a) { return op_norm(SymMatrix(a)); });
  m.def("min_abs_eig", [](const Matrix& a) { return min_abs_eig(SymMatrix(a)); });
  m.def(
      "resolvent_identity_residual",
      [](const Matrix& t1, const Matrix& t2, double lambda) {
        return resolvent_identity_residual(SymMatrix(t1), SymMatrix(t2), lambda);
      },
      py::arg("t1"), py::arg("t2"), py::arg("lam"));
  m.def(
      "spectral_identity_residual",
      [](const Matrix& t1, const Matrix& t2) { return spectral_identity_residual(t1, t2); },
      py::arg("t1"), py::arg("t2"));
  m.def(
      "sgn_matrix",
      [](const Matrix& b, int s) { return sgn_matrix(SymMatrix(b), SgnChoice(s)).matrix(); },
      py::arg("b"), py::arg("s") = 1);

  m.def(
      "check_hypothesis",
      [](const Matrix& a, const Matrix& h, const Matrix& j) {
        const GapCertificate c =
            check_hypothesis1(SymMatrix(a), SymMatrix(h), make_involution(SymMatrix(j)));
        py::dict d;
        d["satisfied"] = c.satisfied;
        d["alpha_star"] = c.alpha_star;
        d["lambda_min_plus"] = c.lambda_min_plus;
        d["lambda_max_minus"] = c.lambda_max_minus;
        d["refusal"] = c.refusal;
        return d;
      },
      py::arg("a"), py::arg("h"), py::arg("j"));
  m.def(
      "associate_general",
      [](const Matrix& a, const Matrix& h, const Matrix& j, bool force, std::uint64_t seed) {
        GeneralOptions options;
        options.force = force;
        options.seed = seed;
        return representation_dict(
            associate_general(SymMatrix(a), SymMatrix(h), make_involution(SymMatrix(j)), options));
      },
      py::arg("a"), py::arg("h"), py::arg("j"), py::arg("force") = false, py::arg("seed") = 0);
  m.def(
      "assemble_offdiag",
      [](const Matrix& a_plus, const Matrix& a_minus, const Matrix& t, std::uint64_t seed) {
        const OffDiagonalProblem p(SymMatrix(a_plus), SymMatrix(a_minus), t);
        py::dict d = representation_dict(assemble_offdiag(p, seed));
        d["beta"] = p.beta();
        d["hat_H"] = hat_H(p).matrix();
        return d;
      },
      py::arg("a_plus"), py::arg("a_minus"), py::arg("t"), py::arg("seed") = 0);
  m.def(
      "kernel_via_theorem",
      [](const Matrix& a_plus, const Matrix& a_minus, const Matrix& t) {
        const KernelReport k =
            kernel_via_theorem(OffDiagonalProblem(SymMatrix(a_plus), SymMatrix(a_minus), t));
        py::dict d;
        d["theorem_kernel"] = k.theorem_kernel.vectors;
        d["oracle_kernel"] = k.oracle_kernel.vectors;
        d["L_plus"] = k.L_plus.vectors;
        d["L_minus"] = k.L_minus.vectors;
        d["principal_angle"] = k.principal_angle;
        d["dims_match"] = k.dims_match;
        return d;
      },
      py::arg("a_plus"), py::arg("a_minus"), py::arg("t"));
  m.def(
      "stability_suite",
      [](const Matrix& a, const Matrix& b, int s) {
        const StabilityReport r = stability_suite(SymMatrix(a), SymMatrix(b), SgnChoice(s));
        py::dict d;
        d["norm_X"] = r.norm_X;
        d["norm_Y"] = r.norm_Y;
        d["norm_K"] = r.norm_K;
        d["K_involution_residual"] = r.K_involution_residual;
        d["XY_inverse_residual"] = r.XY_inverse_residual;
        d["min_abs_eig_shifted"] = r.min_abs_eig_shifted;
        d["conditions"] = r.conditions;
        d["conditions_agree"] = r.conditions_agree();
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("s") = 1);

  m.def("gen_counterexample", [](int n) { return dump_spec(gen_counterexample(n)); },
        py::arg("n"), "ProblemSpec JSON text for the counterexample truncation N.");
  m.def(
      "gen_random",
      [](const std::string& kind, int n, std::uint64_t seed, double alpha) {
        RandomSpecOptions o;
        if (kind == "general") {
          o.kind = ProblemKind::general;
        } else if (kind == "offdiag") {
          o.kind = ProblemKind::offdiag;
        } else {
          throw Error(ErrorKind::input, "python", "unknown kind '" + kind + "'");
        }
        o.n = n;
        o.seed = seed;
        o.alpha_target = alpha;
        return dump_spec(gen_random(o));
      },
      py::arg("kind"), py::arg("n"), py::arg("seed") = 0, py::arg("alpha") = 0.5);
  m.def(
      "run",
      [](const std::string& spec_json, const std::string& mode) {
        const Report r = run(parse_spec(spec_json), parse_mode(mode));
        return py::make_tuple(r.to_json(false).dump(), r.exit_code());
      },
      py::arg("spec_json"), py::arg("mode") = "all",
      "Runs a ProblemSpec given as JSON text; returns (report JSON text, exit code).");
}
