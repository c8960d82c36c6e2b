#include "indefrep/stability.hpp"

#include "indefrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace indefrep {

namespace {

constexpr const char* kModule = "stability";

double sign_of(double x, double tau, double zero_value) {
  if (std::abs(x) <= tau) return zero_value;
  return x > 0 ? 1.0 : -1.0;
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

SgnChoice::SgnChoice(int s) : s_(s) {
  if (s != 1 && s != -1) {
    throw Error(ErrorKind::input, kModule, "sign of zero must be -1 or +1");
  }
}

SymMatrix sgn_matrix(const SymMatrix& b, SgnChoice choice,
                     const KernelTolerance& tol) {
  const SpectralDecomposition d = eig_sym(b);
  const double tau = tol.threshold(d.dim(), d.source_norm);
  const double s = choice.value();
  return apply_fn(d, [tau, s](double x) { return sign_of(x, tau, s); });
}

bool StabilityReport::conditions_agree() const {
  if (conditions.empty()) return true;
  const bool first = conditions.begin()->second;
  return std::all_of(conditions.begin(), conditions.end(),
                     [first](const auto& kv) { return kv.second == first; });
}

StabilityReport stability_suite(const SymMatrix& a, const SymMatrix& b,
                                SgnChoice choice,
                                const StabilityOptions& options) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::input, kModule, "A and B must share a dimension");
  }
  const Index n = a.dim();
  const Matrix identity = Matrix::Identity(n, n);
  const double rtol = options.residual_tol;

  const SpectralDecomposition db = eig_sym(b);
  const double tau = options.tol.threshold(n, db.source_norm);
  const double s = choice.value();
  auto sgn = [tau, s](double x) { return sign_of(x, tau, s); };

  const Matrix j = apply_fn(db, sgn).matrix();
  const SymMatrix shifted = apply_fn(db, [&](double x) { return x + sgn(x); });
  const Matrix abs_shifted = apply_fn(db, [&](double x) { return std::abs(x + sgn(x)); }).matrix();
  const Matrix abs_shifted_inv = apply_fn(db, [&](double x) { return 1.0 / std::abs(x + sgn(x)); }).matrix();
  const Matrix shifted_inv = apply_fn(db, [&](double x) { return 1.0 / (x + sgn(x)); }).matrix();
  const Matrix abs_shifted_sqrt = apply_fn(db, [&](double x) { return std::sqrt(std::abs(x + sgn(x))); }).matrix();
  const Matrix abs_shifted_inv_sqrt = apply_fn(db, [&](double x) { return 1.0 / std::sqrt(std::abs(x + sgn(x))); }).matrix();

  StabilityReport r;
  r.min_abs_eig_shifted = min_abs_eig(shifted);
  if (r.min_abs_eig_shifted < 1.0 - rtol) {
    std::ostringstream os;
    os << "B + sgn(B) has an eigenvalue of modulus " << r.min_abs_eig_shifted
       << " < 1";
    throw Error(ErrorKind::internal, kModule, os.str());
  }

  const SpectralDecomposition da = eig_sym(clamp_psd(a, options.tol).matrix);
  const Matrix up = apply_fn(da, [](double x) { return std::sqrt(x + 1.0); }).matrix();
  const Matrix down = apply_fn(da, [](double x) { return 1.0 / std::sqrt(x + 1.0); }).matrix();

  const Matrix x = down * abs_shifted * down;
  const Matrix y = up * abs_shifted_inv * up;
  const Matrix k = up * j * down;
  const Matrix x_tilde = up * shifted_inv * up;
  const Matrix y_tilde = down * shifted.matrix() * down;

  r.norm_X = spectral_norm(x);
  r.norm_Y = spectral_norm(y);
  r.norm_K = spectral_norm(k);
  r.norm_X_tilde = spectral_norm(x_tilde);
  r.norm_Y_tilde = spectral_norm(y_tilde);
  r.K_involution_residual = spectral_norm(k * k - identity);
  r.XY_inverse_residual = std::max(spectral_norm(x_tilde * y_tilde - identity),
                                   spectral_norm(y_tilde * x_tilde - identity));
  r.K_factor_residual = std::max(spectral_norm(k - x_tilde * x),
                                 spectral_norm(k - y * y_tilde));

  // sign(B) f(B) = sgn(B) f(B) whenever f(0) = 0.
  const Matrix sign_b = sign_zero(b, options.tol).matrix();
  const Matrix abs_b = apply_fn(db, [](double v) { return std::abs(v); }).matrix();
  r.sgn_invariance_residual =
      std::max(spectral_norm(j * b.matrix() - sign_b * b.matrix()),
               spectral_norm(j * abs_b - sign_b * abs_b));

  // Each flag turns false only on a non-finite value or an identity that
  // fails beyond its rounding-scaled tolerance.
  const double d_ii = spectral_norm(abs_shifted_sqrt * down);
  const double d_ii_prime = spectral_norm(up * abs_shifted_inv_sqrt);
  const bool ii = finite(d_ii);
  const bool ii_prime = finite(d_ii_prime);
  const bool iii = finite(r.norm_X) &&
                   max_asymmetry(x) <= rtol * std::max(1.0, r.norm_X);
  const bool iii_prime = finite(r.norm_Y) &&
                         max_asymmetry(y) <= rtol * std::max(1.0, r.norm_Y);
  const bool iv = finite(r.norm_K) &&
                  r.K_involution_residual <= rtol * std::max(1.0, r.norm_K * r.norm_K);
  const double up_norm = spectral_norm(up);
  const bool v = finite(r.norm_K) &&
                 spectral_norm(up * j - k * up) <=
                     rtol * std::max(1.0, r.norm_K * up_norm);
  r.conditions = {{"i", ii && ii_prime}, {"ii", ii},         {"ii'", ii_prime},
                  {"iii", iii},           {"iii'", iii_prime}, {"iv", iv},
                  {"v", v}};
  return r;
}

bool sufficient_b_definite(const SymMatrix& a, const SymMatrix& h,
                           const SymMatrix& b, double tol) {
  if (a.dim() != h.dim() || a.dim() != b.dim()) {
    throw Error(ErrorKind::input, kModule, "A, H and B must share a dimension");
  }
  const SpectralDecomposition dh = eig_sym(h);
  int s = 0;
  if (dh.eigenvalues.minCoeff() > 0.0) s = 1;
  if (dh.eigenvalues.maxCoeff() < 0.0) s = -1;
  if (s == 0) return false;
  const Index n = b.dim();
  const Matrix expected = static_cast<double>(s) * Matrix::Identity(n, n);
  const double defect =
      spectral_norm(sgn_matrix(b, SgnChoice(s)).matrix() - expected);
  if (defect > tol) {
    std::ostringstream os;
    os << "definite H but sgn(B) differs from " << (s > 0 ? "I" : "-I")
       << " by " << defect;
    throw Error(ErrorKind::internal, kModule, os.str());
  }
  return true;
}

SemiboundedSearch sufficient_c_semibounded(const SymMatrix& a,
                                           const SymMatrix& h_tilde,
                                           const SymMatrix& b,
                                           const Involution& j,
                                           const KernelTolerance& tol) {
  const Index n = a.dim();
  const SymMatrix inv_shift =
      apply_fn(clamp_psd(a, tol).matrix, [](double x) { return 1.0 / (x + 1.0); });
  const SpectralDecomposition dbj = eig_sym(b + j.J());
  Vector inv_spectrum = dbj.eigenvalues.cwiseInverse();
  const double inv_tau =
      tol.threshold(n, inv_spectrum.cwiseAbs().maxCoeff());

  SemiboundedSearch search;
  double c = op_norm(b) + 1.0;
  for (int step = 1; step <= kMaxDoublings; ++step, c *= 2.0) {
    search.steps = step;
    search.c = c;
    const SymMatrix shifted = h_tilde + c * inv_shift;
    const SpectralDecomposition ds = eig_sym(shifted);
    const double pos_tau = tol.threshold(n, ds.source_norm);
    if (ds.eigenvalues[0] <= pos_tau) continue;
    const double gap = (inv_spectrum.array() + 1.0 / c).abs().minCoeff();
    if (gap <= inv_tau) continue;
    search.found = true;
    return search;
  }
  return search;
}

double spectral_identity_residual(const Matrix& t1, const Matrix& t2,
                                  const KernelTolerance& tol) {
  if (t1.rows() != t2.cols() || t1.cols() != t2.rows()) {
    throw Error(ErrorKind::input, kModule,
                "spectral identity needs T1 (p x q) and T2 (q x p)");
  }
  const double norm = spectral_norm(t1) * spectral_norm(t2);
  const Index dim = std::max(t1.rows(), t1.cols());
  const double tau = tol.threshold(dim, norm);

  // Eigenvalues by decreasing modulus.
  auto spectrum = [](const Matrix& m) {
    std::vector<std::complex<double>> out;
    if (m.size() == 0) return out;
    Eigen::EigenSolver<Matrix> solver(m, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::internal, kModule, "eigensolver did not converge");
    }
    for (Index i = 0; i < solver.eigenvalues().size(); ++i) out.push_back(solver.eigenvalues()[i]);
    std::stable_sort(out.begin(), out.end(),
                     [](auto x, auto y) { return std::abs(x) > std::abs(y); });
    return out;
  };
  std::vector<std::complex<double>> small = spectrum(t1 * t2);
  std::vector<std::complex<double>> large = spectrum(t2 * t1);
  if (small.size() > large.size()) std::swap(small, large);

  // The larger product carries |large| - |small| extra eigenvalues that must
  // vanish; they enter the residual through their modulus.
  double extra = 0.0;
  for (std::size_t i = small.size(); i < large.size(); ++i) extra = std::max(extra, std::abs(large[i]));
  large.resize(small.size());

  auto drop_zeros = [tau](std::vector<std::complex<double>> v) {
    std::erase_if(v, [tau](auto z) { return std::abs(z) <= tau; });
    return v;
  };
  auto directed = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& z : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& w : to) best = std::min(best, std::abs(z - w));
      worst = std::max(worst, best);
    }
    return worst;
  };
  // A nonzero eigenvalue on one side may sit at the threshold on the other,
  // so each side is matched against the full list of the other.
  const double hausdorff =
      std::max(directed(drop_zeros(small), large), directed(drop_zeros(large), small));
  return std::max(hausdorff, extra <= tau ? 0.0 : extra);
}

FamilyInstance counterexample_instance(int n) {
  if (n < 1 || n > 64) {
    std::ostringstream os;
    os << "counterexample truncation requires 1 <= N <= 64, got " << n;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  Vector diag(2 * n);
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  for (int k = 1; k <= n; ++k) {
    const Index i = 2 * (k - 1);
    diag[i] = k + 1.0;
    diag[i + 1] = 1.0 / (k + 1.0);
    h(i, i + 1) = 1.0;
    h(i + 1, i) = 1.0;
  }
  return {SymMatrix::diagonal(diag), SymMatrix(h)};
}

Involution alternating_involution(Index dim) {
  Vector signs(dim);
  for (Index i = 0; i < dim; ++i) signs[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return make_diagonal_involution(signs);
}

FamilyInstance identity_instance(int n) {
  if (n < 1 || n > 64) {
    std::ostringstream os;
    os << "identity truncation requires 1 <= N <= 64, got " << n;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  return {SymMatrix::identity(2 * n), alternating_involution(2 * n).J()};
}

bool diagonal_gap_search(const SymMatrix& a, const SymMatrix& h,
                         std::uint64_t* tried, std::optional<Involution>* found) {
  std::uint64_t count = 0;
  bool success = false;
  for (const Involution& j : enumerate_diagonal_involutions(static_cast<int>(a.dim()))) {
    ++count;
    if (!commutes(j, a).commutes) continue;
    const GapCertificate cert = check_hypothesis1(a, h, j);
    if (cert.satisfied) {
      success = true;
      if (found) *found = j;
      break;
    }
  }
  if (tried) *tried = count;
  return success;
}

FamilyDiagnostics family_diagnostics(const FamilyGenerator& generator,
                                     const std::vector<int>& sizes,
                                     const FamilyOptions& options) {
  FamilyDiagnostics out;
  for (int n : sizes) {
    if (options.exhaustive && (n < 1 || n > kMaxExhaustiveFamilySize)) {
      std::ostringstream os;
      os << "exhaustive involution sweep requires 1 <= N <= "
         << kMaxExhaustiveFamilySize << " (2^(2N) candidates), got " << n;
      throw Error(ErrorKind::input, kModule, os.str());
    }
    const FamilyInstance inst = generator(n);
    const Index dim = inst.A.dim();

    std::optional<bool> outcome;
    std::uint64_t tried = 0;
    if (options.exhaustive) outcome = diagonal_gap_search(inst.A, inst.H, &tried);

    GeneralOptions gopts;
    gopts.force = true;
    gopts.seed = options.seed;
    const RepresentationResult rep =
        associate_general(inst.A, inst.H, alternating_involution(dim), gopts);
    const StabilityReport st = stability_suite(rep.A, rep.B, SgnChoice::plus());

    const SpectralDecomposition da = eig_sym(rep.A);
    const double lo = da.eigenvalues[0];
    const double hi = da.eigenvalues[dim - 1];
    const Matrix up = apply_fn(da, [](double x) { return std::sqrt(x + 1.0); }).matrix();
    const Matrix down = apply_fn(da, [](double x) { return 1.0 / std::sqrt(x + 1.0); }).matrix();

    out.truncation_sizes.push_back(n);
    out.norm_X.push_back(st.norm_X);
    out.norm_Y.push_back(st.norm_Y);
    out.norm_K.push_back(st.norm_K);
    out.norm_B.push_back(op_norm(rep.B));
    out.cond_A.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    out.criterion_a_proxy.push_back(spectral_norm(up * inst.H.matrix() * down));
    out.gap_search_outcomes.push_back(outcome);
    out.involutions_tried.push_back(tried);
  }
  return out;
}

}  // namespace indefrep
