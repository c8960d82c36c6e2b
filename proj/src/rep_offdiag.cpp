#include "indefrep/rep_offdiag.hpp"

#include "indefrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace indefrep {

namespace {

constexpr const char* kModule = "rep-offdiag";
constexpr double kIdentityTol = 1e-10;

Matrix block_diag(const Matrix& top, const Matrix& bottom) {
  Matrix m = Matrix::Zero(top.rows() + bottom.rows(), top.cols() + bottom.cols());
  m.topLeftCorner(top.rows(), top.cols()) = top;
  m.bottomRightCorner(bottom.rows(), bottom.cols()) = bottom;
  return m;
}

SubspaceBasis embed(const SubspaceBasis& plus, const SubspaceBasis& minus) {
  return {block_diag(plus.vectors, minus.vectors)};
}

struct Shifts {
  SymMatrix sqrt_shift;      // (A+I)^{1/2}
  SymMatrix inv_sqrt_shift;  // (A+I)^{-1/2}
  SymMatrix inv_shift;       // (A+I)^{-1}
};

Shifts shifts_of(const SymMatrix& a) {
  const SpectralDecomposition d = eig_sym(a);
  return {apply_fn(d, [](double x) { return std::sqrt(x + 1.0); }),
          apply_fn(d, [](double x) { return 1.0 / std::sqrt(x + 1.0); }),
          apply_fn(d, [](double x) { return 1.0 / (x + 1.0); })};
}

SymMatrix sandwich(const SymMatrix& outer, const SymMatrix& inner) {
  return SymMatrix::symmetrized(outer.matrix() * inner.matrix() * outer.matrix());
}

// B assembled through B̃ - J with B̃ = (A+I)^{1/2} H̃ (A+I)^{1/2}.
// Right singular vectors of M with singular value ≤ tau, including the
// directions beyond the row count.
SubspaceBasis right_nullspace(const Matrix& m, double tau) {
  const Index n = m.cols();
  if (m.rows() == 0) return {Matrix::Identity(n, n)};
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > tau) ++rank;
  return {svd.matrixV().rightCols(n - rank)};
}

SymMatrix assemble_b(const SymMatrix& sqrt_shift, const SymMatrix& h_tilde, const SymMatrix& j) {
  return sandwich(sqrt_shift, h_tilde) - j;
}

}  // namespace

OffDiagonalProblem::OffDiagonalProblem(const SymMatrix& a_plus,
                                       const SymMatrix& a_minus, Matrix t,
                                       const KernelTolerance& tol)
    : a_plus_(a_plus), a_minus_(a_minus), t_(std::move(t)) {
  if (t_.rows() != a_plus.dim() || t_.cols() != a_minus.dim()) {
    std::ostringstream os;
    os << "T must be " << a_plus.dim() << "x" << a_minus.dim() << ", got "
       << t_.rows() << "x" << t_.cols();
    throw Error(ErrorKind::input, kModule, os.str());
  }
  if (!t_.allFinite()) {
    throw Error(ErrorKind::input, kModule, "T has non-finite entries");
  }
  PsdRepair plus = clamp_psd(a_plus, tol);
  PsdRepair minus = clamp_psd(a_minus, tol);
  a_plus_ = std::move(plus.matrix);
  a_minus_ = std::move(minus.matrix);
  clamp_ = std::max(plus.clamp_magnitude, minus.clamp_magnitude);
  beta_ = op_norm(S());
}

SymMatrix OffDiagonalProblem::A() const {
  return SymMatrix::symmetrized(block_diag(a_plus_.matrix(), a_minus_.matrix()));
}

Involution OffDiagonalProblem::J() const {
  Vector signs(dim());
  signs.head(plus_dim()).setOnes();
  signs.tail(minus_dim()).setConstant(-1.0);
  return make_diagonal_involution(signs);
}

SymMatrix OffDiagonalProblem::S() const {
  Matrix s = Matrix::Zero(dim(), dim());
  s.topRightCorner(plus_dim(), minus_dim()) = t_;
  s.bottomLeftCorner(minus_dim(), plus_dim()) = t_.transpose();
  return SymMatrix::symmetrized(std::move(s));
}

double OffDiagonalProblem::scale() const {
  return (1.0 + op_norm(A())) * (1.0 + beta_);
}

OffDiagonalCheck check_offdiagonal(const SymMatrix& s, const Involution& j,
                                   double tol) {
  if (s.dim() != j.dim()) {
    throw Error(ErrorKind::input, kModule, "S and J must share a dimension");
  }
  const Matrix& sm = s.matrix();
  const Matrix& p = j.P().matrix();
  const Matrix& q = j.P_perp().matrix();
  const Matrix& jm = j.J().matrix();
  OffDiagonalCheck check;
  check.residual = std::max(spectral_norm(p * sm * p), spectral_norm(q * sm * q));
  check.anticommutator_residual = spectral_norm(jm * sm + sm * jm);
  check.off_diagonal = check.residual <= tol * op_norm(s);
  return check;
}

SesquilinearForm offdiag_form(const OffDiagonalProblem& p) {
  const SymMatrix a = p.A();
  const SpectralDecomposition d = snap_kernel(eig_sym(a));
  const Matrix sqrt_a =
      apply_fn(d, [](double x) { return std::sqrt(std::max(x, 0.0)); }).matrix();
  const Matrix sqrt_shift =
      apply_fn(d, [](double x) { return std::sqrt(x + 1.0); }).matrix();
  const Matrix jm = p.J().J().matrix();
  const Matrix sm = p.S().matrix();
  return [sqrt_a, sqrt_shift, jm, sm](const Vector& x, const Vector& y) {
    const double diagonal = (sqrt_a * x).dot(jm * (sqrt_a * y));
    const double coupling = (sm * (sqrt_shift * x)).dot(sqrt_shift * y);
    return diagonal + coupling;
  };
}

double form_bound_ratio(const OffDiagonalProblem& p, std::uint64_t seed) {
  if (p.beta() == 0.0) return 0.0;
  const Matrix sqrt_shift = shifts_of(p.A()).sqrt_shift.matrix();
  const Matrix sm = p.S().matrix();
  double worst = 0.0;
  for (const auto& probe : make_probes(p.dim(), seed)) {
    const Vector u = sqrt_shift * probe.x;
    const double v = (sm * u).dot(u);
    worst = std::max(worst, std::abs(v) / (p.beta() * u.squaredNorm()));
  }
  return worst;
}

RepresentationResult assemble_offdiag(const OffDiagonalProblem& p,
                                      std::uint64_t seed) {
  const SymMatrix a = p.A();
  const Involution j = p.J();
  const Shifts sh = shifts_of(a);
  SymMatrix h_tilde = j.J() + p.S();
  SymMatrix b = assemble_b(sh.sqrt_shift, h_tilde, j.J());
  SymMatrix h0 = hat_H(p);
  const double scale = p.scale();
  const double consistency = spectral_norm(
      b.matrix() - sandwich(sh.sqrt_shift, h0).matrix());

  GapCertificate cert;
  cert.satisfied = true;
  cert.alpha_star = 1.0;
  cert.lambda_min_plus = 1.0;
  cert.lambda_max_minus = -1.0;
  cert.uncapped_bound = 1.0;

  const double c = min_abs_eig(h_tilde);
  SymMatrix b_tilde = b + j.J();
  RepresentationResult result{a,
                              j,
                              b,
                              std::move(b_tilde),
                              std::move(h0),
                              std::move(h_tilde),
                              c,
                              scale,
                              consistency,
                              0.0,
                              0.0,
                              p.clamp_magnitude(),
                              true,
                              cert};
  const Probes probes = make_probes(p.dim(), seed);
  const SesquilinearForm form = offdiag_form(p);
  result.first_rep_residual = form_residual(form, b, probes, scale);
  const SymMatrix abs_sqrt =
      apply_fn(b, [](double x) { return std::sqrt(std::abs(x)); });
  result.second_rep_residual =
      represented_residual(form, abs_sqrt, sign_zero(b), probes, scale);
  return result;
}

namespace {

SymMatrix hat_H_unchecked(const OffDiagonalProblem& p) {
  const Index np = p.plus_dim();
  const Index nm = p.minus_dim();
  const Matrix inv_plus = shifts_of(p.A_plus()).inv_shift.matrix();
  const Matrix inv_minus = shifts_of(p.A_minus()).inv_shift.matrix();
  Matrix h(np + nm, np + nm);
  h.topLeftCorner(np, np) = Matrix::Identity(np, np) - inv_plus;
  h.topRightCorner(np, nm) = p.T();
  h.bottomLeftCorner(nm, np) = p.T().transpose();
  h.bottomRightCorner(nm, nm) = -Matrix::Identity(nm, nm) + inv_minus;
  return SymMatrix::symmetrized(std::move(h));
}

}  // namespace

double hat_H_identity_residual(const OffDiagonalProblem& p) {
  const Involution j = p.J();
  const Shifts sh = shifts_of(p.A());
  const SymMatrix b = assemble_b(sh.sqrt_shift, j.J() + p.S(), j.J());
  return spectral_norm(b.matrix() - sandwich(sh.sqrt_shift, hat_H_unchecked(p)).matrix());
}

SymMatrix hat_H(const OffDiagonalProblem& p) {
  const double residual = hat_H_identity_residual(p);
  if (residual > kIdentityTol * p.scale()) {
    std::ostringstream os;
    os << "B differs from (A+I)^1/2 H^ (A+I)^1/2 by " << residual;
    throw Error(ErrorKind::internal, kModule, os.str());
  }
  return hat_H_unchecked(p);
}

KernelReport kernel_via_theorem(const OffDiagonalProblem& p,
                                const KernelOptions& options) {
  const KernelTolerance& tol = options.tol;
  const Matrix& t = p.T();
  const SymMatrix a = p.A();
  const Involution j = p.J();
  const Shifts sh = shifts_of(a);
  const SymMatrix h_tilde = j.J() + p.S();
  const SymMatrix b = assemble_b(sh.sqrt_shift, h_tilde, j.J());

  // Every kernel below is decided against the zero level of B itself, so a
  // block that is zero up to rounding counts as zero on both sides.
  const double factor_scale = (1.0 + op_norm(a)) * op_norm(h_tilde);
  KernelTolerance zero_level;
  zero_level.absolute = tol.threshold(p.dim(), factor_scale);

  KernelReport r;
  r.ker_A_plus = nullspace(p.A_plus(), zero_level);
  r.ker_A_minus = nullspace(p.A_minus(), zero_level);
  r.ker_T_adjoint = right_nullspace(t.transpose(), *zero_level.absolute);
  r.ker_T = right_nullspace(t, *zero_level.absolute);

  const Shifts plus_shift = shifts_of(p.A_plus());
  const Shifts minus_shift = shifts_of(p.A_minus());
  r.L_plus = orthonormalize(plus_shift.inv_sqrt_shift.matrix() * r.ker_T_adjoint.vectors, tol);
  r.L_minus = orthonormalize(minus_shift.inv_sqrt_shift.matrix() * r.ker_T.vectors, tol);

  r.plus_part = intersect(r.ker_A_plus, r.L_plus, tol);
  r.minus_part = intersect(r.ker_A_minus, r.L_minus, tol);
  r.theorem_kernel = embed(r.plus_part, r.minus_part);

  r.oracle_kernel = nullspace(b, zero_level);

  r.dims_match = r.theorem_kernel.dim() == r.oracle_kernel.dim();
  r.principal_angle = largest_principal_angle(r.theorem_kernel, r.oracle_kernel);

  // v[x₊ ⊕ 0, 0 ⊕ y₋] = <x₊', T y₋'> with primes denoting (A±+I)^{1/2}.
  double worst = 0.0;
  const Matrix& sp = plus_shift.sqrt_shift.matrix();
  const Matrix& sm = minus_shift.sqrt_shift.matrix();
  const Probes minus_probes = make_probes(p.minus_dim(), options.seed);
  const Probes plus_probes = make_probes(p.plus_dim(), options.seed + 1);
  for (Index k = 0; k < r.L_plus.dim(); ++k) {
    const Vector u = sp * r.L_plus.vectors.col(k);
    for (const auto& probe : minus_probes) {
      const Vector w = sm * probe.x;
      worst = std::max(worst, std::abs(u.dot(t * w)) / (u.norm() * w.norm()));
    }
  }
  for (Index k = 0; k < r.L_minus.dim(); ++k) {
    const Vector w = sm * r.L_minus.vectors.col(k);
    for (const auto& probe : plus_probes) {
      const Vector u = sp * probe.x;
      worst = std::max(worst, std::abs(u.dot(t * w)) / (u.norm() * w.norm()));
    }
  }
  r.definitional_residual = worst;
  return r;
}

}  // namespace indefrep
