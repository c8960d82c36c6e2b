#include "indefrep/rep_general.hpp"

#include "indefrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace indefrep {

namespace {

constexpr const char* kModule = "rep-general";
constexpr double kConsistencyTol = 1e-10;

double sqrt_clamped(double x) { return std::sqrt(std::max(x, 0.0)); }

}  // namespace

Probes make_probes(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto unit = [&] {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    return Vector(v / v.norm());
  };
  Probes probes;
  for (Index k = 0; k < 2 * n; ++k) {
    Vector x = unit();
    Vector y = unit();
    probes.push_back({std::move(x), std::move(y)});
  }
  if (n <= 16) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        probes.push_back({Vector::Unit(n, i), Vector::Unit(n, j)});
      }
    }
  }
  return probes;
}

double form_residual(const SesquilinearForm& form, const SymMatrix& b,
                     const Probes& probes, double scale) {
  double worst = 0.0;
  for (const auto& [x, y] : probes) {
    const double expected = x.dot(b.matrix() * y);
    const double defect = std::abs(form(x, y) - expected);
    worst = std::max(worst, defect / (x.norm() * y.norm() * scale));
  }
  return worst;
}

double represented_residual(const SesquilinearForm& form,
                            const SymMatrix& abs_sqrt_b,
                            const SymMatrix& sign_b, const Probes& probes,
                            double scale) {
  double worst = 0.0;
  for (const auto& [x, y] : probes) {
    const Vector rx = abs_sqrt_b.matrix() * x;
    const Vector ry = abs_sqrt_b.matrix() * y;
    const double defect = std::abs(form(x, y) - rx.dot(sign_b.matrix() * ry));
    worst = std::max(worst, defect / (x.norm() * y.norm() * scale));
  }
  return worst;
}

SymMatrix sign_zero(const SymMatrix& b, const KernelTolerance& tol) {
  const SpectralDecomposition d = eig_sym(b);
  const double tau = tol.threshold(d.dim(), d.source_norm);
  return apply_fn(d, [tau](double x) {
    if (std::abs(x) <= tau) return 0.0;
    return x > 0 ? 1.0 : -1.0;
  });
}

double general_scale(const SymMatrix& a, const SymMatrix& h) {
  return (1.0 + op_norm(a)) * std::max(op_norm(h), kEps);
}

GapCertificate check_hypothesis1(const SymMatrix& a, const SymMatrix& h,
                                 const Involution& j,
                                 const HypothesisOptions& options) {
  if (a.dim() != h.dim() || a.dim() != j.dim()) {
    throw Error(ErrorKind::input, kModule, "A, H and J must share a dimension");
  }
  const SymMatrix a_psd = clamp_psd(a, options.tol).matrix;

  const SpectralDecomposition dh = eig_sym(h);
  const double h_tau = options.tol.threshold(dh.dim(), dh.source_norm);
  if (dh.dim() > 0 && (dh.source_norm == 0.0 || min_abs_eig(dh) <= h_tau)) {
    std::ostringstream os;
    os << "H singular: min |eigenvalue| = " << min_abs_eig(dh);
    throw Error(ErrorKind::input, kModule, os.str());
  }

  const CommutationCheck comm = commutes(j, a_psd, options.commutation_tol);
  if (!comm.commutes) {
    std::ostringstream os;
    os << "J does not commute with A: |JA - AJ| = " << comm.residual;
    throw Error(ErrorKind::input, kModule, os.str());
  }

  const BlockDecomposition blocks = block_decompose(h, j);
  GapCertificate cert;
  cert.lambda_min_plus = eig_sym(blocks.m_plus).eigenvalues.minCoeff();
  cert.lambda_max_minus = eig_sym(blocks.m_minus).eigenvalues.maxCoeff();
  cert.uncapped_bound = std::min(cert.lambda_min_plus, -cert.lambda_max_minus);
  cert.satisfied = cert.uncapped_bound > 0.0;
  if (cert.satisfied) {
    cert.alpha_star = std::min(1.0, cert.uncapped_bound);
  } else {
    std::ostringstream os;
    os.precision(6);
    if (cert.lambda_min_plus <= 0.0) {
      os << "P H P >= alpha P fails: min eigenvalue of H+ is "
         << cert.lambda_min_plus;
    }
    if (cert.lambda_max_minus >= 0.0) {
      if (cert.lambda_min_plus <= 0.0) os << "; ";
      os << "P' H P' <= -alpha P' fails: max eigenvalue of H- is "
         << cert.lambda_max_minus;
    }
    cert.refusal = os.str();
  }
  return cert;
}

HTilde build_H_tilde(const SymMatrix& a, const SymMatrix& h,
                     const Involution& j) {
  const SpectralDecomposition da = snap_kernel(eig_sym(a));
  const SymMatrix r =
      apply_fn(da, [](double x) { return sqrt_clamped(x / (x + 1.0)); });
  const SymMatrix shift_inv = apply_fn(da, [](double x) { return 1.0 / (x + 1.0); });
  SymMatrix h0 = SymMatrix::symmetrized(r.matrix() * h.matrix() * r.matrix());
  SymMatrix h_tilde = SymMatrix::symmetrized(
      h0.matrix() + shift_inv.matrix() * j.J().matrix());
  return {std::move(h0), std::move(h_tilde)};
}

RepresentationResult associate_general(const SymMatrix& a, const SymMatrix& h,
                                       const Involution& j,
                                       const GeneralOptions& options) {
  const GapCertificate cert = check_hypothesis1(a, h, j, options.hypothesis);
  if (!cert.satisfied && !options.force) {
    throw Error(ErrorKind::hypothesis, kModule,
                "gap hypothesis refused: " + cert.refusal);
  }
  const PsdRepair repaired = clamp_psd(a, options.hypothesis.tol);
  const SymMatrix& a_psd = repaired.matrix;

  const SpectralDecomposition da = snap_kernel(eig_sym(a_psd), options.hypothesis.tol);
  const SymMatrix sqrt_a = apply_fn(da, sqrt_clamped);
  const SymMatrix sqrt_shift = apply_fn(da, [](double x) { return std::sqrt(x + 1.0); });

  HTilde ht = build_H_tilde(a_psd, h, j);
  SymMatrix b = SymMatrix::symmetrized(sqrt_a.matrix() * h.matrix() * sqrt_a.matrix());
  SymMatrix b_tilde = SymMatrix::symmetrized(
      sqrt_shift.matrix() * ht.H_tilde.matrix() * sqrt_shift.matrix());

  const double scale = general_scale(a_psd, h);
  const double consistency =
      spectral_norm(b_tilde.matrix() - j.J().matrix() - b.matrix());
  if (consistency > kConsistencyTol * scale) {
    std::ostringstream os;
    os << "(B~ - J) differs from A^1/2 H A^1/2 by " << consistency
       << " (scale " << scale << ")";
    throw Error(ErrorKind::internal, kModule, os.str());
  }
  // B̃ is formed as B + J so that B̃ - B = J holds exactly.
  b_tilde = b + j.J();

  const double c = min_abs_eig(ht.H_tilde);
  const Probes probes = make_probes(a.dim(), options.seed);

  RepresentationResult result{a_psd,
                              j,
                              b,
                              b_tilde,
                              std::move(ht.H0),
                              std::move(ht.H_tilde),
                              c,
                              scale,
                              consistency,
                              0.0,
                              0.0,
                              repaired.clamp_magnitude,
                              cert.satisfied,
                              cert};
  result.first_rep_residual = first_rep_residual(a_psd, h, b, probes);
  result.second_rep_residual = second_rep_residual(a_psd, h, b, probes);
  return result;
}

double gap_certificate_check(const RepresentationResult& result,
                             const Involution& j) {
  return min_abs_eig(result.B + j.J()) - result.c;
}

double gap_certificate_check(const RepresentationResult& result) {
  return gap_certificate_check(result, result.J);
}

namespace {

SesquilinearForm general_form(const SymMatrix& a, const SymMatrix& h) {
  const Matrix sqrt_a = apply_fn(snap_kernel(eig_sym(a)), sqrt_clamped).matrix();
  const Matrix& hm = h.matrix();
  return [sqrt_a, hm](const Vector& x, const Vector& y) {
    return (sqrt_a * x).dot(hm * (sqrt_a * y));
  };
}

}  // namespace

double first_rep_residual(const SymMatrix& a, const SymMatrix& h,
                          const SymMatrix& b, const Probes& probes) {
  return form_residual(general_form(a, h), b, probes, general_scale(a, h));
}

double second_rep_residual(const SymMatrix& a, const SymMatrix& h,
                           const SymMatrix& b, const Probes& probes) {
  const SpectralDecomposition db = eig_sym(b);
  const SymMatrix abs_sqrt = apply_fn(db, [](double x) { return std::sqrt(std::abs(x)); });
  return represented_residual(general_form(a, h), abs_sqrt, sign_zero(b), probes,
                              general_scale(a, h));
}

}  // namespace indefrep
