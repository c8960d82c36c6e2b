#include "indefrep/spectral.hpp"

#include "indefrep/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace indefrep {

namespace {

constexpr const char* kModule = "spectral-core";

void require_finite(const Matrix& m) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::input, kModule, "matrix has non-finite entries");
  }
}

void require_square(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream os;
    os << "expected a nonempty square matrix, got " << m.rows() << "x"
       << m.cols();
    throw Error(ErrorKind::input, kModule, os.str());
  }
}

// Flip each column so that its first entry of magnitude > 1e-10 is positive.
void normalize_signs(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-10) {
        if (v(i, j) < 0) v.col(j) = -v.col(j);
        break;
      }
    }
  }
}

}  // namespace

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::domain: return "domain";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

double max_asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

SymMatrix::SymMatrix(Matrix m) {
  require_square(m);
  require_finite(m);
  const double asym = max_asymmetry(m);
  const double bound = 100.0 * kEps * m.norm();
  if (asym > bound) {
    std::ostringstream os;
    os << "matrix is not symmetric: max asymmetry " << asym
       << " exceeds 100*eps*|M| = " << bound;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  data_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::symmetrized(Matrix m) {
  require_square(m);
  require_finite(m);
  Matrix s = 0.5 * (m + m.transpose());
  return SymMatrix(std::move(s), Trusted{});
}

SymMatrix SymMatrix::identity(Index n) {
  return SymMatrix(Matrix::Identity(n, n), Trusted{});
}

SymMatrix SymMatrix::zero(Index n) {
  return SymMatrix(Matrix::Zero(n, n), Trusted{});
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  Matrix m = d.asDiagonal();
  require_square(m);
  require_finite(m);
  return SymMatrix(std::move(m), Trusted{});
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.data_ + b.data_, SymMatrix::Trusted{});
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  return SymMatrix(a.data_ - b.data_, SymMatrix::Trusted{});
}

SymMatrix operator*(double s, const SymMatrix& a) {
  return SymMatrix(s * a.data_, SymMatrix::Trusted{});
}

SpectralDecomposition eig_sym(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::internal, kModule,
                "symmetric eigensolver did not converge");
  }
  SpectralDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  d.eigenvectors = solver.eigenvectors();
  normalize_signs(d.eigenvectors);
  d.source_norm = d.eigenvalues.cwiseAbs().maxCoeff();
  return d;
}

SymMatrix apply_fn(const SpectralDecomposition& d,
                   const std::function<double(double)>& f) {
  Vector mapped(d.dim());
  for (Index i = 0; i < d.dim(); ++i) {
    mapped[i] = f(d.eigenvalues[i]);
    if (!std::isfinite(mapped[i])) {
      std::ostringstream os;
      os.precision(17);
      os << "function is undefined at eigenvalue " << d.eigenvalues[i];
      throw Error(ErrorKind::domain, kModule, os.str());
    }
  }
  return SymMatrix::symmetrized(d.eigenvectors * mapped.asDiagonal() *
                                d.eigenvectors.transpose());
}

SymMatrix apply_fn(const SymMatrix& m, const std::function<double(double)>& f) {
  return apply_fn(eig_sym(m), f);
}

SymMatrix reconstruct(const SpectralDecomposition& d) {
  return apply_fn(d, [](double x) { return x; });
}

SubspaceBasis nullspace(const SpectralDecomposition& d,
                        const KernelTolerance& tol) {
  const double tau = tol.threshold(d.dim(), d.source_norm);
  std::vector<Index> keep;
  for (Index i = 0; i < d.dim(); ++i) {
    if (std::abs(d.eigenvalues[i]) <= tau) keep.push_back(i);
  }
  Matrix basis(d.dim(), static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    basis.col(static_cast<Index>(k)) = d.eigenvectors.col(keep[k]);
  }
  return {std::move(basis)};
}

SubspaceBasis nullspace(const SymMatrix& m, const KernelTolerance& tol) {
  return nullspace(eig_sym(m), tol);
}

double op_norm(const SymMatrix& m) { return eig_sym(m).source_norm; }

double min_abs_eig(const SpectralDecomposition& d) {
  return d.eigenvalues.cwiseAbs().minCoeff();
}

double min_abs_eig(const SymMatrix& m) { return min_abs_eig(eig_sym(m)); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

SpectralDecomposition snap_kernel(SpectralDecomposition d, const KernelTolerance& tol) {
  const double tau = tol.threshold(d.dim(), d.source_norm);
  for (Index i = 0; i < d.dim(); ++i) {
    if (std::abs(d.eigenvalues[i]) <= tau) d.eigenvalues[i] = 0.0;
  }
  return d;
}

PsdRepair clamp_psd(const SymMatrix& m, const KernelTolerance& tol) {
  SpectralDecomposition d = eig_sym(m);
  const double tau = tol.threshold(d.dim(), d.source_norm);
  const double lowest = d.eigenvalues[0];
  if (lowest < -tau) {
    std::ostringstream os;
    os.precision(6);
    os << "matrix is not positive semidefinite: smallest eigenvalue "
       << lowest << " < -" << tau;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  if (lowest >= 0.0) return {m, 0.0};
  double clamp = 0.0;
  for (Index i = 0; i < d.dim(); ++i) {
    if (d.eigenvalues[i] < 0.0) {
      clamp = std::max(clamp, -d.eigenvalues[i]);
      d.eigenvalues[i] = 0.0;
    }
  }
  return {reconstruct(d), clamp};
}

double resolvent_identity_residual(const SymMatrix& t1, const SymMatrix& t2,
                                   double lambda) {
  if (t1.dim() != t2.dim()) {
    throw Error(ErrorKind::input, kModule,
                "resolvent identity needs operators of equal dimension");
  }
  const Index n = t1.dim();
  const Matrix identity = Matrix::Identity(n, n);
  auto resolvent = [&](const SymMatrix& t, const char* name) {
    const SpectralDecomposition d = eig_sym(t);
    const double tau =
        static_cast<double>(n) * kEps * (d.source_norm + std::abs(lambda));
    for (Index i = 0; i < n; ++i) {
      if (std::abs(lambda - d.eigenvalues[i]) <= tau) {
        std::ostringstream os;
        os.precision(17);
        os << "lambda = " << lambda << " is in the spectrum of " << name
           << " (eigenvalue " << d.eigenvalues[i] << ")";
        throw Error(ErrorKind::input, kModule, os.str());
      }
    }
    return Matrix((lambda * identity - t.matrix()).partialPivLu().inverse());
  };
  const Matrix r1 = resolvent(t1, "T1");
  const Matrix r2 = resolvent(t2, "T2");
  const Matrix diff = t1.matrix() - t2.matrix();
  const Matrix lhs = r1 - r2;
  return std::max(spectral_norm(lhs - r1 * diff * r2),
                  spectral_norm(lhs - r2 * diff * r1));
}

SubspaceBasis orthonormalize(const Matrix& columns, const KernelTolerance& tol) {
  const Index n = columns.rows();
  if (columns.cols() == 0) return SubspaceBasis::trivial(n);
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  const double scale =
      qr.matrixQR().rows() > 0 ? std::abs(qr.matrixQR()(0, 0)) : 0.0;
  Index rank = 0;
  const Index diag = std::min(n, columns.cols());
  const double cut = tol.threshold(std::max(n, columns.cols()), scale);
  for (Index i = 0; i < diag; ++i) {
    if (std::abs(qr.matrixQR()(i, i)) > cut) ++rank;
  }
  Matrix q = qr.householderQ() * Matrix::Identity(n, rank);
  return {std::move(q)};
}

SubspaceBasis intersect(const SubspaceBasis& u, const SubspaceBasis& w,
                        const KernelTolerance& tol) {
  const Index n = u.ambient_dim();
  if (w.ambient_dim() != n) {
    throw Error(ErrorKind::input, kModule,
                "cannot intersect subspaces of different ambient spaces");
  }
  if (u.dim() == 0 || w.dim() == 0) return SubspaceBasis::trivial(n);
  const Matrix identity = Matrix::Identity(n, n);
  const SymMatrix complement = SymMatrix::symmetrized(
      (identity - u.projector()) + (identity - w.projector()));
  const SpectralDecomposition d = eig_sym(complement);
  // Eigenvalues of the complement sum live in [0, 2]; measure against 1 so a
  // zero complement (U = W = R^n) keeps a meaningful threshold.
  const double tau = tol.threshold(n, std::max(1.0, d.source_norm));
  KernelTolerance fixed;
  fixed.absolute = tau;
  return nullspace(d, fixed);
}

double largest_principal_angle(const SubspaceBasis& u, const SubspaceBasis& w) {
  if (u.dim() != w.dim()) return std::numbers::pi / 2.0;
  if (u.dim() == 0) return 0.0;
  const Matrix residual = w.vectors - u.vectors * (u.vectors.transpose() * w.vectors);
  const double s = std::min(1.0, spectral_norm(residual));
  return std::asin(s);
}

}  // namespace indefrep
