#include "indefrep/involution.hpp"

#include "indefrep/error.hpp"

#include <cmath>
#include <sstream>

namespace indefrep {

namespace {

constexpr const char* kModule = "involution-blocks";

void require_same_dim(Index a, Index b) {
  if (a != b) {
    std::ostringstream os;
    os << "dimension mismatch: " << a << " vs " << b;
    throw Error(ErrorKind::input, kModule, os.str());
  }
}

}  // namespace

Matrix Involution::block_basis() const {
  Matrix q(dim(), dim());
  q << plus_.vectors, minus_.vectors;
  return q;
}

Involution make_involution(const SymMatrix& j) {
  const Index n = j.dim();
  const Matrix& jm = j.matrix();
  const double defect = (jm * jm - Matrix::Identity(n, n)).norm();
  if (defect > 1e-12 * static_cast<double>(n)) {
    std::ostringstream os;
    os << "not an involution: |J^2 - I| = " << defect;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  const SpectralDecomposition d = eig_sym(j);
  Index minus_count = 0;
  while (minus_count < n && d.eigenvalues[minus_count] < 0.0) ++minus_count;
  if (minus_count == 0 || minus_count == n) {
    throw Error(ErrorKind::input, kModule,
                "trivial involution: J must differ from +I and -I");
  }
  SubspaceBasis minus{d.eigenvectors.leftCols(minus_count)};
  SubspaceBasis plus{d.eigenvectors.rightCols(n - minus_count)};
  const Matrix identity = Matrix::Identity(n, n);
  SymMatrix p = SymMatrix::symmetrized(0.5 * (identity + jm));
  SymMatrix p_perp = SymMatrix::symmetrized(identity - p.matrix());
  return Involution(j, std::move(p), std::move(p_perp), std::move(plus),
                    std::move(minus));
}

Involution make_diagonal_involution(const Vector& signs) {
  return make_involution(SymMatrix::diagonal(signs));
}

CommutationCheck commutes(const Involution& j, const SymMatrix& a, double tol) {
  require_same_dim(j.dim(), a.dim());
  const Matrix& jm = j.J().matrix();
  const Matrix& am = a.matrix();
  CommutationCheck check;
  check.residual = spectral_norm(jm * am - am * jm);
  check.commutes = check.residual <= tol * op_norm(a);
  return check;
}

BlockDecomposition block_decompose(const SymMatrix& m, const Involution& j) {
  require_same_dim(j.dim(), m.dim());
  const Matrix& qp = j.plus_basis().vectors;
  const Matrix& qm = j.minus_basis().vectors;
  const Matrix& mm = m.matrix();
  return {SymMatrix::symmetrized(qp.transpose() * mm * qp),
          SymMatrix::symmetrized(qm.transpose() * mm * qm),
          qp.transpose() * mm * qm};
}

SymMatrix reassemble(const BlockDecomposition& blocks, const Involution& j) {
  const Index p = blocks.m_plus.dim();
  const Index m = blocks.m_minus.dim();
  if (p != j.plus_basis().dim() || m != j.minus_basis().dim() ||
      blocks.coupling.rows() != p || blocks.coupling.cols() != m) {
    throw Error(ErrorKind::input, kModule,
                "block shapes do not match the involution");
  }
  Matrix coords(p + m, p + m);
  coords << blocks.m_plus.matrix(), blocks.coupling,
      blocks.coupling.transpose(), blocks.m_minus.matrix();
  const Matrix q = j.block_basis();
  return SymMatrix::symmetrized(q * coords * q.transpose());
}

Involution DiagonalInvolutions::iterator::operator*() const {
  Vector signs(n_);
  for (int i = 0; i < n_; ++i) signs[i] = ((mask_ >> i) & 1u) ? -1.0 : 1.0;
  return make_diagonal_involution(signs);
}

DiagonalInvolutions::DiagonalInvolutions(int n) : n_(n) {
  if (n < 1 || n > kMaxEnumerationDim) {
    std::ostringstream os;
    os << "diagonal involution enumeration requires 1 <= n <= "
       << kMaxEnumerationDim << " (2^n candidates), got n = " << n;
    throw Error(ErrorKind::input, kModule, os.str());
  }
  // Masks 1 .. 2^n - 2; mask 0 is +I and 2^n - 1 is -I.
  last_ = (std::uint32_t{1} << n) - 1u;
  if (last_ < 1u) last_ = 1u;
}

DiagonalInvolutions enumerate_diagonal_involutions(int n) {
  return DiagonalInvolutions(n);
}

}  // namespace indefrep
