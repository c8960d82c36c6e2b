#include "indefrep/involution.hpp"

#include "common.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace indefrep;
using testing_support::diag;
using testing_support::expect_error;
using testing_support::mat;
using testing_support::max_abs;
using testing_support::sym;

namespace {

// Random involution Q diag(±1) Qᵀ with both signs present.
SymMatrix random_involution(oracle::Rng& rng, Index n) {
  const Index plus = rng.integer(1, static_cast<int>(n) - 1);
  Vector signs(n);
  for (Index i = 0; i < n; ++i) signs[i] = i < plus ? 1.0 : -1.0;
  const Matrix q = rng.orthogonal(n);
  return SymMatrix::symmetrized(q * signs.asDiagonal() * q.transpose());
}

}  // namespace

TEST(MakeInvolution, DiagonalProjector) {
  const Involution j = make_involution(diag({1, -1}));
  EXPECT_LE(max_abs(j.P().matrix() - diag({1, 0}).matrix()), 0.0);
  EXPECT_LE(max_abs(j.P_perp().matrix() - diag({0, 1}).matrix()), 0.0);
  EXPECT_EQ(j.plus_basis().dim(), 1);
  EXPECT_EQ(j.minus_basis().dim(), 1);
}

TEST(MakeInvolution, SwapHasAveragingProjector) {
  const Involution j = make_involution(sym({{0, 1}, {1, 0}}));
  // Eigenvectors (1,1)/√2 for +1 and (1,-1)/√2 for -1.
  const Matrix expected = 0.5 * mat({{1, 1}, {1, 1}});
  EXPECT_LE(max_abs(j.P().matrix() - expected), 1e-15);
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(j.plus_basis().vectors(0, 0), h, 1e-15);
  EXPECT_NEAR(j.plus_basis().vectors(1, 0), h, 1e-15);
  EXPECT_NEAR(j.minus_basis().vectors(0, 0), h, 1e-15);
  EXPECT_NEAR(j.minus_basis().vectors(1, 0), -h, 1e-15);
}

TEST(MakeInvolution, Errors) {
  expect_error(ErrorKind::input, "trivial involution", [] { make_involution(diag({1, 1})); });
  expect_error(ErrorKind::input, "trivial involution", [] { make_involution(diag({-1, -1, -1})); });
  expect_error(ErrorKind::input, "trivial involution", [] { make_involution(diag({1})); });
  expect_error(ErrorKind::input, "not an involution", [] { make_involution(diag({1, -2})); });
  expect_error(ErrorKind::input, "not an involution", [] { make_involution(sym({{0, 0.5}, {0.5, 0}})); });
}

TEST(MakeInvolution, PropertySpectrumAndProjectors) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = rng.integer(2, 14);
    const Involution j = make_involution(random_involution(rng, n));
    const Matrix& p = j.P().matrix();
    EXPECT_LE(max_abs(p * p - p), 1e-12 * n);
    EXPECT_LE(max_abs(p + j.P_perp().matrix() - Matrix::Identity(n, n)), 1e-15);
    EXPECT_EQ(j.plus_basis().dim() + j.minus_basis().dim(), n);
    const Vector eigs = oracle::eigenvalues(j.J().matrix());
    for (Index i = 0; i < n; ++i) EXPECT_NEAR(std::abs(eigs[i]), 1.0, 1e-12 * n);
    const Matrix q = j.block_basis();
    EXPECT_LE(max_abs(q.transpose() * q - Matrix::Identity(n, n)), 1e-12 * n);
  }
}

TEST(Commutes, Examples) {
  const CommutationCheck diagonal = commutes(make_involution(diag({1, -1})), diag({2, 0.5}));
  EXPECT_TRUE(diagonal.commutes);
  EXPECT_EQ(diagonal.residual, 0.0);

  // JA - AJ = [[0, -3/2], [3/2, 0]].
  const Matrix ja = mat({{0, 1}, {1, 0}}) * mat({{2, 0}, {0, 0.5}});
  const Matrix aj = mat({{2, 0}, {0, 0.5}}) * mat({{0, 1}, {1, 0}});
  EXPECT_NEAR(oracle::power_norm(ja - aj), 1.5, 1e-12);
  const CommutationCheck swap = commutes(make_involution(sym({{0, 1}, {1, 0}})), diag({2, 0.5}));
  EXPECT_FALSE(swap.commutes);
  EXPECT_NEAR(swap.residual, 1.5, 1e-14);

  oracle::Rng rng(12);
  const Involution any = make_involution(random_involution(rng, 6));
  EXPECT_TRUE(commutes(any, SymMatrix::identity(6)).commutes);

  expect_error(ErrorKind::input, "dimension mismatch",
               [&] { commutes(any, SymMatrix::identity(5)); });
}

TEST(BlockDecompose, SwapAgainstDiagonalInvolution) {
  const BlockDecomposition b =
      block_decompose(sym({{0, 1}, {1, 0}}), make_involution(diag({1, -1})));
  EXPECT_EQ(b.m_plus(0, 0), 0.0);
  EXPECT_EQ(b.m_minus(0, 0), 0.0);
  EXPECT_EQ(b.coupling(0, 0), 1.0);
}

TEST(BlockDecompose, DiagonalPairHasNoCoupling) {
  const BlockDecomposition b =
      block_decompose(diag({3, -1, 2, 5}), make_involution(diag({1, -1, -1, 1})));
  EXPECT_EQ(max_abs(b.coupling), 0.0);
  EXPECT_EQ(b.m_plus.dim(), 2);
  EXPECT_EQ(b.m_minus.dim(), 2);
}

TEST(BlockDecompose, RandomReassemblyN8) {
  oracle::Rng rng(13);
  const SymMatrix m(rng.symmetric(8));
  const Involution j = make_involution(random_involution(rng, 8));
  const BlockDecomposition b = block_decompose(m, j);
  // Oracle: rebuild from explicit basis products.
  const Matrix& qp = j.plus_basis().vectors;
  const Matrix& qm = j.minus_basis().vectors;
  const Matrix rebuilt = qp * b.m_plus.matrix() * qp.transpose() + qp * b.coupling * qm.transpose() +
                         qm * b.coupling.transpose() * qp.transpose() +
                         qm * b.m_minus.matrix() * qm.transpose();
  const double norm = oracle::power_norm(m.matrix());
  EXPECT_LE(oracle::power_norm(rebuilt - m.matrix()), 1e-12 * 8 * norm);
  EXPECT_LE(oracle::power_norm(reassemble(b, j).matrix() - m.matrix()), 1e-12 * 8 * norm);
}

TEST(BlockDecompose, PropertyRoundTripAndCommutingCoupling) {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = rng.integer(2, 16);
    const SymMatrix jm = random_involution(rng, n);
    const Involution j = make_involution(jm);
    const SymMatrix m(rng.symmetric(n));
    const double norm = std::max(1.0, op_norm(m));
    EXPECT_LE(max_abs(reassemble(block_decompose(m, j), j).matrix() - m.matrix()),
              1e-12 * n * norm);

    // A commuting with J: a polynomial in J plus a J-even random part.
    const Matrix p = j.P().matrix();
    const Matrix q = j.P_perp().matrix();
    const Matrix g = rng.symmetric(n);
    const SymMatrix a = SymMatrix::symmetrized(p * g * p + q * g * q);
    ASSERT_TRUE(commutes(j, a).commutes);
    EXPECT_LE(max_abs(block_decompose(a, j).coupling), 1e-12 * n * std::max(1.0, op_norm(a)));
  }
}

TEST(Enumerate, CountsAndMembers) {
  const DiagonalInvolutions two = enumerate_diagonal_involutions(2);
  std::vector<Vector> seen;
  for (const Involution& j : two) seen.push_back(j.J().matrix().diagonal());
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0], (Vector(2) << -1, 1).finished());
  EXPECT_EQ(seen[1], (Vector(2) << 1, -1).finished());

  EXPECT_EQ(enumerate_diagonal_involutions(3).size(), 6u);
  std::size_t count = 0;
  for (const Involution& j : enumerate_diagonal_involutions(3)) {
    (void)j;
    ++count;
  }
  EXPECT_EQ(count, 6u);
  EXPECT_EQ(enumerate_diagonal_involutions(1).size(), 0u);
  EXPECT_EQ(enumerate_diagonal_involutions(24).size(), (1u << 24) - 2u);
}

TEST(Enumerate, FourGivesFourteenDistinctInvolutions) {
  std::set<std::vector<double>> distinct;
  for (const Involution& j : enumerate_diagonal_involutions(4)) {
    const Matrix& m = j.J().matrix();
    EXPECT_LE(max_abs(m * m - Matrix::Identity(4, 4)), 0.0);
    EXPECT_LE(max_abs(m - Matrix(m.diagonal().asDiagonal())), 0.0);
    const Vector d = m.diagonal();
    distinct.insert(std::vector<double>(d.data(), d.data() + d.size()));
  }
  EXPECT_EQ(distinct.size(), 14u);
}

TEST(Enumerate, RefusesOutsideTheBound) {
  expect_error(ErrorKind::input, "n <= 24", [] { enumerate_diagonal_involutions(25); });
  expect_error(ErrorKind::input, "n <= 24", [] { enumerate_diagonal_involutions(0); });
}
