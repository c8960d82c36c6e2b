#include "indefrep/rep_general.hpp"

#include "common.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace indefrep;
using testing_support::diag;
using testing_support::expect_error;
using testing_support::mat;
using testing_support::max_abs;
using testing_support::sym;

namespace {

// b[x,y] = <A^{1/2}x, H A^{1/2}y> through the Jacobi square root.
double oracle_form(const Matrix& a, const Matrix& h, const Vector& x, const Vector& y) {
  const Matrix r = oracle::sqrt_psd(a);
  return (r * x).dot(h * (r * y));
}

}  // namespace

TEST(CheckHypothesis, SatisfiedAndCapped) {
  const GapCertificate c = check_hypothesis1(diag({1, 2}), sym({{2, 0.5}, {0.5, -3}}),
                                             make_involution(diag({1, -1})));
  ASSERT_TRUE(c.satisfied);
  EXPECT_DOUBLE_EQ(c.lambda_min_plus, 2.0);
  EXPECT_DOUBLE_EQ(c.lambda_max_minus, -3.0);
  EXPECT_DOUBLE_EQ(c.uncapped_bound, 2.0);
  EXPECT_DOUBLE_EQ(*c.alpha_star, 1.0);
  EXPECT_TRUE(c.refusal.empty());
}

TEST(CheckHypothesis, SwapFailsForBothDiagonalInvolutions) {
  const SymMatrix a = diag({2, 0.5});
  const SymMatrix h = sym({{0, 1}, {1, 0}});
  for (const Involution& j : enumerate_diagonal_involutions(2)) {
    const GapCertificate c = check_hypothesis1(a, h, j);
    EXPECT_FALSE(c.satisfied);
    EXPECT_FALSE(c.alpha_star.has_value());
    EXPECT_EQ(c.lambda_min_plus, 0.0);
    EXPECT_EQ(c.lambda_max_minus, 0.0);
    EXPECT_NE(c.refusal.find("H+"), std::string::npos);
    EXPECT_NE(c.refusal.find("H-"), std::string::npos);
  }
}

TEST(CheckHypothesis, RefusalNamesTheFailingInequality) {
  const GapCertificate c = check_hypothesis1(diag({1, 1}), diag({2, 0.5}),
                                             make_involution(diag({1, -1})));
  EXPECT_FALSE(c.satisfied);
  EXPECT_EQ(c.refusal.find("H+"), std::string::npos);
  EXPECT_NE(c.refusal.find("P' H P' <= -alpha P'"), std::string::npos);
}

TEST(CheckHypothesis, HEqualJGivesAlphaOne) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::GapInstance g = oracle::gap_instance(rng, rng.integer(2, 10), 0.5);
    const GapCertificate c = check_hypothesis1(SymMatrix(g.A), SymMatrix(g.J), make_involution(SymMatrix(g.J)));
    ASSERT_TRUE(c.satisfied);
    EXPECT_NEAR(*c.alpha_star, 1.0, 1e-12);
    EXPECT_NEAR(c.lambda_min_plus, 1.0, 1e-12);
    EXPECT_NEAR(c.lambda_max_minus, -1.0, 1e-12);
  }
}

TEST(CheckHypothesis, DistinctDiagnostics) {
  const Involution j = make_involution(diag({1, -1}));
  expect_error(ErrorKind::input, "not positive semidefinite",
               [&] { check_hypothesis1(diag({-1, 1}), diag({1, -1}), j); });
  expect_error(ErrorKind::input, "H singular",
               [&] { check_hypothesis1(diag({1, 1}), diag({1, 0}), j); });
  expect_error(ErrorKind::input, "H singular",
               [&] { check_hypothesis1(diag({1, 1}), SymMatrix::zero(2), j); });
  expect_error(ErrorKind::input, "does not commute",
               [&] { check_hypothesis1(sym({{1, 1}, {1, 2}}), diag({1, -1}), j); });
  expect_error(ErrorKind::input, "share a dimension",
               [&] { check_hypothesis1(diag({1, 1, 1}), diag({1, -1}), j); });
}

TEST(CheckHypothesis, PropertyAlphaMatchesBlockOracle) {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const double alpha = rng.uniform(0.05, 2.0);
    const oracle::GapInstance g = oracle::gap_instance(rng, rng.integer(2, 14), alpha);
    const GapCertificate c =
        check_hypothesis1(SymMatrix(g.A), SymMatrix(g.H), make_involution(SymMatrix(g.J)));
    ASSERT_TRUE(c.satisfied);
    EXPECT_NEAR(c.uncapped_bound, g.alpha, 1e-10 * (1 + g.alpha));
    EXPECT_NEAR(*c.alpha_star, std::min(1.0, g.alpha), 1e-10);
    EXPECT_GE(c.uncapped_bound, alpha * (1 - 1e-10));
  }
}

TEST(BuildHTilde, ZeroA) {
  const Involution j = make_involution(diag({1, -1, 1}));
  const HTilde t = build_H_tilde(SymMatrix::zero(3), sym({{1, 2, 0}, {2, -1, 3}, {0, 3, 5}}), j);
  EXPECT_EQ(max_abs(t.H0.matrix()), 0.0);
  EXPECT_EQ(max_abs(t.H_tilde.matrix() - j.J().matrix()), 0.0);
}

TEST(BuildHTilde, IdentityAHalvesEverything) {
  oracle::Rng rng(23);
  const SymMatrix h(rng.symmetric(5));
  const Involution j = make_involution(diag({1, 1, -1, -1, 1}));
  const HTilde t = build_H_tilde(SymMatrix::identity(5), h, j);
  EXPECT_LE(max_abs(t.H0.matrix() - 0.5 * h.matrix()), 1e-15);
  EXPECT_LE(max_abs(t.H_tilde.matrix() - 0.5 * (h.matrix() + j.J().matrix())), 1e-15);
}

TEST(BuildHTilde, PropertyBlockBoundsSurviveTheShift) {
  oracle::Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(2, 16);
    const oracle::GapInstance g =
        oracle::gap_instance(rng, n, rng.uniform(0.05, 1.5), rng.integer(0, 2));
    const Involution j = make_involution(SymMatrix(g.J));
    const GapCertificate c = check_hypothesis1(SymMatrix(g.A), SymMatrix(g.H), j);
    ASSERT_TRUE(c.satisfied);
    const HTilde t = build_H_tilde(clamp_psd(SymMatrix(g.A)).matrix, SymMatrix(g.H), j);
    const Matrix& qp = j.plus_basis().vectors;
    const Matrix& qm = j.minus_basis().vectors;
    const Matrix& ht = t.H_tilde.matrix();
    const double tol = 1e-10 * n;
    EXPECT_GE(oracle::eigenvalues(qp.transpose() * ht * qp).minCoeff(), *c.alpha_star - tol);
    EXPECT_LE(oracle::eigenvalues(qm.transpose() * ht * qm).maxCoeff(), -*c.alpha_star + tol);
    EXPECT_LE(max_abs(ht - ht.transpose()), 0.0);
  }
}

TEST(AssociateGeneral, ForcedCounterexampleBlockReproducesH) {
  const SymMatrix a = diag({2, 0.5});
  const SymMatrix h = sym({{0, 1}, {1, 0}});
  const Involution j = make_involution(diag({1, -1}));
  expect_error(ErrorKind::hypothesis, "refused", [&] { associate_general(a, h, j); });

  GeneralOptions forced;
  forced.force = true;
  const RepresentationResult r = associate_general(a, h, j, forced);
  EXPECT_FALSE(r.certified);
  EXPECT_LE(max_abs(r.B.matrix() - h.matrix()), 1e-15);
  EXPECT_EQ(max_abs(r.B_tilde.matrix() - r.B.matrix() - j.J().matrix()), 0.0);
}

TEST(AssociateGeneral, IdentityAGivesBEqualH) {
  oracle::Rng rng(25);
  const oracle::GapInstance g = oracle::gap_instance(rng, 6, 0.5);
  const Involution j = make_involution(SymMatrix(g.J));
  const RepresentationResult r = associate_general(SymMatrix::identity(6), SymMatrix(g.H), j);
  EXPECT_LE(max_abs(r.B.matrix() - g.H), 1e-14);
}

TEST(AssociateGeneral, CommutingHEqualJGivesJA) {
  oracle::Rng rng(26);
  const oracle::GapInstance g = oracle::gap_instance(rng, 12, 0.5, 2);
  const RepresentationResult r =
      associate_general(SymMatrix(g.A), SymMatrix(g.J), make_involution(SymMatrix(g.J)));
  const Matrix ja = g.J * g.A;
  EXPECT_LE(oracle::power_norm(r.B.matrix() - ja), 1e-12 * 12 * oracle::power_norm(g.A));
  EXPECT_TRUE(r.certified);
}

TEST(AssociateGeneral, PropertyConsistencyAndExactShift) {
  oracle::Rng rng(27);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(2, 20);
    const oracle::GapInstance g = oracle::gap_instance(rng, n, 0.5, rng.integer(0, 2));
    const RepresentationResult r =
        associate_general(SymMatrix(g.A), SymMatrix(g.H), make_involution(SymMatrix(g.J)));
    const double scale = (1 + oracle::power_norm(g.A)) * oracle::power_norm(g.H);
    EXPECT_LE(r.consistency_residual, 1e-10 * scale);
    EXPECT_LE(max_abs(r.B_tilde.matrix() - r.B.matrix() - r.J.J().matrix()),
              4 * kEps * (1 + max_abs(r.B.matrix())));
    EXPECT_GT(r.c, 0.0);
    EXPECT_NEAR(r.c, oracle::min_abs_eig(r.H_tilde.matrix()), 1e-12 * n);
    // c as the inverse norm of H̃⁻¹.
    EXPECT_NEAR(r.c, 1.0 / oracle::power_norm(r.H_tilde.matrix().inverse()), 1e-10);
  }
}

TEST(GapCertificate, ZeroAWithHEqualJHasZeroMargin) {
  const Involution j = make_involution(diag({1, -1, -1}));
  const RepresentationResult r = associate_general(SymMatrix::zero(3), j.J(), j);
  EXPECT_EQ(max_abs(r.B.matrix()), 0.0);
  EXPECT_DOUBLE_EQ(r.c, 1.0);
  EXPECT_DOUBLE_EQ(gap_certificate_check(r, j), 0.0);
}

TEST(GapCertificate, PropertyMarginNonnegativeAndRadiusAboveAlpha) {
  oracle::Rng rng(28);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 32);
    const oracle::GapInstance g =
        oracle::gap_instance(rng, n, rng.uniform(0.05, 1.0), rng.integer(0, 2), rng.uniform(0, 3));
    const Involution j = make_involution(SymMatrix(g.J));
    const RepresentationResult r = associate_general(SymMatrix(g.A), SymMatrix(g.H), j);
    // (-c, c) lies in the resolvent set of B + J.
    const double shifted = oracle::min_abs_eig(r.B.matrix() + g.J);
    EXPECT_GE(shifted - r.c, -1e-8);
    EXPECT_NEAR(gap_certificate_check(r, j), shifted - r.c, 1e-9);
    // The block bounds keep σ(H̃) outside (-α*, α*).
    EXPECT_GE(r.c, *r.certificate.alpha_star - 1e-10);
  }
}

TEST(Probes, CountUnitNormAndDeterminism) {
  const Probes small = make_probes(4, 3);
  EXPECT_EQ(small.size(), 8u + 16u);
  for (const auto& [x, y] : small) {
    EXPECT_NEAR(x.norm(), 1.0, 1e-15);
    EXPECT_NEAR(y.norm(), 1.0, 1e-15);
  }
  EXPECT_EQ(make_probes(17, 0).size(), 34u);
  const Probes again = make_probes(4, 3);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i].x, again[i].x);
  EXPECT_NE(make_probes(4, 4)[0].x, small[0].x);
}

TEST(FirstRep, ConstructedBMatchesIndependentForm) {
  oracle::Rng rng(29);
  const Index n = 9;
  const oracle::GapInstance g = oracle::gap_instance(rng, n, 0.5, 1);
  const RepresentationResult r =
      associate_general(SymMatrix(g.A), SymMatrix(g.H), make_involution(SymMatrix(g.J)));
  EXPECT_LE(r.first_rep_residual, 1e-10);
  const double scale = (1 + oracle::power_norm(g.A)) * oracle::power_norm(g.H);
  for (int k = 0; k < 20; ++k) {
    const Vector x = rng.gaussian(n, 1);
    const Vector y = rng.gaussian(n, 1);
    const double defect =
        std::abs((g.sqrt_A * x).dot(g.H * (g.sqrt_A * y)) - x.dot(r.B.matrix() * y));
    EXPECT_LE(defect / (x.norm() * y.norm() * scale), 1e-10);
  }
}

TEST(FirstRep, DetectsPerturbedB) {
  oracle::Rng rng(30);
  const oracle::GapInstance g = oracle::gap_instance(rng, 6, 0.5);
  const SymMatrix a(g.A), h(g.H);
  const RepresentationResult r = associate_general(a, h, make_involution(SymMatrix(g.J)));
  const SymMatrix broken = r.B + 0.1 * SymMatrix::identity(6);
  const double scale = general_scale(r.A, h);
  EXPECT_GE(first_rep_residual(r.A, h, broken, make_probes(6, 0)), 0.1 / scale - 1e-10);
}

TEST(FirstRep, KernelEigenvectorPairsVanish) {
  const SymMatrix a = diag({0, 3});
  const SymMatrix h = sym({{1, 2}, {2, -1}});
  GeneralOptions forced;
  forced.force = true;
  const RepresentationResult r = associate_general(a, h, make_involution(diag({1, -1})), forced);
  const Vector e0 = Vector::Unit(2, 0);
  EXPECT_EQ(oracle_form(a.matrix(), h.matrix(), e0, e0), 0.0);
  EXPECT_EQ(e0.dot(r.B.matrix() * e0), 0.0);
  EXPECT_EQ(first_rep_residual(a, h, r.B, {{e0, e0}}), 0.0);
}

TEST(SecondRep, SignZeroOnDiagonal) {
  const SymMatrix s = sign_zero(diag({3, -2, 0}));
  EXPECT_EQ(max_abs(s.matrix() - diag({1, -1, 0}).matrix()), 0.0);
}

TEST(SecondRep, DiagonalBWithAEqualAbsB) {
  // A = |B|, H = diag(1, -1, 1) reproduces b[x,y] = <x, By> for B = diag(2, -3, 0).
  const SymMatrix b = diag({2, -3, 0});
  const SymMatrix a = diag({2, 3, 0});
  const SymMatrix h = diag({1, -1, 1});
  EXPECT_LE(second_rep_residual(a, h, b, make_probes(3, 1)), 1e-15);
  EXPECT_LE(first_rep_residual(a, h, b, make_probes(3, 1)), 1e-15);
}

TEST(SecondRep, WrongSignIsDetected) {
  const SymMatrix b = diag({2, -3, 0});
  const SymMatrix a = diag({2, 3, 0});
  const SymMatrix h = diag({1, -1, 1});
  const SymMatrix abs_sqrt = diag({std::sqrt(2.0), std::sqrt(3.0), 0});
  const double scale = general_scale(a, h);
  const SesquilinearForm form = [&](const Vector& x, const Vector& y) {
    return x.dot(b.matrix() * y);
  };
  const double wrong =
      represented_residual(form, abs_sqrt, SymMatrix::identity(3), make_probes(3, 0), scale);
  // At e₂: b = -3 but the +I variant gives +3.
  EXPECT_GE(wrong, 2 * 3.0 / scale - 1e-12);
  EXPECT_LE(represented_residual(form, abs_sqrt, sign_zero(b), make_probes(3, 0), scale), 1e-15);
}

TEST(SecondRep, PropertyConstructedInstances) {
  oracle::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const oracle::GapInstance g =
        oracle::gap_instance(rng, rng.integer(2, 20), 0.3, rng.integer(0, 3));
    GeneralOptions options;
    options.seed = static_cast<std::uint64_t>(trial);
    const RepresentationResult r = associate_general(
        SymMatrix(g.A), SymMatrix(g.H), make_involution(SymMatrix(g.J)), options);
    EXPECT_LE(r.first_rep_residual, 1e-10);
    EXPECT_LE(r.second_rep_residual, 1e-10);
  }
}
