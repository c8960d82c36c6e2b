#pragma once

// Operator associated with b[x,y] = <A^{1/2}x, H A^{1/2}y> for A ⪰ 0 and a
// bounded, boundedly invertible H, under the gap hypothesis
//
//   P H P ⪰ α P,   P⊥ H P⊥ ⪯ -α P⊥,   P = (I + J)/2,  [J, A] = 0.
//
// The shifted operator B + J = (A+I)^{1/2} H̃ (A+I)^{1/2} has a spectral gap
// (-c, c) with c = ‖H̃⁻¹‖⁻¹, while B = A^{1/2} H A^{1/2} itself may be singular.

#include "indefrep/involution.hpp"
#include "indefrep/spectral.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace indefrep {

struct GapCertificate {
  bool satisfied = false;
  std::optional<double> alpha_star;  // min(1, λmin(H₊), -λmax(H₋)) if satisfied
  double lambda_min_plus = 0.0;
  double lambda_max_minus = 0.0;
  double uncapped_bound = 0.0;  // min(λmin(H₊), -λmax(H₋)), not capped at 1
  std::string refusal;          // which inequality failed, empty if satisfied
};

struct RepresentationResult {
  SymMatrix A;  // after PSD repair
  Involution J;
  SymMatrix B;
  SymMatrix B_tilde;  // B + J
  SymMatrix H0;       // B = (A+I)^{1/2} H0 (A+I)^{1/2}
  SymMatrix H_tilde;  // H0 + (A+I)⁻¹ J
  double c = 0.0;     // ‖H̃⁻¹‖⁻¹
  double scale = 1.0;
  double consistency_residual = 0.0;  // ‖(B̃ - J) - B‖
  double first_rep_residual = 0.0;
  double second_rep_residual = 0.0;
  double clamp_magnitude = 0.0;
  bool certified = false;
  GapCertificate certificate;
};

struct ProbePair {
  Vector x;
  Vector y;
};
using Probes = std::vector<ProbePair>;

/// 2n seeded Gaussian unit pairs, followed by every (e_i, e_j) when n ≤ 16.
Probes make_probes(Index n, std::uint64_t seed);

using SesquilinearForm = std::function<double(const Vector&, const Vector&)>;

/// max |form(x,y) - <x, B y>| / (‖x‖‖y‖·scale).
double form_residual(const SesquilinearForm& form, const SymMatrix& b,
                     const Probes& probes, double scale);

/// max |form(x,y) - <Rx, S R y>| / (‖x‖‖y‖·scale) with R = |B|^{1/2} and S
/// the supplied sign operator.
double represented_residual(const SesquilinearForm& form,
                            const SymMatrix& abs_sqrt_b,
                            const SymMatrix& sign_b, const Probes& probes,
                            double scale);

/// sign(B) with sign(0) := 0; eigenvalues with |λ| ≤ τ count as zero.
SymMatrix sign_zero(const SymMatrix& b, const KernelTolerance& tol = {});

/// (1 + ‖A‖)·‖H‖.
double general_scale(const SymMatrix& a, const SymMatrix& h);

struct HypothesisOptions {
  KernelTolerance tol;
  double commutation_tol = kDefaultCommutationTol;
};

/// Throws input errors for A not PSD, H singular, or J not commuting with A.
GapCertificate check_hypothesis1(const SymMatrix& a, const SymMatrix& h,
                                 const Involution& j,
                                 const HypothesisOptions& options = {});

struct HTilde {
  SymMatrix H0;
  SymMatrix H_tilde;
};

/// A must already be PSD (see clamp_psd).
HTilde build_H_tilde(const SymMatrix& a, const SymMatrix& h, const Involution& j);

struct GeneralOptions {
  bool force = false;  // build B even when the gap hypothesis is refused
  std::uint64_t seed = 0;
  HypothesisOptions hypothesis;
};

/// Throws a hypothesis error when the certificate is refused and !force.
RepresentationResult associate_general(const SymMatrix& a, const SymMatrix& h,
                                       const Involution& j,
                                       const GeneralOptions& options = {});

/// min_abs_eig(B + J) - c; nonnegative up to rounding.
double gap_certificate_check(const RepresentationResult& result,
                             const Involution& j);
double gap_certificate_check(const RepresentationResult& result);

/// Normalized defect of b[x,y] = <A^{1/2}x, H A^{1/2}y> against <x, By>.
double first_rep_residual(const SymMatrix& a, const SymMatrix& h,
                          const SymMatrix& b, const Probes& probes);

/// Normalized defect of b[x,y] against <|B|^{1/2}x, sign(B)|B|^{1/2}y>.
double second_rep_residual(const SymMatrix& a, const SymMatrix& h,
                           const SymMatrix& b, const Probes& probes);

}  // namespace indefrep
