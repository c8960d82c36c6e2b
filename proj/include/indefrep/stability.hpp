#pragma once

// Domain-stability audit for the operator B associated with an indefinite
// form. In finite dimension every boundedness statement holds trivially, so
// the suite reports norms and residuals; failure in the infinite-dimensional
// limit shows up as norm growth along a truncation family.

#include "indefrep/involution.hpp"
#include "indefrep/rep_general.hpp"
#include "indefrep/spectral.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace indefrep {

/// Value assigned to the sign of zero by the unitary sign function.
class SgnChoice {
 public:
  /// Throws an input error unless s is -1 or +1.
  explicit SgnChoice(int s);
  static SgnChoice plus() { return SgnChoice(1); }
  static SgnChoice minus() { return SgnChoice(-1); }
  int value() const noexcept { return s_; }

 private:
  int s_;
};

/// sgn(B): -1 / s / +1 on negative / zero / positive spectrum, where |λ| ≤ τ
/// counts as zero. The result is a unitary involution.
SymMatrix sgn_matrix(const SymMatrix& b, SgnChoice choice,
                     const KernelTolerance& tol = {});

/// Keys of StabilityReport::conditions, in order.
inline const std::vector<std::string> kEquivalenceConditions = {
    "i", "ii", "ii'", "iii", "iii'", "iv", "v"};

struct StabilityReport {
  double norm_X = 0.0;        // ‖(A+I)^{-1/2}|B+sgnB|(A+I)^{-1/2}‖
  double norm_Y = 0.0;        // ‖(A+I)^{1/2}|B+sgnB|⁻¹(A+I)^{1/2}‖
  double norm_K = 0.0;        // ‖(A+I)^{1/2} sgnB (A+I)^{-1/2}‖
  double norm_X_tilde = 0.0;  // ‖(A+I)^{1/2}(B+sgnB)⁻¹(A+I)^{1/2}‖
  double norm_Y_tilde = 0.0;  // ‖(A+I)^{-1/2}(B+sgnB)(A+I)^{-1/2}‖
  double K_involution_residual = 0.0;  // ‖K² - I‖
  double XY_inverse_residual = 0.0;    // max(‖X̃Ỹ - I‖, ‖ỸX̃ - I‖)
  double sgn_invariance_residual = 0.0;  // max_f ‖sgn(B)f(B) - sign(B)f(B)‖
  double K_factor_residual = 0.0;        // max(‖K - X̃X‖, ‖K - YỸ‖)
  double min_abs_eig_shifted = 0.0;      // min |σ(B + sgn B)|
  std::map<std::string, bool> conditions;

  bool conditions_agree() const;
};

struct StabilityOptions {
  KernelTolerance tol;
  double residual_tol = 1e-10;
};

/// A must be PSD. Throws an internal error if min |σ(B + sgn B)| < 1 - tol.
StabilityReport stability_suite(const SymMatrix& a, const SymMatrix& b,
                                SgnChoice choice,
                                const StabilityOptions& options = {});

/// Criterion (b): for H ≻ 0 checks sgn(B) = I with s = +1, for H ≺ 0 checks
/// sgn(B) = -I with s = -1, and returns true. Returns false when H is
/// indefinite. Throws an internal error if the expected identity fails.
bool sufficient_b_definite(const SymMatrix& a, const SymMatrix& h,
                           const SymMatrix& b, double tol = 1e-10);

struct SemiboundedSearch {
  bool found = false;
  double c = 0.0;  // qualifying c, or the last one tried
  int steps = 0;   // number of c values tried
};

inline constexpr int kMaxDoublings = 60;

/// Criterion (c): doubling search from ‖B‖ + 1 for c with
/// λmin(H̃ + c(A+I)⁻¹) > τ and dist(-1/c, σ((B+J)⁻¹)) > τ.
SemiboundedSearch sufficient_c_semibounded(const SymMatrix& a,
                                           const SymMatrix& h_tilde,
                                           const SymMatrix& b,
                                           const Involution& j,
                                           const KernelTolerance& tol = {});

/// Hausdorff distance between the nonzero eigenvalues of T1·T2 and T2·T1
/// (|λ| ≤ τ counts as zero, τ from the kernel policy against ‖T1‖‖T2‖).
/// The larger product contributes its min(p, q) largest eigenvalues; the
/// modulus of any remaining one above τ is added as a defect.
double spectral_identity_residual(const Matrix& t1, const Matrix& t2,
                                  const KernelTolerance& tol = {});

struct FamilyInstance {
  SymMatrix A;
  SymMatrix H;
};

using FamilyGenerator = std::function<FamilyInstance(int)>;

/// A_N = ⊕_{k=1..N} diag(k+1, 1/(k+1)), H_N = ⊕ [[0,1],[1,0]]. Requires 1 ≤ N ≤ 64.
FamilyInstance counterexample_instance(int n);

/// A_N = I (2N×2N), H_N = diag(1, -1, 1, -1, …).
FamilyInstance identity_instance(int n);

/// diag(1, -1, 1, -1, …) of size dim.
Involution alternating_involution(Index dim);

struct FamilyDiagnostics {
  std::vector<int> truncation_sizes;
  std::vector<double> norm_X;
  std::vector<double> norm_Y;
  std::vector<double> norm_K;
  std::vector<double> norm_B;
  std::vector<double> cond_A;
  std::vector<double> criterion_a_proxy;  // ‖(A+I)^{1/2} H (A+I)^{-1/2}‖
  std::vector<std::optional<bool>> gap_search_outcomes;
  std::vector<std::uint64_t> involutions_tried;
};

struct FamilyOptions {
  bool exhaustive = true;  // sweep every diagonal involution; needs N ≤ 6
  std::uint64_t seed = 0;
};

inline constexpr int kMaxExhaustiveFamilySize = 6;

FamilyDiagnostics family_diagnostics(const FamilyGenerator& generator,
                                     const std::vector<int>& sizes,
                                     const FamilyOptions& options = {});

/// True when some diag(±1) involution certifies the gap hypothesis for (A, H).
/// `tried` receives the number of involutions examined.
bool diagonal_gap_search(const SymMatrix& a, const SymMatrix& h,
                         std::uint64_t* tried = nullptr,
                         std::optional<Involution>* found = nullptr);

}  // namespace indefrep
