#pragma once

// Off-diagonal case: on H = H₊ ⊕ H₋ with J = diag(I, -I),
//
//   b[x,y] = <A^{1/2}x, J A^{1/2}y> + <S(A+I)^{1/2}x, (A+I)^{1/2}y>,
//   S = [[0, T], [Tᵀ, 0]],  A = A₊ ⊕ A₋ ⪰ 0.
//
// Then H̃ = J + S and B = (A+I)^{1/2} Ĥ (A+I)^{1/2} with
// Ĥ = [[I - (A₊+I)⁻¹, T], [Tᵀ, -I + (A₋+I)⁻¹]], and
// Ker(B) = (Ker A₊ ∩ L₊) ⊕ (Ker A₋ ∩ L₋),
// L₊ = (A₊+I)^{-1/2} Ker(Tᵀ),  L₋ = (A₋+I)^{-1/2} Ker(T).

#include "indefrep/involution.hpp"
#include "indefrep/rep_general.hpp"
#include "indefrep/spectral.hpp"

#include <cstdint>

namespace indefrep {

class OffDiagonalProblem {
 public:
  /// Repairs A₊ and A₋ to PSD (input error if impossible) and computes β = ‖S‖.
  OffDiagonalProblem(const SymMatrix& a_plus, const SymMatrix& a_minus,
                     Matrix t, const KernelTolerance& tol = {});

  const SymMatrix& A_plus() const noexcept { return a_plus_; }
  const SymMatrix& A_minus() const noexcept { return a_minus_; }
  const Matrix& T() const noexcept { return t_; }
  double beta() const noexcept { return beta_; }
  double clamp_magnitude() const noexcept { return clamp_; }

  Index plus_dim() const noexcept { return a_plus_.dim(); }
  Index minus_dim() const noexcept { return a_minus_.dim(); }
  Index dim() const noexcept { return plus_dim() + minus_dim(); }

  /// A₊ ⊕ A₋.
  SymMatrix A() const;
  /// diag(I₊, -I₋).
  Involution J() const;
  /// [[0, T], [Tᵀ, 0]].
  SymMatrix S() const;
  /// (1 + ‖A‖)(1 + β).
  double scale() const;

 private:
  SymMatrix a_plus_;
  SymMatrix a_minus_;
  Matrix t_;
  double beta_ = 0.0;
  double clamp_ = 0.0;
};

struct OffDiagonalCheck {
  bool off_diagonal = false;
  double residual = 0.0;                 // max(‖PSP‖, ‖P⊥SP⊥‖)
  double anticommutator_residual = 0.0;  // ‖JS + SJ‖
};

/// True iff the diagonal blocks of S vanish to tol·‖S‖.
OffDiagonalCheck check_offdiagonal(const SymMatrix& s, const Involution& j,
                                   double tol = 1e-10);

/// b[x,y] for the problem's diagonal part plus the S-coupling.
SesquilinearForm offdiag_form(const OffDiagonalProblem& p);

/// max over probes of |v[x]| / (β‖(A+I)^{1/2}x‖²); at most 1 since β = ‖S‖.
double form_bound_ratio(const OffDiagonalProblem& p, std::uint64_t seed = 0);

/// H̃ = J + S, B = (A+I)^{1/2} H̃ (A+I)^{1/2} - J, c = ‖H̃⁻¹‖⁻¹. H0 holds Ĥ,
/// so B = (A+I)^{1/2} H0 (A+I)^{1/2} as in the general case.
RepresentationResult assemble_offdiag(const OffDiagonalProblem& p,
                                      std::uint64_t seed = 0);

/// Ĥ; throws an internal error if ‖B - (A+I)^{1/2}Ĥ(A+I)^{1/2}‖ > 1e-10·scale.
SymMatrix hat_H(const OffDiagonalProblem& p);

/// ‖B - (A+I)^{1/2}Ĥ(A+I)^{1/2}‖ with B assembled through H̃ - J.
double hat_H_identity_residual(const OffDiagonalProblem& p);

struct KernelReport {
  SubspaceBasis ker_A_plus;
  SubspaceBasis ker_A_minus;
  SubspaceBasis ker_T_adjoint;  // in H₊
  SubspaceBasis ker_T;          // in H₋
  SubspaceBasis L_plus;
  SubspaceBasis L_minus;
  SubspaceBasis plus_part;   // Ker A₊ ∩ L₊
  SubspaceBasis minus_part;  // Ker A₋ ∩ L₋
  SubspaceBasis theorem_kernel;
  SubspaceBasis oracle_kernel;  // nullspace(B)
  double principal_angle = 0.0;
  bool dims_match = false;
  /// max |v[x₊ ⊕ 0, 0 ⊕ y₋]| over L₊ basis × H₋ probes and H₊ probes × L₋ basis.
  double definitional_residual = 0.0;
};

struct KernelOptions {
  KernelTolerance tol;
  std::uint64_t seed = 0;
};

/// Ker A±, Ker T, Ker T* and nullspace(B) all use the absolute threshold
/// n·eps·(1 + ‖A‖)·‖H̃‖ (scaled by tol.scale), the rounding level of B.
KernelReport kernel_via_theorem(const OffDiagonalProblem& p,
                                const KernelOptions& options = {});

}  // namespace indefrep
