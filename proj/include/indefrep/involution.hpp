#pragma once

// Self-adjoint involutions J (J = Jᵀ, J² = I, J ≠ ±I), their spectral
// projectors, and block decompositions with respect to ran(P) ⊕ ran(I - P).

#include "indefrep/spectral.hpp"

#include <cstdint>
#include <iterator>

namespace indefrep {

class Involution {
 public:
  const SymMatrix& J() const noexcept { return j_; }
  const SymMatrix& P() const noexcept { return p_; }
  const SymMatrix& P_perp() const noexcept { return p_perp_; }
  /// Orthonormal eigenbasis of the +1 eigenspace, spectral-core sign rule.
  const SubspaceBasis& plus_basis() const noexcept { return plus_; }
  const SubspaceBasis& minus_basis() const noexcept { return minus_; }
  Index dim() const noexcept { return j_.dim(); }

  /// [plus_basis | minus_basis], an orthogonal matrix.
  Matrix block_basis() const;

 private:
  friend Involution make_involution(const SymMatrix& j);
  Involution(SymMatrix j, SymMatrix p, SymMatrix p_perp, SubspaceBasis plus,
             SubspaceBasis minus)
      : j_(std::move(j)),
        p_(std::move(p)),
        p_perp_(std::move(p_perp)),
        plus_(std::move(plus)),
        minus_(std::move(minus)) {}

  SymMatrix j_;
  SymMatrix p_;
  SymMatrix p_perp_;
  SubspaceBasis plus_;
  SubspaceBasis minus_;
};

/// Throws "not an involution" when ‖J² - I‖ > 1e-12·n and "trivial
/// involution" when J = ±I.
Involution make_involution(const SymMatrix& j);

/// J = diag(±1) from a sign vector.
Involution make_diagonal_involution(const Vector& signs);

struct CommutationCheck {
  bool commutes = false;
  double residual = 0.0;  // ‖JA - AJ‖
};

inline constexpr double kDefaultCommutationTol = 1e-10;

/// True iff ‖JA - AJ‖ ≤ tol·‖A‖.
CommutationCheck commutes(const Involution& j, const SymMatrix& a,
                          double tol = kDefaultCommutationTol);

/// M expressed in the (plus_basis, minus_basis) coordinates.
struct BlockDecomposition {
  SymMatrix m_plus;   // Q₊ᵀ M Q₊
  SymMatrix m_minus;  // Q₋ᵀ M Q₋
  Matrix coupling;    // T = Q₊ᵀ M Q₋
};

BlockDecomposition block_decompose(const SymMatrix& m, const Involution& j);

/// Inverse of block_decompose.
SymMatrix reassemble(const BlockDecomposition& blocks, const Involution& j);

inline constexpr int kMaxEnumerationDim = 24;

/// All diag(±1, …, ±1) other than ±I, in increasing bitmask order
/// (bit i set means entry i is -1). Count is 2ⁿ - 2.
class DiagonalInvolutions {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Involution;
    using difference_type = std::ptrdiff_t;

    iterator(int n, std::uint32_t mask) : n_(n), mask_(mask) {}
    Involution operator*() const;
    iterator& operator++() {
      ++mask_;
      return *this;
    }
    bool operator==(const iterator& other) const { return mask_ == other.mask_; }

   private:
    int n_;
    std::uint32_t mask_;
  };

  explicit DiagonalInvolutions(int n);

  iterator begin() const { return {n_, 1u}; }
  iterator end() const { return {n_, last_}; }
  std::uint64_t size() const { return last_ > 1u ? last_ - 1u : 0u; }

 private:
  int n_;
  std::uint32_t last_;
};

/// Throws an input error naming the bound when n > 24.
DiagonalInvolutions enumerate_diagonal_involutions(int n);

}  // namespace indefrep
