#pragma once

// Dense self-adjoint spectral machinery: eigendecomposition, functional
// calculus by spectral mapping, thresholded nullspaces and subspace geometry.

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>

namespace indefrep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Real symmetric dense matrix. Immutable once constructed.
class SymMatrix {
 public:
  /// Rejects non-finite entries and asymmetry above 100·eps·‖M‖_F, then
  /// replaces M by (M + Mᵀ)/2.
  explicit SymMatrix(Matrix m);

  /// For matrices that are symmetric in exact arithmetic but were produced
  /// by floating-point products. Only finiteness is checked.
  static SymMatrix symmetrized(Matrix m);

  static SymMatrix identity(Index n);
  static SymMatrix zero(Index n);
  static SymMatrix diagonal(const Vector& d);

  const Matrix& matrix() const noexcept { return data_; }
  Index dim() const noexcept { return data_.rows(); }
  double operator()(Index i, Index j) const { return data_(i, j); }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator*(double s, const SymMatrix& a);

 private:
  struct Trusted {};
  SymMatrix(Matrix m, Trusted) : data_(std::move(m)) {}

  Matrix data_;
};

/// Largest |M(i,j) - M(j,i)|.
double max_asymmetry(const Matrix& m);

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, first significant entry > 0
  double source_norm = 0.0;

  Index dim() const noexcept { return eigenvalues.size(); }
};

/// Orthonormal basis of a subspace of R^n; zero columns encode {0}.
struct SubspaceBasis {
  Matrix vectors;

  Index dim() const noexcept { return vectors.cols(); }
  Index ambient_dim() const noexcept { return vectors.rows(); }
  Matrix projector() const { return vectors * vectors.transpose(); }

  static SubspaceBasis trivial(Index n) { return {Matrix(n, 0)}; }
};

/// Threshold below which an eigenvalue counts as zero. The default is
/// τ = scale·n·eps·norm; `absolute` overrides the formula entirely.
struct KernelTolerance {
  std::optional<double> absolute;
  double scale = 1.0;

  double threshold(Index n, double norm) const {
    if (absolute) return *absolute;
    return scale * static_cast<double>(n) * kEps * norm;
  }
};

SpectralDecomposition eig_sym(const SymMatrix& m);

/// Sets eigenvalues with |λ| ≤ τ to exactly zero, so that f(0) is exact for
/// functions such as the square root that amplify rounding near zero.
SpectralDecomposition snap_kernel(SpectralDecomposition d, const KernelTolerance& tol = {});

/// V·diag(f(λ))·Vᵀ. Throws a domain error naming the first eigenvalue at
/// which f is not finite.
SymMatrix apply_fn(const SpectralDecomposition& d,
                   const std::function<double(double)>& f);
SymMatrix apply_fn(const SymMatrix& m, const std::function<double(double)>& f);

/// Reassembles V·diag(λ)·Vᵀ.
SymMatrix reconstruct(const SpectralDecomposition& d);

SubspaceBasis nullspace(const SpectralDecomposition& d,
                        const KernelTolerance& tol = {});
SubspaceBasis nullspace(const SymMatrix& m, const KernelTolerance& tol = {});

double op_norm(const SymMatrix& m);
double min_abs_eig(const SymMatrix& m);
double min_abs_eig(const SpectralDecomposition& d);

/// Largest singular value of an arbitrary (possibly rectangular) matrix.
double spectral_norm(const Matrix& m);

/// PSD repair: eigenvalues in [-τ, 0) are raised to 0.
struct PsdRepair {
  SymMatrix matrix;
  double clamp_magnitude = 0.0;  // largest |λ| that was raised
};

/// Throws an input error if the smallest eigenvalue lies below -τ.
PsdRepair clamp_psd(const SymMatrix& m, const KernelTolerance& tol = {});

/// max over both orderings of the factors of
/// ‖R(T1) - R(T2) - R(Ti)(T1 - T2)R(Tj)‖ with R(T) = (λI - T)⁻¹.
/// Throws an input error when λ is within n·eps·(‖T‖ + |λ|) of an eigenvalue.
double resolvent_identity_residual(const SymMatrix& t1, const SymMatrix& t2,
                                   double lambda);

/// Orthonormal basis of span(columns) by rank-revealing QR.
SubspaceBasis orthonormalize(const Matrix& columns,
                             const KernelTolerance& tol = {});

/// U ∩ W as the nullspace of (I - Π_U) + (I - Π_W).
SubspaceBasis intersect(const SubspaceBasis& u, const SubspaceBasis& w,
                        const KernelTolerance& tol = {});

/// Largest principal angle between two subspaces of equal dimension, or π/2
/// when the dimensions differ. Two trivial subspaces have angle 0.
double largest_principal_angle(const SubspaceBasis& u, const SubspaceBasis& w);

}  // namespace indefrep
