#pragma once

// Problem specifications: JSON ingestion, serialization and instance
// generators. Matrices are stored as row-major nested arrays of decimal
// strings with 17 significant digits, which round-trips doubles exactly.

#include "indefrep/spectral.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace indefrep {

enum class ProblemKind { general, offdiag, family };

/// What the gap hypothesis is expected to do for a general problem.
enum class Expectation { certified, gap_failure };

struct FamilySpec {
  std::string name;  // "counterexample" or "identity"
  std::vector<int> sizes;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::general;
  /// general: A, H, optional J (absent means sweep diagonal involutions);
  /// offdiag: A_plus, A_minus, T.
  std::map<std::string, Matrix> matrices;
  std::optional<FamilySpec> family;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  bool force = false;
  Expectation expect = Expectation::certified;
  /// Largest |M(i,j) - M(j,i)| over symmetric inputs before symmetrization.
  double max_asymmetry = 0.0;

  const Matrix& matrix(const std::string& name) const;
  bool has(const std::string& name) const { return matrices.count(name) != 0; }
};

const char* to_string(ProblemKind kind) noexcept;
const char* to_string(Expectation e) noexcept;

/// Parses and validates. Input errors carry line/column for JSON syntax
/// errors and name the offending field otherwise.
ProblemSpec parse_spec(const std::string& text);
ProblemSpec load_spec(const std::string& path);

std::string dump_spec(const ProblemSpec& spec);
void save_spec(const ProblemSpec& spec, const std::string& path);

/// printf("%.17g").
std::string format_decimal(double x);

/// Truncation N of the block-diagonal counterexample; force = true and
/// expect = gap_failure, J left to the diagonal sweep. Requires 1 ≤ N ≤ 64.
ProblemSpec gen_counterexample(int n);

struct RandomSpecOptions {
  ProblemKind kind = ProblemKind::general;
  int n = 4;
  std::uint64_t seed = 0;
  double alpha_target = 0.5;    // general: H₊ ⪰ α, H₋ ⪯ -α
  int zero_eigenvalues = -1;    // general: dim Ker A, -1 picks 0..2 from the seed
  std::optional<int> plus_dim;  // offdiag: dim H₊, default ⌈n/2⌉
  int kernel_plus = 1;          // offdiag: dim Ker A₊
  int kernel_minus = 1;         // offdiag: dim Ker A₋
};

/// general: commuting (A, J) sharing a random eigenbasis, A ⪰ 0 with a
/// kernel, and H satisfying the gap hypothesis with α* ≥ alpha_target.
/// offdiag: PSD A± with the requested kernel dimensions and a random T that
/// annihilates a seeded subset of those kernels. Requires n ≤ 512.
ProblemSpec gen_random(const RandomSpecOptions& options);

}  // namespace indefrep
