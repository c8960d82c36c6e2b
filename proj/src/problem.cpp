#include "indefrep/problem.hpp"

#include "indefrep/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace indefrep {

using nlohmann::json;

namespace {

constexpr const char* kModule = "harness";

[[noreturn]] void input_error(const std::string& message) {
  throw Error(ErrorKind::input, kModule, message);
}

double parse_entry(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) input_error(where + ": entries must be decimal strings");
  const std::string text = value.get<std::string>();
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
    input_error(where + ": cannot parse '" + text + "' as a number");
  }
  return x;
}

Matrix parse_matrix(const json& rows, const std::string& name) {
  if (!rows.is_array() || rows.empty()) {
    input_error("matrix " + name + " must be a nonempty array of rows");
  }
  const auto nrows = static_cast<Index>(rows.size());
  Index ncols = -1;
  Matrix m;
  for (Index i = 0; i < nrows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array()) input_error("matrix " + name + ": row " + std::to_string(i) + " is not an array");
    if (ncols < 0) {
      ncols = static_cast<Index>(row.size());
      if (ncols == 0) input_error("matrix " + name + " has empty rows");
      m.resize(nrows, ncols);
    }
    if (static_cast<Index>(row.size()) != ncols) {
      input_error("matrix " + name + " is ragged: row " + std::to_string(i) +
                  " has " + std::to_string(row.size()) + " entries, expected " +
                  std::to_string(ncols));
    }
    for (Index j = 0; j < ncols; ++j) {
      m(i, j) = parse_entry(row[static_cast<std::size_t>(j)],
                            name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(format_decimal(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_square(const ProblemSpec& spec, const std::string& name, Index n) {
  const Matrix& m = spec.matrix(name);
  if (m.rows() != n || m.cols() != n) {
    input_error("dimension mismatch: " + name + " is " + shape(m) + ", expected " +
                std::to_string(n) + "x" + std::to_string(n));
  }
}

// Symmetrizes in place and returns the asymmetry that was removed.
double symmetrize_input(ProblemSpec& spec, const std::string& name) {
  Matrix& m = spec.matrices.at(name);
  if (m.rows() != m.cols()) input_error("matrix " + name + " must be square, got " + shape(m));
  const double asym = max_asymmetry(m);
  const double bound = 100.0 * kEps * m.norm();
  if (asym > bound) {
    std::ostringstream os;
    os << "matrix " << name << " is not symmetric (max asymmetry " << asym << ")";
    input_error(os.str());
  }
  m = 0.5 * (m + m.transpose()).eval();
  return asym;
}

void validate(ProblemSpec& spec) {
  auto require = [&](const std::string& name) {
    if (!spec.has(name)) {
      input_error(std::string("field ") + name + " required for kind " + to_string(spec.kind));
    }
  };
  switch (spec.kind) {
    case ProblemKind::general: {
      require("A");
      require("H");
      std::vector<std::string> names = {"A", "H"};
      if (spec.has("J")) names.push_back("J");
      for (const auto& name : names) {
        spec.max_asymmetry = std::max(spec.max_asymmetry, symmetrize_input(spec, name));
      }
      const Index n = spec.matrix("A").rows();
      for (const auto& name : names) require_square(spec, name, n);
      break;
    }
    case ProblemKind::offdiag: {
      require("A_plus");
      require("A_minus");
      require("T");
      for (const char* name : {"A_plus", "A_minus"}) {
        spec.max_asymmetry = std::max(spec.max_asymmetry, symmetrize_input(spec, name));
      }
      const Index p = spec.matrix("A_plus").rows();
      const Index m = spec.matrix("A_minus").rows();
      const Matrix& t = spec.matrix("T");
      if (t.rows() != p || t.cols() != m) {
        input_error("dimension mismatch: T is " + shape(t) + ", expected " +
                    std::to_string(p) + "x" + std::to_string(m));
      }
      break;
    }
    case ProblemKind::family: {
      if (!spec.family) input_error("field family required for kind family");
      const FamilySpec& f = *spec.family;
      if (f.name != "counterexample" && f.name != "identity") {
        input_error("unknown family '" + f.name + "' (expected counterexample or identity)");
      }
      if (f.sizes.empty()) input_error("family.sizes must be nonempty");
      for (int n : f.sizes) {
        if (n < 1 || n > 64) input_error("family sizes must lie in 1..64, got " + std::to_string(n));
      }
      break;
    }
  }
}

ProblemKind parse_kind(const std::string& s) {
  if (s == "general") return ProblemKind::general;
  if (s == "offdiag") return ProblemKind::offdiag;
  if (s == "family") return ProblemKind::family;
  input_error("unknown kind '" + s + "' (expected general, offdiag or family)");
}

Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

Matrix symmetric(const Matrix& m) { return 0.5 * (m + m.transpose()); }

ProblemSpec random_general(const RandomSpecOptions& o, std::mt19937_64& rng) {
  const Index n = o.n;
  if (n < 2) input_error("general instances need n >= 2");
  if (!(o.alpha_target > 0.0 && o.alpha_target <= 1.0)) {
    input_error("alpha_target must lie in (0, 1]");
  }
  std::uniform_int_distribution<Index> plus_pick(1, n - 1);
  const Index p = plus_pick(rng);
  const Index m = n - p;

  Index zeros = o.zero_eigenvalues;
  if (zeros < 0) zeros = std::uniform_int_distribution<Index>(0, 2)(rng);
  zeros = std::min(zeros, n);

  std::uniform_real_distribution<double> spread(0.1, 10.0);
  Vector a_eigs(n);
  for (Index i = 0; i < n; ++i) a_eigs[i] = i < zeros ? 0.0 : spread(rng);
  std::shuffle(a_eigs.data(), a_eigs.data() + n, rng);

  Vector signs(n);
  signs.head(p).setOnes();
  signs.tail(m).setConstant(-1.0);

  // Slight margin so that rounding cannot push α* below the target.
  const double alpha = o.alpha_target * (1.0 + 1e-9);
  const Matrix wp = gaussian(p, p, rng);
  const Matrix wm = gaussian(m, m, rng);
  const Matrix t = 1.5 * gaussian(p, m, rng) / std::sqrt(static_cast<double>(n));
  Matrix hc(n, n);
  hc.topLeftCorner(p, p) = alpha * Matrix::Identity(p, p) + wp * wp.transpose() / static_cast<double>(p);
  hc.bottomRightCorner(m, m) = -(alpha * Matrix::Identity(m, m) + wm * wm.transpose() / static_cast<double>(m));
  hc.topRightCorner(p, m) = t;
  hc.bottomLeftCorner(m, p) = t.transpose();

  const Matrix v = random_orthogonal(n, rng);
  ProblemSpec spec;
  spec.kind = ProblemKind::general;
  spec.seed = o.seed;
  spec.matrices["A"] = symmetric(v * a_eigs.asDiagonal() * v.transpose());
  spec.matrices["J"] = symmetric(v * signs.asDiagonal() * v.transpose());
  spec.matrices["H"] = symmetric(v * hc * v.transpose());
  return spec;
}

ProblemSpec random_offdiag(const RandomSpecOptions& o, std::mt19937_64& rng) {
  const Index n = o.n;
  const Index p = o.plus_dim ? *o.plus_dim : (n + 1) / 2;
  const Index m = n - p;
  if (p < 1 || m < 1) input_error("offdiag instances need both block dimensions >= 1");
  if (o.kernel_plus < 0 || o.kernel_plus > p || o.kernel_minus < 0 || o.kernel_minus > m) {
    input_error("kernel dimensions must fit inside the blocks");
  }
  std::uniform_real_distribution<double> spread(0.5, 5.0);
  auto psd_with_kernel = [&](Index dim, Index kernel, Matrix& basis) {
    basis = random_orthogonal(dim, rng);
    Vector eigs(dim);
    for (Index i = 0; i < dim; ++i) eigs[i] = i < kernel ? 0.0 : spread(rng);
    return symmetric(basis * eigs.asDiagonal() * basis.transpose());
  };
  Matrix up, um;
  const Matrix a_plus = psd_with_kernel(p, o.kernel_plus, up);
  const Matrix a_minus = psd_with_kernel(m, o.kernel_minus, um);

  // T annihilates the first j₊ kernel vectors of A₊ from the left and the
  // first j₋ kernel vectors of A₋ from the right.
  const Index jp = std::uniform_int_distribution<Index>(0, o.kernel_plus)(rng);
  const Index jm = std::uniform_int_distribution<Index>(0, o.kernel_minus)(rng);
  const Matrix proj_p = Matrix::Identity(p, p) - up.leftCols(jp) * up.leftCols(jp).transpose();
  const Matrix proj_m = Matrix::Identity(m, m) - um.leftCols(jm) * um.leftCols(jm).transpose();
  const Matrix g = 2.0 * gaussian(p, m, rng) / std::sqrt(static_cast<double>(std::max(p, m)));

  ProblemSpec spec;
  spec.kind = ProblemKind::offdiag;
  spec.seed = o.seed;
  spec.matrices["A_plus"] = a_plus;
  spec.matrices["A_minus"] = a_minus;
  spec.matrices["T"] = proj_p * g * proj_m;
  return spec;
}

}  // namespace

const Matrix& ProblemSpec::matrix(const std::string& name) const {
  auto it = matrices.find(name);
  if (it == matrices.end()) input_error("missing matrix " + name);
  return it->second;
}

const char* to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::general: return "general";
    case ProblemKind::offdiag: return "offdiag";
    case ProblemKind::family: return "family";
  }
  return "unknown";
}

const char* to_string(Expectation e) noexcept {
  return e == Expectation::gap_failure ? "gap_failure" : "certified";
}

std::string format_decimal(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ProblemSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream os;
    os << "JSON parse error at line " << line << ", column " << column << ": " << e.what();
    input_error(os.str());
  }
  if (!doc.is_object()) input_error("problem spec must be a JSON object");
  if (!doc.contains("kind") || !doc["kind"].is_string()) input_error("field kind required");

  ProblemSpec spec;
  try {
    spec.kind = parse_kind(doc["kind"].get<std::string>());
    spec.seed = doc.value("seed", std::uint64_t{0});
    spec.force = doc.value("force", false);
    const std::string expect = doc.value("expect", std::string("certified"));
    if (expect == "certified") {
      spec.expect = Expectation::certified;
    } else if (expect == "gap_failure") {
      spec.expect = Expectation::gap_failure;
    } else {
      input_error("unknown expect '" + expect + "' (expected certified or gap_failure)");
    }
    if (doc.contains("tolerances")) {
      spec.tol_scale = doc["tolerances"].value("scale", 1.0);
      if (!(spec.tol_scale > 0.0)) input_error("tolerances.scale must be positive");
    }
    if (doc.contains("matrices")) {
      if (!doc["matrices"].is_object()) input_error("field matrices must be an object");
      for (const auto& [name, rows] : doc["matrices"].items()) {
        spec.matrices[name] = parse_matrix(rows, name);
      }
    }
    if (doc.contains("family")) {
      const json& f = doc["family"];
      FamilySpec fam;
      fam.name = f.value("name", std::string());
      fam.sizes = f.value("sizes", std::vector<int>{});
      spec.family = std::move(fam);
    }
  } catch (const json::exception& e) {
    input_error(std::string("malformed problem spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) input_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

std::string dump_spec(const ProblemSpec& spec) {
  json doc;
  doc["kind"] = to_string(spec.kind);
  doc["seed"] = spec.seed;
  doc["force"] = spec.force;
  doc["expect"] = to_string(spec.expect);
  doc["tolerances"] = {{"scale", spec.tol_scale}};
  if (!spec.matrices.empty()) {
    json mats = json::object();
    for (const auto& [name, m] : spec.matrices) mats[name] = matrix_to_json(m);
    doc["matrices"] = std::move(mats);
  }
  if (spec.family) {
    doc["family"] = {{"name", spec.family->name}, {"sizes", spec.family->sizes}};
  }
  return doc.dump(2) + "\n";
}

void save_spec(const ProblemSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) input_error("cannot write " + path);
  out << dump_spec(spec);
}

ProblemSpec gen_counterexample(int n) {
  if (n < 1 || n > 64) input_error("counterexample requires 1 <= N <= 64, got " + std::to_string(n));
  ProblemSpec spec;
  spec.kind = ProblemKind::general;
  spec.force = true;
  spec.expect = Expectation::gap_failure;
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  Matrix h = Matrix::Zero(2 * n, 2 * n);
  for (int k = 1; k <= n; ++k) {
    const Index i = 2 * (k - 1);
    a(i, i) = k + 1.0;
    a(i + 1, i + 1) = 1.0 / (k + 1.0);
    h(i, i + 1) = 1.0;
    h(i + 1, i) = 1.0;
  }
  spec.matrices["A"] = std::move(a);
  spec.matrices["H"] = std::move(h);
  return spec;
}

ProblemSpec gen_random(const RandomSpecOptions& options) {
  if (options.n < 1 || options.n > 512) {
    input_error("random instances require 1 <= n <= 512, got " + std::to_string(options.n));
  }
  std::mt19937_64 rng(options.seed);
  switch (options.kind) {
    case ProblemKind::general: return random_general(options, rng);
    case ProblemKind::offdiag: return random_offdiag(options, rng);
    case ProblemKind::family: break;
  }
  input_error("random generation supports kinds general and offdiag");
}

}  // namespace indefrep
