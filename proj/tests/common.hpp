#pragma once

#include "indefrep/error.hpp"
#include "indefrep/spectral.hpp"

#include <gtest/gtest.h>

#include <string>

namespace testing_support {

// Runs f, requires an indefrep::Error of the given kind whose message
// contains `needle`.
template <class F>
void expect_error(indefrep::ErrorKind kind, const std::string& needle, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected an error containing '" << needle << "'";
  } catch (const indefrep::Error& e) {
    EXPECT_EQ(kind, e.kind()) << e.what();
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

inline indefrep::Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  indefrep::Matrix m(static_cast<indefrep::Index>(rows.size()),
                     static_cast<indefrep::Index>(rows.begin()->size()));
  indefrep::Index i = 0;
  for (const auto& row : rows) {
    indefrep::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline indefrep::SymMatrix sym(std::initializer_list<std::initializer_list<double>> rows) {
  return indefrep::SymMatrix(mat(rows));
}

inline indefrep::SymMatrix diag(std::initializer_list<double> d) {
  indefrep::Vector v(static_cast<indefrep::Index>(d.size()));
  indefrep::Index i = 0;
  for (double x : d) v[i++] = x;
  return indefrep::SymMatrix::diagonal(v);
}

inline double max_abs(const indefrep::Matrix& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace testing_support
