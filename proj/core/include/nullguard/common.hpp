#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nullguard {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when caller-supplied data violates a precondition (bad dimensions,
/// non-finite entries, degenerate labels, malformed files). The CLI maps this
/// to exit code 2.
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised when a numerical contract is violated at runtime (e.g. a matrix
/// claimed to be a projection fails the idempotence check). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

inline void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite())
    throw InvalidInput(what + ": matrix contains NaN or Inf entries");
}

inline void require_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite())
    throw InvalidInput(what + ": vector contains NaN or Inf entries");
}

/// Labeled dataset: row-major sample matrix plus protected attribute and
/// optional main-task labels. `z` holds discrete class ids; `z_values`
/// holds continuous targets for the regression variant. Exactly one of the
/// two is expected to be populated for a given run.
struct Dataset {
  Matrix x;
  std::vector<int> z;
  std::vector<double> z_values;
  std::vector<int> y;

  Index n() const { return x.rows(); }
  Index dim() const { return x.cols(); }
  bool has_y() const { return !y.empty(); }
};

}  // namespace nullguard
