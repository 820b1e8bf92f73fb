#include "nullguard/linalg.hpp"

#include <Eigen/SVD>

#include <string>

namespace nullguard {

namespace {

// Symmetrize exactly so that later row-wise application (x * P) equals
// column-wise (P * x^T)^T entry for entry.
Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

ProjectionMatrix rowspace_projection(const Matrix& w, double tol) {
  require(w.rows() >= 1 && w.cols() >= 1,
          "rowspace_projection: w must be non-empty");
  require_finite(w, "rowspace_projection");

  const Index d = w.cols();
  Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;

  Index kept = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol * sigma_max && sigma(i) > 0.0) ++kept;
  }

  ProjectionMatrix out;
  out.kind = ProjectionKind::kRowspace;
  out.rank = kept;
  if (kept == 0) {
    out.p = Matrix::Zero(d, d);
  } else {
    const Matrix basis = svd.matrixV().leftCols(kept);
    out.p = symmetrized(basis * basis.transpose());
  }
  return out;
}

ProjectionMatrix intersection_nullspace_projection(
    const std::vector<ProjectionMatrix>& rowspace_projs, Index dim,
    double tol) {
  require(dim >= 1, "intersection_nullspace_projection: dim must be >= 1");

  ProjectionMatrix out;
  out.kind = ProjectionKind::kNullspace;
  if (rowspace_projs.empty()) {
    out.p = Matrix::Identity(dim, dim);
    out.rank = dim;
    return out;
  }

  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& proj : rowspace_projs) {
    require(proj.p.rows() == dim && proj.p.cols() == dim,
            "intersection_nullspace_projection: projector dimension mismatch "
            "(expected " +
                std::to_string(dim) + "x" + std::to_string(dim) + ", got " +
                std::to_string(proj.p.rows()) + "x" +
                std::to_string(proj.p.cols()) + ")");
    require(proj.kind == ProjectionKind::kRowspace,
            "intersection_nullspace_projection: inputs must be rowspace "
            "projectors");
    sum += proj.p;
  }

  const ProjectionMatrix combined_rowspace = rowspace_projection(sum, tol);
  out.p = symmetrized(Matrix::Identity(dim, dim) - combined_rowspace.p);
  out.rank = dim - combined_rowspace.rank;
  return out;
}

Matrix apply_projection(const ProjectionMatrix& p, const Matrix& x) {
  require(x.cols() == p.p.rows(),
          "apply_projection: x has " + std::to_string(x.cols()) +
              " columns but projector is " + std::to_string(p.p.rows()) +
              "-dimensional");
  // P is exactly symmetric, so x * P computes P * x_i for each row x_i.
  return x * p.p;
}

Index effective_rank(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol * sigma_max && sigma(i) > 0.0) ++rank;
  }
  return rank;
}

void validate_projection(const ProjectionMatrix& p, double tol) {
  if (p.p.rows() != p.p.cols())
    throw NumericalError("projection matrix is not square");
  const double asym = (p.p - p.p.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw NumericalError("projection matrix is not symmetric (max deviation " +
                         std::to_string(asym) + ")");
  const double non_idem = (p.p * p.p - p.p).cwiseAbs().maxCoeff();
  if (non_idem > tol)
    throw NumericalError("projection matrix is not idempotent (||P*P - P|| = " +
                         std::to_string(non_idem) + ")");
}

}  // namespace nullguard
