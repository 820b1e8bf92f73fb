#pragma once

#include <vector>

#include "nullguard/common.hpp"

namespace nullguard {

inline constexpr double kDefaultSvdTol = 1e-10;

enum class ProjectionKind { kRowspace, kNullspace };

/// An orthogonal projector: symmetric, idempotent, eigenvalues in {0,1}.
/// `rank` is the dimension of the image subspace.
struct ProjectionMatrix {
  Matrix p;
  ProjectionKind kind = ProjectionKind::kNullspace;
  Index rank = 0;

  Index dim() const { return p.rows(); }
};

/// Orthogonal projector onto the span of w's rows, from the SVD of w.
/// Right singular vectors with sigma > tol * sigma_max are kept; a zero
/// matrix yields the zero projector of rank 0.
ProjectionMatrix rowspace_projection(const Matrix& w,
                                     double tol = kDefaultSvdTol);

/// Projector onto the intersection of the nullspaces of the classifiers
/// whose rowspace projectors are given: I - P_R(sum of rowspace projectors).
/// This is the stabilized recomputation route; it is never formed by
/// multiplying nullspace projectors together. An empty list gives the
/// identity on R^dim.
ProjectionMatrix intersection_nullspace_projection(
    const std::vector<ProjectionMatrix>& rowspace_projs, Index dim,
    double tol = kDefaultSvdTol);

/// Applies p to every row of x: row i becomes P * x_i.
Matrix apply_projection(const ProjectionMatrix& p, const Matrix& x);

/// Number of singular values above tol * sigma_max; 0 for the zero matrix.
Index effective_rank(const Matrix& m, double tol = kDefaultSvdTol);

/// Checks symmetry and idempotence within `tol` (max-norm); throws
/// NumericalError on violation. Used by loaders and by callers that accept
/// externally supplied projectors.
void validate_projection(const ProjectionMatrix& p, double tol);

}  // namespace nullguard
