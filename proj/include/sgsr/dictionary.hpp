#pragma once

#include <Eigen/Dense>

#include "sgsr/grouping.hpp"

namespace sgsr {

/// Thin SVD of a group, G = U diag(gamma) V^T with m = min(rows, cols).
///
/// The pairs (u_i, v_i) are the adaptive dictionary of the group: atom i is
/// the rank-1 matrix u_i v_i^T. Atoms are never materialized.
struct GroupSvd {
  Eigen::MatrixXd u;      // rows x m, orthonormal columns
  Eigen::VectorXd gamma;  // m, descending, nonnegative
  Eigen::MatrixXd v;      // cols x m, orthonormal columns

  Eigen::Index atoms() const { return gamma.size(); }
};

/// Coefficients of a group in its dictionary, one per atom.
using SparseCode = Eigen::VectorXd;

/// Computes the factors through the symmetric eigenproblem of the smaller
/// Gram matrix; the left factor is then re-orthonormalized by Householder QR.
/// Each column of U has its largest-magnitude entry positive (first one on
/// ties), and V is flipped with it.
GroupSvd thin_svd(const GroupMatrix& group);

/// sum_i code[i] * u_i v_i^T.
GroupMatrix reconstruct_group(const GroupSvd& svd, const SparseCode& code);

}  // namespace sgsr
