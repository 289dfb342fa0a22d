#include "sgsr/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sgsr/error.hpp"

namespace sgsr {

namespace {

// Thin SVD for a tall (or square) matrix.
GroupSvd tall_svd(const Eigen::MatrixXd& g) {
  const Eigen::Index m = g.cols();
  const Eigen::MatrixXd gram = g.transpose() * g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw Error("eigensolver failed on group Gram matrix");
  }
  // Eigenvalues come back ascending.
  const Eigen::MatrixXd v = eig.eigenvectors().rowwise().reverse();

  // G V = Q R with R numerically diagonal; Q is orthonormal to working
  // precision regardless of how small the singular values are.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g * v);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), m);
  const auto& packed = qr.matrixQR();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(packed(a, a)) > std::abs(packed(b, b));
  });

  GroupSvd out;
  out.u.resize(g.rows(), m);
  out.v.resize(m, m);
  out.gamma.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index k = order[static_cast<std::size_t>(i)];
    const double diag = packed(k, k);
    out.gamma(i) = std::abs(diag);
    out.u.col(i) = diag < 0.0 ? Eigen::VectorXd(-q.col(k)) : Eigen::VectorXd(q.col(k));
    out.v.col(i) = v.col(k);
  }
  return out;
}

void fix_signs(GroupSvd& svd) {
  for (Eigen::Index i = 0; i < svd.atoms(); ++i) {
    Eigen::Index best = 0;
    double magnitude = -1.0;
    for (Eigen::Index r = 0; r < svd.u.rows(); ++r) {
      const double a = std::abs(svd.u(r, i));
      if (a > magnitude) {
        magnitude = a;
        best = r;
      }
    }
    if (svd.u(best, i) < 0.0) {
      svd.u.col(i) = -svd.u.col(i);
      svd.v.col(i) = -svd.v.col(i);
    }
  }
}

}  // namespace

GroupSvd thin_svd(const GroupMatrix& group) {
  if (group.size() == 0) {
    throw InvalidArgument("thin_svd: empty group");
  }
  if (!group.allFinite()) {
    throw InvalidArgument("thin_svd: group has non-finite entries");
  }
  GroupSvd svd;
  if (group.rows() >= group.cols()) {
    svd = tall_svd(group);
  } else {
    GroupSvd t = tall_svd(group.transpose());
    svd.u = std::move(t.v);
    svd.v = std::move(t.u);
    svd.gamma = std::move(t.gamma);
  }
  fix_signs(svd);
  return svd;
}

GroupMatrix reconstruct_group(const GroupSvd& svd, const SparseCode& code) {
  if (code.size() != svd.atoms()) {
    throw InvalidArgument("sparse code length does not match dictionary size");
  }
  return (svd.u * code.asDiagonal()) * svd.v.transpose();
}

}  // namespace sgsr
