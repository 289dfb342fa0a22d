#include "sgsr/shrinkage.hpp"

#include <cmath>

#include "sgsr/error.hpp"

namespace sgsr {

ShrinkageParams compute_tau(double lambda, std::uint64_t patch_length, std::uint64_t group_size,
                            std::uint64_t patch_count, std::uint64_t pixel_count) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive");
  }
  if (patch_length == 0 || group_size == 0 || patch_count == 0 || pixel_count == 0) {
    throw InvalidArgument("group dimensions and pixel count must be positive");
  }
  ShrinkageParams p;
  p.lambda = lambda;
  p.coefficient_count = patch_length * group_size * patch_count;
  p.pixel_count = pixel_count;
  p.tau = lambda * static_cast<double>(p.coefficient_count) / static_cast<double>(pixel_count);
  p.threshold = std::sqrt(2.0 * p.tau);
  return p;
}

SparseCode hard_threshold(const SparseCode& gamma, double threshold) {
  return gamma.unaryExpr([threshold](double g) { return std::abs(g) > threshold ? g : 0.0; });
}

SubproblemSolution solve_group_subproblem(const GroupMatrix& group_r,
                                          const ShrinkageParams& params) {
  const GroupSvd svd = thin_svd(group_r);
  const SparseCode alpha = hard_threshold(svd.gamma, params.threshold);
  // gamma is nonnegative and descending, so the survivors form a prefix.
  const Eigen::Index kept = (alpha.array() != 0.0).count();
  SubproblemSolution out;
  out.nonzeros = static_cast<std::size_t>(kept);
  out.estimate = (svd.u.leftCols(kept) * alpha.head(kept).asDiagonal()) *
                 svd.v.leftCols(kept).transpose();
  return out;
}

double subproblem_objective(const GroupMatrix& estimate, const GroupMatrix& group_r,
                            std::size_t nonzeros, double tau) {
  return 0.5 * (estimate - group_r).squaredNorm() + tau * static_cast<double>(nonzeros);
}

}  // namespace sgsr
