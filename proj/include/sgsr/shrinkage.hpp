#pragma once

#include <cstddef>
#include <cstdint>

#include "sgsr/dictionary.hpp"
#include "sgsr/grouping.hpp"

namespace sgsr {

/// Weights of the per-group l0 subproblem
///   min 1/2 ||G - G_r||_F^2 + tau ||alpha||_0,  tau = lambda K / N,
/// where K counts all group coefficients and N counts pixels.
struct ShrinkageParams {
  double lambda = 0.0;
  double tau = 0.0;
  double threshold = 0.0;  // sqrt(2 tau)
  std::uint64_t coefficient_count = 0;  // K = patch_length * c * n
  std::uint64_t pixel_count = 0;        // N
};

ShrinkageParams compute_tau(double lambda, std::uint64_t patch_length, std::uint64_t group_size,
                            std::uint64_t patch_count, std::uint64_t pixel_count);

/// Keeps entries with |value| strictly greater than the threshold.
SparseCode hard_threshold(const SparseCode& gamma, double threshold);

struct SubproblemSolution {
  GroupMatrix estimate;
  std::size_t nonzeros = 0;  // surviving singular values
};

/// Closed-form minimizer: SVD of the group, hard threshold at sqrt(2 tau),
/// reconstruct.
SubproblemSolution solve_group_subproblem(const GroupMatrix& group_r,
                                          const ShrinkageParams& params);

/// 1/2 ||estimate - group_r||_F^2 + tau * nonzeros.
double subproblem_objective(const GroupMatrix& estimate, const GroupMatrix& group_r,
                            std::size_t nonzeros, double tau);

}  // namespace sgsr
