#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sgsr/grouping.hpp"
#include "sgsr/image.hpp"
#include "sgsr/sampling.hpp"
#include "sgsr/shrinkage.hpp"

namespace sgsr {

/// Tunables for both recovery algorithms. Defaults: 8x8 patches, 40x40
/// search window, 50 patches per group, lambda = 1800 and unit step
/// size.
struct RecoveryConfig {
  double lambda = 1.8e3;
  double rho = 1.0;
  int patch_edge = 8;
  int stride = 4;
  int window_edge = 40;
  int group_size = 50;
  int max_iter = 60;
  /// Block matching runs on iterations 0, k, 2k, ...; other iterations reuse
  /// the previous group memberships.
  int regroup_every = 1;
  /// Stop once the mean absolute change between iterates drops below this.
  /// Zero disables early stopping.
  double stop_tolerance = 0.0;
  /// Penalty of the DCT baseline; its threshold is sqrt(2 * dct_lambda).
  /// The default won the grid search in tools/dct_grid_search.sh.
  double dct_lambda = 1.0e4;
  /// Worker threads for block matching and group shrinkage. Output does not
  /// depend on this value.
  int threads = 1;
  bool emit_trace = true;
  std::optional<Image> reference;
};

struct TraceRecord {
  int iteration = 0;              // completed iterations, starting at 1
  std::optional<double> psnr_db;  // of the measurement-consistent output
  double fidelity = 0.0;          // 1/2 ||A x - b||^2 of the shrinkage output
  std::size_t nonzeros = 0;       // surviving coefficients

  double objective(double lambda) const {
    return fidelity + lambda * static_cast<double>(nonzeros);
  }
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
};

/// "iter,psnr_db,fidelity,nnz" followed by one row per record; reals use six
/// significant digits and psnr_db is empty without a reference image.
void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out);
void save_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);

struct RecoveryResult {
  Image image;  // clamped to [0, 255]
  ConvergenceTrace trace;
};

struct ProximalResult {
  Image image;
  std::size_t nonzeros = 0;
};

/// x0 = A^T b, the minimum-norm image consistent with the measurements.
Image initialize(const MeasurementOperator& op, const MeasurementVector& b);

/// r = x - rho * A^T (A x - b).
Image gradient_step(const Image& x, const MeasurementOperator& op, const MeasurementVector& b,
                    double rho);

/// Orthogonal projection onto {x : A x = b}; exact because A has
/// orthonormal rows.
Image project_onto_measurements(const Image& x, const MeasurementOperator& op,
                                const MeasurementVector& b);

/// 1/2 ||A x - b||^2.
double data_fidelity(const Image& x, const MeasurementOperator& op, const MeasurementVector& b);

/// Block matching for every reference patch of the layout, in layout order.
std::vector<GroupIndex> build_groups(const Image& source, const PatchLayout& layout,
                                     int window_edge, int group_size, int threads = 1);

/// Group-sparse proximal step: gather each group from r, shrink its
/// singular values, and average the estimates back into an image.
ProximalResult proximal_group_step(const Image& r, const PatchLayout& layout,
                                   std::span<const GroupIndex> groups,
                                   const ShrinkageParams& params, int threads = 1);

/// Same, with groups matched on r itself.
ProximalResult proximal_group_step(const Image& r, const PatchLayout& layout,
                                   const RecoveryConfig& config, const ShrinkageParams& params);

/// Hard thresholding of 8x8 block-DCT coefficients.
ProximalResult dct_proximal_step(const Image& r, double threshold);

/// Penalty weights used by recover_sgsr for this layout and image size.
ShrinkageParams sgsr_shrinkage_params(const RecoveryConfig& config, const PatchLayout& layout);

/// ISTA with the adaptive group-sparse prior. The returned image is the
/// last iterate projected onto the measurement constraint and clamped.
RecoveryResult recover_sgsr(const MeasurementOperator& op, const MeasurementVector& b,
                            const RecoveryConfig& config);

/// ISTA with a fixed block-DCT prior; same skeleton and output convention.
RecoveryResult recover_baseline_dct(const MeasurementOperator& op, const MeasurementVector& b,
                                    const RecoveryConfig& config);

}  // namespace sgsr
