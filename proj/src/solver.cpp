#include "sgsr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "sgsr/block_dct.hpp"
#include "sgsr/error.hpp"

namespace sgsr {

namespace {

// Groups are shrunk in batches: the batch is solved in parallel, then added
// to the accumulator sequentially in layout order.
constexpr std::ptrdiff_t kBatchSize = 256;

void check_config(const RecoveryConfig& config) {
  if (!(config.rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (config.max_iter < 0) throw InvalidArgument("max_iter must be nonnegative");
  if (config.regroup_every < 1) throw InvalidArgument("regroup_every must be at least 1");
  if (config.threads < 1) throw InvalidArgument("threads must be at least 1");
  if (config.stop_tolerance < 0.0) throw InvalidArgument("stop tolerance must be nonnegative");
}

bool all_finite(const Image& image) {
  const auto px = image.pixels();
  return std::all_of(px.begin(), px.end(), [](double v) { return std::isfinite(v); });
}

double mean_abs_change(const Image& a, const Image& b) {
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) sum += std::abs(pa[i] - pb[i]);
  return sum / static_cast<double>(pa.size());
}

// ISTA skeleton shared by both priors. `prox(r, j)` returns the shrinkage
// output for iteration j.
template <typename Prox>
RecoveryResult run_ista(const MeasurementOperator& op, const MeasurementVector& b,
                        const RecoveryConfig& config, Prox&& prox) {
  check_config(config);
  if (config.reference && (config.reference->width() != op.width() ||
                           config.reference->height() != op.height())) {
    throw InvalidArgument("reference image does not match measurement geometry");
  }

  RecoveryResult result;
  Image x = initialize(op, b);
  bool iterated = false;
  for (int j = 0; j < config.max_iter; ++j) {
    const Image r = gradient_step(x, op, b, config.rho);
    ProximalResult step = prox(r, j);
    iterated = true;
    const double change = mean_abs_change(step.image, x);
    if (config.emit_trace) {
      TraceRecord rec;
      rec.iteration = j + 1;
      rec.fidelity = data_fidelity(step.image, op, b);
      rec.nonzeros = step.nonzeros;
      if (config.reference) {
        rec.psnr_db = psnr(*config.reference,
                           clamp_to_byte_range(project_onto_measurements(step.image, op, b)));
      }
      result.trace.records.push_back(rec);
    }
    x = std::move(step.image);
    if (config.stop_tolerance > 0.0 && change < config.stop_tolerance) break;
  }
  result.image = clamp_to_byte_range(iterated ? project_onto_measurements(x, op, b) : x);
  return result;
}

}  // namespace

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out) {
  out << "iter,psnr_db,fidelity,nnz\n";
  char buf[64];
  for (const auto& rec : trace.records) {
    out << rec.iteration << ',';
    if (rec.psnr_db) {
      std::snprintf(buf, sizeof buf, "%.6g", *rec.psnr_db);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.6g", rec.fidelity);
    out << ',' << buf << ',' << rec.nonzeros << '\n';
  }
}

void save_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  write_trace_csv(trace, out);
}

Image initialize(const MeasurementOperator& op, const MeasurementVector& b) {
  return adjoint(op, b);
}

Image gradient_step(const Image& x, const MeasurementOperator& op, const MeasurementVector& b,
                    double rho) {
  MeasurementVector residual = forward(op, x);
  if (residual.values.size() != b.values.size() || b.header != op.header()) {
    throw InvalidArgument("measurements do not match operator");
  }
  for (std::size_t i = 0; i < residual.values.size(); ++i) residual.values[i] -= b.values[i];
  const Image correction = adjoint(op, residual);

  Image r = x;
  auto out = r.pixels();
  const auto corr = correction.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rho * corr[i];
  return r;
}

Image project_onto_measurements(const Image& x, const MeasurementOperator& op,
                                const MeasurementVector& b) {
  return gradient_step(x, op, b, 1.0);
}

double data_fidelity(const Image& x, const MeasurementOperator& op, const MeasurementVector& b) {
  const MeasurementVector ax = forward(op, x);
  if (ax.values.size() != b.values.size()) {
    throw InvalidArgument("measurements do not match operator");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < ax.values.size(); ++i) {
    const double d = ax.values[i] - b.values[i];
    sum += d * d;
  }
  return 0.5 * sum;
}

std::vector<GroupIndex> build_groups(const Image& source, const PatchLayout& layout,
                                     int window_edge, int group_size, int threads) {
  std::vector<GroupIndex> groups(layout.count());
  if (groups.empty()) return groups;
  // Every window holds the same number of candidates, so the first call
  // surfaces any precondition error before the parallel region.
  groups[0] = match_patches(source, layout, layout.positions[0], window_edge, group_size);
  const auto n = static_cast<std::ptrdiff_t>(layout.count());
#pragma omp parallel for num_threads(threads) schedule(dynamic, 16)
  for (std::ptrdiff_t k = 1; k < n; ++k) {
    groups[k] = match_patches(source, layout, layout.positions[k], window_edge, group_size);
  }
  return groups;
}

ProximalResult proximal_group_step(const Image& r, const PatchLayout& layout,
                                   std::span<const GroupIndex> groups,
                                   const ShrinkageParams& params, int threads) {
  if (!all_finite(r)) {
    throw InvalidArgument("proximal step input has non-finite pixels");
  }
  const int edge = layout.patch_edge;
  GroupAccumulator acc(r.width(), r.height(), edge);
  std::vector<SubproblemSolution> batch(static_cast<std::size_t>(kBatchSize));
  std::size_t nonzeros = 0;

  const auto n = static_cast<std::ptrdiff_t>(groups.size());
  for (std::ptrdiff_t start = 0; start < n; start += kBatchSize) {
    const std::ptrdiff_t len = std::min(kBatchSize, n - start);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      batch[i] = solve_group_subproblem(gather_group(r, groups[start + i], edge), params);
    }
    for (std::ptrdiff_t i = 0; i < len; ++i) {
      acc.add(groups[start + i], batch[i].estimate);
      nonzeros += batch[i].nonzeros;
    }
  }
  return {acc.average(), nonzeros};
}

ProximalResult proximal_group_step(const Image& r, const PatchLayout& layout,
                                   const RecoveryConfig& config, const ShrinkageParams& params) {
  const auto groups =
      build_groups(r, layout, config.window_edge, config.group_size, config.threads);
  return proximal_group_step(r, layout, groups, params, config.threads);
}

ProximalResult dct_proximal_step(const Image& r, double threshold) {
  Image coeffs = block_dct(r);
  std::size_t nonzeros = 0;
  for (double& c : coeffs.pixels()) {
    if (std::abs(c) > threshold) {
      ++nonzeros;
    } else {
      c = 0.0;
    }
  }
  return {block_idct(coeffs), nonzeros};
}

ShrinkageParams sgsr_shrinkage_params(const RecoveryConfig& config, const PatchLayout& layout) {
  return compute_tau(config.lambda, static_cast<std::uint64_t>(layout.patch_length()),
                     static_cast<std::uint64_t>(config.group_size), layout.count(),
                     static_cast<std::uint64_t>(layout.width) * layout.height);
}

RecoveryResult recover_sgsr(const MeasurementOperator& op, const MeasurementVector& b,
                            const RecoveryConfig& config) {
  const PatchLayout layout =
      build_layout(op.width(), op.height(), config.patch_edge, config.stride);
  const ShrinkageParams params = sgsr_shrinkage_params(config, layout);
  std::vector<GroupIndex> groups;
  return run_ista(op, b, config, [&](const Image& r, int j) {
    if (j % config.regroup_every == 0) {
      groups = build_groups(r, layout, config.window_edge, config.group_size, config.threads);
    }
    return proximal_group_step(r, layout, groups, params, config.threads);
  });
}

RecoveryResult recover_baseline_dct(const MeasurementOperator& op, const MeasurementVector& b,
                                    const RecoveryConfig& config) {
  if (!(config.dct_lambda >= 0.0)) {
    throw InvalidArgument("dct_lambda must be nonnegative");
  }
  const double threshold = std::sqrt(2.0 * config.dct_lambda);
  return run_ista(op, b, config, [&](const Image& r, int) { return dct_proximal_step(r, threshold); });
}

}  // namespace sgsr
