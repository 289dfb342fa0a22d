#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sgsr/block_dct.hpp"
#include "sgsr/error.hpp"
#include "sgsr/random.hpp"
#include "sgsr/solver.hpp"
#include "support/test_helpers.hpp"

namespace sgsr {
namespace {

using testing::random_image;

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Smooth test scene with edges, cheap enough for a few full iterations.
Image scene(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 60.0 + 0.8 * x + 0.5 * y;
      if ((x / 16 + y / 16) % 2 == 0) v += 70.0;
      img(x, y) = v;
    }
  }
  return img;
}

RecoveryConfig quick_config(int iters) {
  RecoveryConfig cfg;
  cfg.max_iter = iters;
  cfg.group_size = 16;
  cfg.window_edge = 20;
  return cfg;
}

TEST(Initialize, IsConsistentWithMeasurements) {
  const auto op = build_operator(1, 0.3, 64, 64);
  const auto b = forward(op, scene(64, 64));
  const Image x0 = initialize(op, b);
  EXPECT_EQ(x0, adjoint(op, b));
  EXPECT_LE(data_fidelity(x0, op, b), 1e-18 * squared_norm(b.values) + 1e-18);
}

TEST(GradientStep, UnitStepProjectsOntoMeasurements) {
  const auto op = build_operator(2, 0.3, 64, 64);
  const auto b = forward(op, scene(64, 64));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Image x = random_image(64, 64, seed);
    EXPECT_LE(data_fidelity(project_onto_measurements(x, op, b), op, b),
              1e-12 * squared_norm(b.values));
    const Image half = gradient_step(x, op, b, 0.5);
    EXPECT_NEAR(data_fidelity(half, op, b), 0.25 * data_fidelity(x, op, b),
                1e-9 * data_fidelity(x, op, b));
  }
}

TEST(GradientStep, ZeroStepIsIdentity) {
  const auto op = build_operator(2, 0.3, 32, 32);
  const Image x = random_image(32, 32, 4);
  const auto b = forward(op, random_image(32, 32, 5));
  EXPECT_EQ(gradient_step(x, op, b, 0.0), x);
}

TEST(GradientStep, RejectsForeignMeasurements) {
  const auto op = build_operator(2, 0.3, 32, 32);
  const auto other = build_operator(3, 0.3, 32, 32);
  const auto b = forward(other, random_image(32, 32, 5));
  EXPECT_THROW(gradient_step(random_image(32, 32, 4), op, b, 1.0), InvalidArgument);
}

TEST(ProximalGroupStep, ZeroThresholdIsIdentity) {
  const Image r = random_image(48, 48, 6);
  const auto layout = build_layout(48, 48, 8, 4);
  RecoveryConfig cfg = quick_config(1);
  const auto result = proximal_group_step(r, layout, cfg, ShrinkageParams{});
  EXPECT_LE(max_abs_diff(result.image, r), 1e-8);
  EXPECT_EQ(result.nonzeros, layout.count() * 16u);
}

TEST(ProximalGroupStep, HugeThresholdGivesZero) {
  const Image r = random_image(48, 48, 6);
  const auto layout = build_layout(48, 48, 8, 4);
  const auto params = compute_tau(1e12, 64, 16, layout.count(), 48 * 48);
  const auto result = proximal_group_step(r, layout, quick_config(1), params);
  EXPECT_EQ(result.nonzeros, 0u);
  for (double v : result.image.pixels()) EXPECT_EQ(v, 0.0);
}

TEST(ProximalGroupStep, RemovesNoiseFromRepeatedTexture) {
  Image clean(64, 64);
  NormalGenerator gen(3);
  std::vector<double> tile(64);
  for (double& v : tile) v = 128.0 + 60.0 * gen();
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) clean(x, y) = tile[(y % 8) * 8 + x % 8];
  }
  Image noisy = clean;
  for (double& v : noisy.pixels()) v += 10.0 * gen();

  RecoveryConfig cfg;
  cfg.lambda = 200.0;
  const auto layout = build_layout(64, 64, cfg.patch_edge, cfg.stride);
  const auto result = proximal_group_step(noisy, layout, cfg, sgsr_shrinkage_params(cfg, layout));
  EXPECT_GT(psnr(clean, result.image), psnr(clean, noisy) + 6.0);
}

TEST(ProximalGroupStep, RejectsNonFiniteInput) {
  Image r = random_image(32, 32, 1);
  r(3, 3) = std::nan("");
  const auto layout = build_layout(32, 32, 8, 4);
  EXPECT_THROW(proximal_group_step(r, layout, quick_config(1), ShrinkageParams{}),
               InvalidArgument);
}

TEST(BuildGroups, MatchesPerReferenceCalls) {
  const Image img = random_image(48, 40, 9);
  const auto layout = build_layout(48, 40, 8, 4);
  const auto groups = build_groups(img, layout, 24, 10, 3);
  ASSERT_EQ(groups.size(), layout.count());
  for (std::size_t k = 0; k < layout.count(); ++k) {
    EXPECT_EQ(groups[k], match_patches(img, layout, layout.positions[k], 24, 10));
  }
}

TEST(BlockDct, IsOrthonormalAndInvertible) {
  const Image img = random_image(32, 24, 2);
  const Image coeffs = block_dct(img);
  double e1 = 0.0, e2 = 0.0;
  for (double v : img.pixels()) e1 += v * v;
  for (double v : coeffs.pixels()) e2 += v * v;
  EXPECT_NEAR(e1, e2, 1e-9 * e1);
  EXPECT_LE(max_abs_diff(block_idct(coeffs), img), 1e-9);
  // DC coefficient of a constant block is 8 times the value.
  EXPECT_NEAR(block_dct(Image(8, 8, 3.0))(0, 0), 24.0, 1e-12);
  EXPECT_THROW(block_dct(Image(12, 8)), InvalidArgument);
}

TEST(DctProximalStep, ZeroThresholdIsIdentityAndLargeIsZero) {
  const Image r = random_image(32, 32, 3);
  const auto same = dct_proximal_step(r, 0.0);
  EXPECT_LE(max_abs_diff(same.image, r), 1e-9);
  EXPECT_EQ(same.nonzeros, 1024u);
  const auto zero = dct_proximal_step(r, 1e9);
  EXPECT_EQ(zero.nonzeros, 0u);
  EXPECT_LE(max_abs_diff(zero.image, Image(32, 32, 0.0)), 0.0);
}

TEST(RecoverSgsr, FullRatioIsExact) {
  const Image x = scene(64, 64);
  const auto op = build_operator(4, 1.0, 64, 64);
  RecoveryConfig cfg = quick_config(1);
  cfg.reference = x;
  const auto result = recover_sgsr(op, forward(op, x), cfg);
  EXPECT_GE(psnr(x, result.image), 99.0);
}

TEST(RecoverSgsr, ConstantImageIsRecovered) {
  const Image x(64, 64, 140.0);
  const auto op = build_operator(5, 0.3, 64, 64);
  RecoveryConfig cfg = quick_config(30);
  cfg.reference = x;
  const auto result = recover_sgsr(op, forward(op, x), cfg);
  EXPECT_GT(psnr(x, result.image), 50.0);
  ASSERT_EQ(result.trace.records.size(), 30u);
  for (std::size_t i = 1; i < result.trace.records.size(); ++i) {
    EXPECT_GT(*result.trace.records[i].psnr_db, *result.trace.records[i - 1].psnr_db);
  }
}

TEST(RecoverSgsr, ZeroIterationsReturnsInitialEstimate) {
  const Image x = scene(64, 64);
  const auto op = build_operator(6, 0.3, 64, 64);
  const auto b = forward(op, x);
  RecoveryConfig cfg = quick_config(0);
  const auto result = recover_sgsr(op, b, cfg);
  EXPECT_EQ(result.image, clamp_to_byte_range(initialize(op, b)));
  EXPECT_TRUE(result.trace.records.empty());
}

TEST(RecoverSgsr, OutputIsIndependentOfThreadCount) {
  const Image x = scene(64, 64);
  const auto op = build_operator(7, 0.3, 64, 64);
  const auto b = forward(op, x);
  RecoveryConfig cfg = quick_config(3);
  cfg.reference = x;
  const auto one = recover_sgsr(op, b, cfg);
  cfg.threads = 4;
  const auto four = recover_sgsr(op, b, cfg);
  EXPECT_EQ(one.image, four.image);
  std::ostringstream a, c;
  write_trace_csv(one.trace, a);
  write_trace_csv(four.trace, c);
  EXPECT_EQ(a.str(), c.str());
}

TEST(RecoverSgsr, MatchesHandWrittenIterationWithFrozenGroups) {
  const Image x = scene(64, 64);
  const auto op = build_operator(8, 0.4, 64, 64);
  const auto b = forward(op, x);
  RecoveryConfig cfg = quick_config(3);
  cfg.regroup_every = 5;  // groups from the first iterate only
  cfg.rho = 0.9;
  const auto result = recover_sgsr(op, b, cfg);

  const auto layout = build_layout(64, 64, cfg.patch_edge, cfg.stride);
  const auto params = sgsr_shrinkage_params(cfg, layout);
  Image it = adjoint(op, b);
  std::vector<GroupIndex> groups;
  for (int j = 0; j < 3; ++j) {
    const Image r = gradient_step(it, op, b, cfg.rho);
    if (j == 0) groups = build_groups(r, layout, cfg.window_edge, cfg.group_size);
    it = proximal_group_step(r, layout, groups, params).image;
  }
  EXPECT_EQ(result.image, clamp_to_byte_range(project_onto_measurements(it, op, b)));
}

TEST(RecoverSgsr, RejectsInvalidConfiguration) {
  const auto op = build_operator(1, 0.3, 64, 64);
  const auto b = forward(op, scene(64, 64));
  RecoveryConfig cfg = quick_config(1);
  cfg.rho = 0.0;
  EXPECT_THROW(recover_sgsr(op, b, cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.lambda = 0.0;
  EXPECT_THROW(recover_sgsr(op, b, cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.group_size = 2000;
  EXPECT_THROW(recover_sgsr(op, b, cfg), InvalidArgument);
  cfg = quick_config(1);
  cfg.reference = Image(32, 32);
  EXPECT_THROW(recover_sgsr(op, b, cfg), InvalidArgument);
}

TEST(RecoverBaselineDct, ImprovesOnInitialEstimate) {
  const Image x = scene(64, 64);
  const auto op = build_operator(9, 0.3, 64, 64);
  const auto b = forward(op, x);
  RecoveryConfig cfg;
  cfg.max_iter = 50;
  cfg.reference = x;
  const auto result = recover_baseline_dct(op, b, cfg);
  EXPECT_GT(psnr(x, result.image), psnr(x, clamp_to_byte_range(initialize(op, b))) + 3.0);
  EXPECT_EQ(result.trace.records.size(), 50u);
}

TEST(TraceCsv, FormatsRows) {
  ConvergenceTrace trace;
  trace.records.push_back({1, 24.123456789, 1234567.0, 42});
  trace.records.push_back({2, std::nullopt, 0.5, 7});
  std::ostringstream out;
  write_trace_csv(trace, out);
  EXPECT_EQ(out.str(), "iter,psnr_db,fidelity,nnz\n1,24.1235,1.23457e+06,42\n2,,0.5,7\n");
}

TEST(TraceCsv, SaveToUnwritablePathFails) {
  EXPECT_THROW(save_trace_csv(ConvergenceTrace{}, "/nonexistent-dir/t.csv"), IoError);
}

TEST(TraceRecord, ObjectiveCombinesFidelityAndSparsity) {
  const TraceRecord rec{3, 20.0, 10.0, 4};
  EXPECT_DOUBLE_EQ(rec.objective(2.5), 20.0);
}

}  // namespace
}  // namespace sgsr
