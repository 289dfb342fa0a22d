#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sgsr/error.hpp"
#include "sgsr/image.hpp"
#include "sgsr/sampling.hpp"
#include "sgsr/solver.hpp"

namespace sgsr::cli {

namespace {

std::string format_double(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

struct RecoverOptions {
  RecoveryConfig config;
  std::string algorithm = "sgsr";
  std::string trace_path;
  std::string reference_path;
};

void add_algorithm_option(CLI::App& cmd, RecoverOptions& opts) {
  cmd.add_option("--algo", opts.algorithm, "Recovery algorithm")
      ->check(CLI::IsMember({"sgsr", "dct", "dct-baseline"}))
      ->capture_default_str();
}

void add_config_options(CLI::App& cmd, RecoveryConfig& c) {
  cmd.add_option("--lambda", c.lambda, "Group sparsity weight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--rho", c.rho, "Gradient step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--patch", c.patch_edge, "Patch edge in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--stride", c.stride, "Reference patch stride")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--window", c.window_edge, "Search window edge in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--group-size", c.group_size, "Patches per group")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--max-iter", c.max_iter, "ISTA iterations")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--regroup-every", c.regroup_every, "Block matching period in iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--stop-tol", c.stop_tolerance, "Early stop on mean absolute change, 0 = off")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--dct-lambda", c.dct_lambda, "Penalty of the DCT baseline")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--threads", c.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

bool is_sgsr(const std::string& algorithm) { return algorithm == "sgsr"; }

std::string canonical_name(const std::string& algorithm) {
  return is_sgsr(algorithm) ? "sgsr" : "dct-baseline";
}

void print_banner(std::ostream& out, const std::string& algorithm, const RecoveryConfig& c) {
  out << "algorithm=" << canonical_name(algorithm) << " lambda=" << format_double("%g", c.lambda)
      << " rho=" << format_double("%g", c.rho) << " patch=" << c.patch_edge
      << " stride=" << c.stride << " window=" << c.window_edge << " c=" << c.group_size
      << " max_iter=" << c.max_iter << " regroup_every=" << c.regroup_every
      << " dct_lambda=" << format_double("%g", c.dct_lambda) << " threads=" << c.threads << '\n';
}

RecoveryResult run_recovery(const std::string& algorithm, const MeasurementOperator& op,
                            const MeasurementVector& b, const RecoveryConfig& config) {
  return is_sgsr(algorithm) ? recover_sgsr(op, b, config) : recover_baseline_dct(op, b, config);
}

void cmd_sample(const std::string& input, double ratio, std::uint64_t seed,
                const std::string& output, std::ostream& out) {
  const Image image = load_pgm(input);
  const MeasurementOperator op = build_operator(seed, ratio, image.width(), image.height());
  const MeasurementVector b = forward(op, image);
  save_measurements(b, output);
  out << "measurements per block: " << op.measurements_per_block() << '\n'
      << "total measurements: " << b.values.size() << '\n';
}

void cmd_recover(const std::string& input, RecoverOptions opts, const std::string& output,
                 std::ostream& out) {
  const MeasurementVector b = load_measurements(input);
  const MeasurementOperator op = build_operator(b.header);
  if (!opts.reference_path.empty()) {
    opts.config.reference = load_pgm(opts.reference_path);
  }
  opts.config.emit_trace = !opts.trace_path.empty();
  print_banner(out, opts.algorithm, opts.config);

  const RecoveryResult result = run_recovery(opts.algorithm, op, b, opts.config);
  save_pgm(result.image, output);
  if (!opts.trace_path.empty()) {
    save_trace_csv(result.trace, opts.trace_path);
  }
  if (opts.config.reference) {
    out << "psnr_db: "
        << format_double("%.2f", psnr(*opts.config.reference, quantize(result.image))) << '\n';
  }
}

void cmd_evaluate(const std::string& reference, const std::string& test, std::ostream& out) {
  out << format_double("%.2f", psnr(load_pgm(reference), load_pgm(test))) << '\n';
}

void cmd_demo(const std::string& input, double ratio, std::uint64_t seed, RecoverOptions opts,
              const std::string& output_dir, std::ostream& out) {
  const Image image = load_pgm(input);
  std::filesystem::create_directories(output_dir);
  const std::filesystem::path dir(output_dir);
  opts.config.reference = image;
  opts.config.emit_trace = true;
  print_banner(out, opts.algorithm, opts.config);

  const auto start = std::chrono::steady_clock::now();
  const MeasurementOperator op = build_operator(seed, ratio, image.width(), image.height());
  const MeasurementVector b = forward(op, image);
  const RecoveryResult result = run_recovery(opts.algorithm, op, b, opts.config);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  save_pgm(result.image, dir / "recovered.pgm");
  save_trace_csv(result.trace, dir / "trace.csv");
  const std::string row = canonical_name(opts.algorithm) + ',' + format_double("%g", ratio) +
                          ',' + std::to_string(seed) + ',' +
                          format_double("%.2f", psnr(image, quantize(result.image))) + ',' +
                          format_double("%.3f", seconds);
  std::ofstream summary(dir / "summary.csv", std::ios::trunc);
  if (!summary) {
    throw IoError("cannot write " + (dir / "summary.csv").string());
  }
  summary << "algorithm,ratio,seed,psnr_db,seconds\n" << row << '\n';
  out << row << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block compressive sensing with group sparse recovery", "sgsr"};
  app.require_subcommand(1);

  std::string input, second, output;
  double ratio = 0.3;
  std::uint64_t seed = 1;
  RecoverOptions recover_opts, demo_opts;

  auto* sample = app.add_subcommand("sample", "Measure an image block by block");
  sample->add_option("input", input, "Input PGM")->required();
  sample->add_option("--ratio", ratio, "Measurement ratio in (0, 1]")->capture_default_str();
  sample->add_option("--seed", seed, "Sensing matrix seed")->capture_default_str();
  sample->add_option("-o,--output", output, "Measurement file")->required();

  auto* recover = app.add_subcommand("recover", "Recover an image from measurements");
  recover->add_option("input", input, "Measurement file")->required();
  add_algorithm_option(*recover, recover_opts);
  add_config_options(*recover, recover_opts.config);
  recover->add_option("--reference", recover_opts.reference_path, "Original image for PSNR");
  recover->add_option("--trace", recover_opts.trace_path, "Convergence trace CSV");
  recover->add_option("-o,--output", output, "Recovered PGM")->required();

  auto* evaluate = app.add_subcommand("evaluate", "PSNR between two images");
  evaluate->add_option("reference", input, "Reference PGM")->required();
  evaluate->add_option("test", second, "Test PGM")->required();

  auto* demo = app.add_subcommand("demo", "Sample, recover and evaluate in one run");
  demo->add_option("input", input, "Input PGM")->required();
  demo->add_option("--ratio", ratio, "Measurement ratio in (0, 1]")->capture_default_str();
  demo->add_option("--seed", seed, "Sensing matrix seed")->capture_default_str();
  add_algorithm_option(*demo, demo_opts);
  add_config_options(*demo, demo_opts.config);
  demo->add_option("-o,--output", output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*sample) {
      cmd_sample(input, ratio, seed, output, out);
    } else if (*recover) {
      cmd_recover(input, recover_opts, output, out);
    } else if (*evaluate) {
      cmd_evaluate(input, second, out);
    } else if (*demo) {
      cmd_demo(input, ratio, seed, demo_opts, output, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sgsr::cli
