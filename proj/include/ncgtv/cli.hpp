#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ncgtv/config.hpp"
#include "ncgtv/imaging.hpp"

namespace ncgtv::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kSolver = 3 };

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  SolverConfig solver;
  FeatureConfig features;
  PatchConfig patches;

  Method method = Method::Ncgtv;
  std::vector<Method> methods{Method::Ncgtv, Method::Gtv, Method::Glr};
  double sigma = 0.0;
  std::vector<double> sigmas{30.0, 50.0};
  std::optional<std::uint64_t> seed;

  std::string input;
  std::string output;
  std::string noisy_output;
  std::string input_dir;
  std::string report;
  std::string plot_dir;
  std::string graph_path;
  std::string signal_path;
  std::string diagnostics;

  std::vector<double> mu_grid;
  std::vector<double> rho_grid;
  bool timing = true;
  bool mu_given = false;
};

// Apply keys of a JSON object onto cfg. Unknown keys are an error.
void apply_json(RunConfig& cfg, const std::string& json_text);

// Worker count from NCGTV_THREADS, falling back to the hardware concurrency.
unsigned worker_threads();

// Noise seed for one (image, sigma) pair; shared by bench and gridsearch so
// paired runs see identical noise.
std::uint64_t noise_seed(std::uint64_t base, std::size_t image_index, double sigma);

struct Evaluation {
  double psnr;
  double ssim;
  double seconds;
};

// Adds noise to clean, restores it with method and scores against clean.
Evaluation evaluate(const Image& clean, double sigma, std::uint64_t seed, Method method, const RunConfig& cfg,
                    Image* restored = nullptr, Image* noisy = nullptr);

// Entry point; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ncgtv::cli
