#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ncgtv/config.hpp"
#include "ncgtv/graph.hpp"

namespace ncgtv {

// Row-major, interleaved channels, values nominally in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> pixels;

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0);

  std::size_t size() const { return pixels.size(); }
  double& at(int row, int col, int ch = 0) {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  double at(int row, int col, int ch = 0) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }

  Image plane(int ch) const;
  void set_plane(int ch, const Image& p);
  // Rec. 601 luma for 3 channels, a copy otherwise.
  Image luminance() const;
  Image clamped() const;
};

// Window radius is Chebyshev distance. metric_diag weights the features
// (intensity, row / height, col / width).
struct FeatureConfig {
  int window_radius = 1;
  std::array<double, 3> metric_diag{10.0, 0.0, 0.0};

  void validate() const;
};

// One node per pixel (index row * width + col); w = exp(-d) with
// d = sum_k m_k (f_i - f_j)_k^2.
Graph grid_graph(const Image& img, const FeatureConfig& fc);

// sigma on the 8-bit scale; adds N(0, (sigma / 255)^2) per sample, unclamped.
Image add_awgn(const Image& img, double sigma, std::uint64_t seed);

inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

double mse(const Image& a, const Image& b);
// 10 log10(peak^2 / MSE); kInfinitePsnr when the images are equal.
double psnr(const Image& a, const Image& b, double peak = 1.0);
double psnr(std::span<const double> a, std::span<const double> b, double peak = 1.0);

// Mean SSIM over all valid 11x11 Gaussian windows (sigma 1.5, K1 0.01,
// K2 0.03, dynamic range 1); channels averaged.
double ssim(const Image& a, const Image& b);

struct PwcSignal {
  Signal values;
  std::vector<Index> breakpoints;  // values[b] != values[b - 1]
};

PwcSignal synth_pwc(Index n, Index num_pieces, std::pair<double, double> amplitude_range, std::uint64_t seed);

// Vertical bands of random intensity; handy for synthetic image tests.
Image synth_step_image(int width, int height, int bands, std::uint64_t seed);

// 8-bit PGM (P2/P5) and PPM (P3/P6).
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);
Image read_pnm(std::istream& is);
void write_pnm(std::ostream& os, const Image& img);

enum class Method { Ncgtv, Gtv, Glr };
Method parse_method(const std::string& s);
std::string method_name(Method m);

struct PatchConfig {
  int patch = 36;
  int overlap = 4;
  bool per_channel_graph = false;
  unsigned threads = 1;
};

// Denoise an image tile by tile: each tile gets a grid graph built from the
// (noisy) tile, channels are solved independently on it, and overlapping
// pixels are averaged.
Image denoise_image(const Image& noisy, Method method, const SolverConfig& cfg, const FeatureConfig& fc,
                    const PatchConfig& pc);

// Tile origins along one axis: 0, step, ..., ending flush with the border.
std::vector<int> tile_starts(int extent, int patch, int overlap);

}  // namespace ncgtv
