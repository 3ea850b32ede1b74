#include "ncgtv/imaging.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "ncgtv/solver.hpp"

namespace ncgtv {

Image::Image(int w, int h, int c, double fill) : width(w), height(h), channels(c) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("image: empty dimensions");
  if (c != 1 && c != 3) throw std::invalid_argument("image: channels must be 1 or 3");
  pixels.assign(static_cast<std::size_t>(w) * h * c, fill);
}

Image Image::plane(int ch) const {
  Image p(width, height, 1);
  for (std::size_t k = 0; k < p.pixels.size(); ++k) p.pixels[k] = pixels[k * channels + ch];
  return p;
}

void Image::set_plane(int ch, const Image& p) {
  for (std::size_t k = 0; k < p.pixels.size(); ++k) pixels[k * channels + ch] = p.pixels[k];
}

Image Image::luminance() const {
  if (channels == 1) return *this;
  Image y(width, height, 1);
  for (std::size_t k = 0; k < y.pixels.size(); ++k) {
    y.pixels[k] = 0.299 * pixels[3 * k] + 0.587 * pixels[3 * k + 1] + 0.114 * pixels[3 * k + 2];
  }
  return y;
}

Image Image::clamped() const {
  Image out = *this;
  for (auto& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
  return out;
}

void FeatureConfig::validate() const {
  if (window_radius < 1) throw std::invalid_argument("window radius must be >= 1");
  for (double m : metric_diag)
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("metric weights must be finite and >= 0");
}

Graph grid_graph(const Image& img, const FeatureConfig& fc) {
  if (img.width <= 0 || img.height <= 0 || img.pixels.empty()) throw std::invalid_argument("grid_graph: empty image");
  if (img.channels != 1) throw std::invalid_argument("grid_graph: expects a single-channel plane");
  fc.validate();

  const int w = img.width;
  const int h = img.height;
  const int r = fc.window_radius;
  std::vector<Edge> edges;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const Index i = static_cast<Index>(row) * w + col;
      // Forward half of the window so each pair appears once with i < j.
      for (int dr = 0; dr <= r; ++dr) {
        for (int dc = -r; dc <= r; ++dc) {
          if (dr == 0 && dc <= 0) continue;
          const int r2 = row + dr;
          const int c2 = col + dc;
          if (r2 >= h || c2 < 0 || c2 >= w) continue;
          const Index j = static_cast<Index>(r2) * w + c2;
          const double di = img.at(row, col) - img.at(r2, c2);
          const double drow = static_cast<double>(dr) / h;
          const double dcol = static_cast<double>(dc) / w;
          const double d =
              fc.metric_diag[0] * di * di + fc.metric_diag[1] * drow * drow + fc.metric_diag[2] * dcol * dcol;
          edges.push_back({i, j, std::exp(-d)});
        }
      }
    }
  }
  return Graph(static_cast<Index>(w) * h, std::move(edges));
}

Image add_awgn(const Image& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_awgn: sigma must be >= 0");
  Image out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma / 255.0);
  for (auto& v : out.pixels) v += noise(rng);
  return out;
}

double mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("image metric: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.pixels.size(); ++k) {
    const double d = a.pixels[k] - b.pixels[k];
    s += d * d;
  }
  return s / static_cast<double>(a.pixels.size());
}

double psnr(std::span<const double> a, std::span<const double> b, double peak) {
  check_same_size(a.size(), b.size(), "psnr");
  if (a.empty()) throw std::invalid_argument("psnr: empty input");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  const double m = s / static_cast<double>(a.size());
  if (m == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(peak * peak / m);
}

double psnr(const Image& a, const Image& b, double peak) {
  const double m = mse(a, b);
  if (m == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(peak * peak / m);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> g{};
  double total = 0.0;
  for (int k = 0; k < kSsimWindow; ++k) {
    const double x = k - kSsimWindow / 2;
    g[k] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
    total += g[k];
  }
  for (auto& v : g) v /= total;
  return g;
}

// Separable 'valid' filtering of a single plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  static const auto taps = gaussian_taps();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * src[static_cast<std::size_t>(r) * w + c + k];
      tmp[static_cast<std::size_t>(r) * ow + c] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * tmp[static_cast<std::size_t>(r + k) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = s;
    }
  return out;
}

double ssim_plane(const Image& a, const Image& b) {
  const double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  const double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  const int w = a.width;
  const int h = a.height;
  std::vector<double> aa(a.pixels.size()), bb(a.pixels.size()), ab(a.pixels.size());
  for (std::size_t k = 0; k < a.pixels.size(); ++k) {
    aa[k] = a.pixels[k] * a.pixels[k];
    bb[k] = b.pixels[k] * b.pixels[k];
    ab[k] = a.pixels[k] * b.pixels[k];
  }
  const auto mu_a = filter_valid(a.pixels, w, h);
  const auto mu_b = filter_valid(b.pixels, w, h);
  const auto e_aa = filter_valid(aa, w, h);
  const auto e_bb = filter_valid(bb, w, h);
  const auto e_ab = filter_valid(ab, w, h);

  double total = 0.0;
  for (std::size_t k = 0; k < mu_a.size(); ++k) {
    const double ma = mu_a[k];
    const double mb = mu_b[k];
    const double va = e_aa[k] - ma * ma;
    const double vb = e_bb[k] - mb * mb;
    const double cov = e_ab[k] - ma * mb;
    total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels)
    throw std::invalid_argument("ssim: dimension mismatch");
  if (a.width < kSsimWindow || a.height < kSsimWindow)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  double total = 0.0;
  for (int ch = 0; ch < a.channels; ++ch) total += ssim_plane(a.plane(ch), b.plane(ch));
  return total / a.channels;
}

PwcSignal synth_pwc(Index n, Index num_pieces, std::pair<double, double> amplitude_range, std::uint64_t seed) {
  if (num_pieces < 1 || num_pieces > n) throw std::invalid_argument("synth_pwc: need 1 <= num_pieces <= n");
  const auto [lo, hi] = amplitude_range;
  if (num_pieces > 1 && !(hi > lo)) throw std::invalid_argument("synth_pwc: empty amplitude range");

  std::mt19937_64 rng(seed);
  std::vector<Index> candidates(n - 1);
  for (Index k = 0; k + 1 < n; ++k) candidates[k] = k + 1;
  // Partial Fisher-Yates; the first num_pieces - 1 slots become breakpoints.
  for (Index k = 0; k + 1 < num_pieces; ++k) {
    std::uniform_int_distribution<Index> pick(k, candidates.size() - 1);
    std::swap(candidates[k], candidates[pick(rng)]);
  }
  PwcSignal out;
  out.breakpoints.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(num_pieces - 1));
  std::sort(out.breakpoints.begin(), out.breakpoints.end());

  std::uniform_real_distribution<double> amp(lo, hi);
  out.values.resize(n);
  double level = num_pieces > 1 ? amp(rng) : lo;
  std::size_t next = 0;
  for (Index k = 0; k < n; ++k) {
    if (next < out.breakpoints.size() && out.breakpoints[next] == k) {
      double fresh = amp(rng);
      while (fresh == level) fresh = amp(rng);
      level = fresh;
      ++next;
    }
    out.values[k] = level;
  }
  return out;
}

Image synth_step_image(int width, int height, int bands, std::uint64_t seed) {
  const auto row = synth_pwc(static_cast<Index>(width), static_cast<Index>(bands), {0.1, 0.9}, seed);
  Image img(width, height, 1);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) img.at(r, c) = row.values[static_cast<std::size_t>(c)];
  return img;
}

Method parse_method(const std::string& s) {
  if (s == "ncgtv") return Method::Ncgtv;
  if (s == "gtv") return Method::Gtv;
  if (s == "glr") return Method::Glr;
  throw std::invalid_argument("unknown method '" + s + "' (expected ncgtv, gtv or glr)");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::Ncgtv: return "ncgtv";
    case Method::Gtv: return "gtv";
    case Method::Glr: return "glr";
  }
  return "?";
}

std::vector<int> tile_starts(int extent, int patch, int overlap) {
  if (patch <= overlap) throw std::invalid_argument("patch size must exceed the overlap");
  if (extent <= patch) return {0};
  std::vector<int> starts;
  const int step = patch - overlap;
  for (int s = 0; s + patch < extent; s += step) starts.push_back(s);
  starts.push_back(extent - patch);
  return starts;
}

namespace {

Signal solve_plane(const Graph& g, const Signal& y, Method method, const SolverConfig& cfg) {
  switch (method) {
    case Method::Ncgtv: return ncgtv_denoise(y, g, cfg).x;
    case Method::Gtv: return gtv_denoise(y, g, cfg).x;
    case Method::Glr: return glr_denoise(y, g, cfg.mu, cfg);
  }
  return y;
}

Image crop(const Image& img, int r0, int c0, int h, int w) {
  Image out(w, h, img.channels);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < img.channels; ++ch) out.at(r, c, ch) = img.at(r0 + r, c0 + c, ch);
  return out;
}

Image denoise_tile(const Image& tile, Method method, const SolverConfig& cfg, const FeatureConfig& fc,
                   bool per_channel_graph) {
  Image out = tile;
  const Graph shared = per_channel_graph ? Graph() : grid_graph(tile.luminance(), fc);
  for (int ch = 0; ch < tile.channels; ++ch) {
    const Image p = tile.plane(ch);
    const Graph g = per_channel_graph ? grid_graph(p, fc) : Graph();
    Image restored = p;
    restored.pixels = solve_plane(per_channel_graph ? g : shared, p.pixels, method, cfg);
    out.set_plane(ch, restored);
  }
  return out;
}

}  // namespace

Image denoise_image(const Image& noisy, Method method, const SolverConfig& cfg, const FeatureConfig& fc,
                    const PatchConfig& pc) {
  cfg.validate();
  fc.validate();
  const int ph = std::min(pc.patch, noisy.height);
  const int pw = std::min(pc.patch, noisy.width);
  const auto rows = tile_starts(noisy.height, ph, std::min(pc.overlap, ph - 1));
  const auto cols = tile_starts(noisy.width, pw, std::min(pc.overlap, pw - 1));

  struct Tile {
    int r0;
    int c0;
  };
  std::vector<Tile> tiles;
  for (int r : rows)
    for (int c : cols) tiles.push_back({r, c});

  std::vector<Image> results(tiles.size());
  std::vector<std::exception_ptr> errors(tiles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tiles.size(); k = next++) {
      try {
        results[k] = denoise_tile(crop(noisy, tiles[k].r0, tiles[k].c0, ph, pw), method, cfg, fc,
                                  pc.per_channel_graph);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(pc.threads, static_cast<unsigned>(tiles.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  // Merge in tile order so the result does not depend on scheduling.
  Image sum(noisy.width, noisy.height, noisy.channels, 0.0);
  std::vector<int> count(static_cast<std::size_t>(noisy.width) * noisy.height, 0);
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    for (int r = 0; r < ph; ++r)
      for (int c = 0; c < pw; ++c) {
        const int rr = tiles[k].r0 + r;
        const int cc = tiles[k].c0 + c;
        ++count[static_cast<std::size_t>(rr) * noisy.width + cc];
        for (int ch = 0; ch < noisy.channels; ++ch) sum.at(rr, cc, ch) += results[k].at(r, c, ch);
      }
  }
  for (int r = 0; r < noisy.height; ++r)
    for (int c = 0; c < noisy.width; ++c)
      for (int ch = 0; ch < noisy.channels; ++ch)
        sum.at(r, c, ch) /= count[static_cast<std::size_t>(r) * noisy.width + c];
  return sum;
}

}  // namespace ncgtv
