#include "ncgtv/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncgtv/certify.hpp"
#include "ncgtv/errors.hpp"
#include "ncgtv/graph.hpp"
#include "ncgtv/solver.hpp"

namespace ncgtv::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& n : names) out.push_back(parse_method(n));
  return out;
}

// Values given on the command line; unset entries fall through to the JSON
// config and then to built-in defaults.
struct Flags {
  std::optional<std::string> method;
  std::optional<double> mu, rho, gamma, lambda, eps, sigma, a_max, a_floor, delta, fixed_a;
  std::optional<double> cg_tol, primal_tol, dual_tol;
  std::optional<int> cg_max_iter, pgd_inner_iters, outer_max_iter;
  std::optional<std::uint64_t> seed;
  std::optional<int> patch, overlap, radius;
  std::vector<double> metric;
  std::optional<bool> refresh, timing, per_channel_graph;
  std::vector<double> sigmas, mu_grid, rho_grid;
  std::vector<std::string> methods;
  std::string config;
};

void add_solver_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file; flags take precedence");
  app->add_option("--method", f.method, "ncgtv, gtv or glr");
  app->add_option("--mu", f.mu, "regularizer weight");
  app->add_option("--rho", f.rho, "ADMM penalty");
  app->add_option("--gamma", f.gamma, "PGD step size (default 1/rho)");
  app->add_option("--lambda", f.lambda, "proximal parameter (default 1/rho)");
  app->add_option("--eps", f.eps, "numerical floor in penalty weights");
  app->add_option("--a-max", f.a_max, "cap on the MC parameter");
  app->add_option("--a-floor", f.a_floor, "floor on the MC parameter");
  app->add_option("--delta", f.delta, "safety factor applied to the certified parameter");
  app->add_option("--fixed-a", f.fixed_a, "skip certification and use this MC parameter");
  app->add_option("--cg-tol", f.cg_tol);
  app->add_option("--cg-max-iter", f.cg_max_iter);
  app->add_option("--pgd-iters", f.pgd_inner_iters);
  app->add_option("--outer-iters", f.outer_max_iter);
  app->add_option("--primal-tol", f.primal_tol);
  app->add_option("--dual-tol", f.dual_tol);
  app->add_flag("--refresh,!--no-refresh", f.refresh, "rebuild the penalty graph every outer iteration");
  app->add_option("--patch", f.patch, "tile size in pixels");
  app->add_option("--overlap", f.overlap, "tile overlap in pixels");
  app->add_option("--radius", f.radius, "graph window radius");
  app->add_option("--metric", f.metric, "three metric weights: intensity row col")->expected(3);
  app->add_flag("--per-channel-graph,!--shared-graph", f.per_channel_graph);
  app->add_flag("--timing,!--no-timing", f.timing, "report wall-clock seconds");
  app->add_option("--seed", f.seed, "noise seed (required whenever noise is added)");
}

void apply_flags(RunConfig& cfg, const Flags& f) {
  if (!f.config.empty()) {
    std::ifstream is(f.config);
    if (!is) throw IoError("cannot open config " + f.config);
    std::stringstream ss;
    ss << is.rdbuf();
    apply_json(cfg, ss.str());
  }
  auto& s = cfg.solver;
  if (f.method) cfg.method = parse_method(*f.method);
  if (f.mu) {
    s.mu = *f.mu;
    cfg.mu_given = true;
  }
  if (f.rho) s.rho = *f.rho;
  if (f.gamma) s.gamma = *f.gamma;
  if (f.lambda) s.lambda = *f.lambda;
  if (f.eps) s.eps = *f.eps;
  if (f.a_max) s.a_max = *f.a_max;
  if (f.a_floor) s.a_floor = *f.a_floor;
  if (f.delta) s.delta = *f.delta;
  if (f.fixed_a) s.fixed_a = *f.fixed_a;
  if (f.cg_tol) s.cg_tol = *f.cg_tol;
  if (f.cg_max_iter) s.cg_max_iter = *f.cg_max_iter;
  if (f.pgd_inner_iters) s.pgd_inner_iters = *f.pgd_inner_iters;
  if (f.outer_max_iter) s.outer_max_iter = *f.outer_max_iter;
  if (f.primal_tol) s.primal_tol = *f.primal_tol;
  if (f.dual_tol) s.dual_tol = *f.dual_tol;
  if (f.refresh) s.refresh_penalty_each_outer = *f.refresh;
  if (f.patch) cfg.patches.patch = *f.patch;
  if (f.overlap) cfg.patches.overlap = *f.overlap;
  if (f.radius) cfg.features.window_radius = *f.radius;
  if (!f.metric.empty()) std::copy(f.metric.begin(), f.metric.end(), cfg.features.metric_diag.begin());
  if (f.per_channel_graph) cfg.patches.per_channel_graph = *f.per_channel_graph;
  if (f.timing) cfg.timing = *f.timing;
  if (f.seed) cfg.seed = *f.seed;
  if (f.sigma) cfg.sigma = *f.sigma;
  if (!f.sigmas.empty()) cfg.sigmas = f.sigmas;
  if (!f.methods.empty()) cfg.methods = parse_methods(f.methods);
  if (!f.mu_grid.empty()) cfg.mu_grid = f.mu_grid;
  if (!f.rho_grid.empty()) cfg.rho_grid = f.rho_grid;

  s.validate();
  cfg.features.validate();
  if (cfg.patches.patch < 2) throw std::invalid_argument("patch size must be >= 2");
  if (cfg.patches.overlap < 0 || cfg.patches.overlap >= cfg.patches.patch)
    throw std::invalid_argument("overlap must lie in [0, patch)");
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw std::invalid_argument("--seed is required when noise is added");
  return *cfg.seed;
}

// Writes to the report file when one is configured, else to out.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open report " + path);
    }
  }
  std::ostream& stream(std::ostream& fallback) { return file_.is_open() ? file_ : fallback; }

 private:
  std::ofstream file_;
};

std::vector<fs::path> list_images(const std::string& dir) {
  if (dir.empty()) throw std::invalid_argument("--input-dir is required");
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(k) for k in [0, count) on a bounded pool.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) fn(k);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (n <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::string timing_field(const RunConfig& cfg, double seconds) { return cfg.timing ? fmt(seconds) : ""; }

// ---------------------------------------------------------------------------

int cmd_denoise(RunConfig& cfg, std::ostream& out) {
  if (cfg.input.empty() || cfg.output.empty()) throw std::invalid_argument("--input and --output are required");
  const Image clean = load_image(cfg.input);
  const std::uint64_t seed = cfg.sigma > 0.0 ? require_seed(cfg) : cfg.seed.value_or(0);
  cfg.patches.threads = worker_threads();

  Image restored;
  Image noisy;
  const auto ev = evaluate(clean, cfg.sigma, seed, cfg.method, cfg, &restored, &noisy);
  save_image(restored, cfg.output);
  if (!cfg.noisy_output.empty()) save_image(noisy, cfg.noisy_output);

  Sink sink(cfg.report);
  auto& os = sink.stream(out);
  os << "schema,image,sigma,method,psnr,ssim,seconds\n";
  os << kSchemaVersion << ',' << fs::path(cfg.input).filename().string() << ',' << fmt(cfg.sigma) << ','
     << method_name(cfg.method) << ',' << fmt(ev.psnr) << ',' << fmt(ev.ssim) << ','
     << timing_field(cfg, ev.seconds) << '\n';
  return kOk;
}

int cmd_certify(RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!cfg.mu_given) throw std::invalid_argument("certify needs --mu (or mu in the config file)");
  Graph g;
  Signal x_ref;
  if (!cfg.graph_path.empty() || !cfg.signal_path.empty()) {
    if (cfg.graph_path.empty() || cfg.signal_path.empty())
      throw std::invalid_argument("--graph and --signal go together");
    g = load_graph(cfg.graph_path);
    x_ref = load_signal(cfg.signal_path);
    if (x_ref.size() != g.num_nodes()) throw IoError("signal length does not match the graph");
  } else if (!cfg.input.empty()) {
    const Image lum = load_image(cfg.input).luminance();
    g = grid_graph(lum, cfg.features);
    x_ref = lum.pixels;
  } else {
    throw std::invalid_argument("certify needs --input IMAGE or --graph FILE --signal FILE");
  }

  const CertResult c = certify(g, x_ref, cfg.solver.mu, cfg.solver);
  if (c.warning) err << "warning: no certified MC parameter at or above a_floor\n";
  Sink sink(cfg.report);
  auto& os = sink.stream(out);
  os << "schema,a_l,a_u,a_star,bound,capped\n";
  os << kSchemaVersion << ',' << fmt(c.a_l) << ',' << fmt(c.a_u) << ',' << fmt(c.a_star) << ','
     << fmt(c.bound_at_a_star) << ',' << (c.capped ? "true" : "false") << '\n';
  return kOk;
}

struct SynthArgs {
  std::string kind = "signal";
  Index n = 256;
  Index pieces = 8;
  int width = 64;
  int height = 64;
  std::string graph_output;
};

int cmd_synth(RunConfig& cfg, const SynthArgs& sa, std::ostream& out) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.output.empty()) throw std::invalid_argument("--output is required");
  if (sa.kind == "signal") {
    const auto pwc = synth_pwc(sa.n, sa.pieces, {0.0, 1.0}, seed);
    save_signal(cfg.output, pwc.values);
    if (!cfg.noisy_output.empty()) {
      Image row(static_cast<int>(sa.n), 1, 1);
      row.pixels = pwc.values;
      save_signal(cfg.noisy_output, add_awgn(row, cfg.sigma, seed + 1).pixels);
    }
    if (!sa.graph_output.empty()) save_graph(sa.graph_output, path_graph(sa.n));
    out << "breakpoints";
    for (Index b : pwc.breakpoints) out << ' ' << b;
    out << '\n';
  } else if (sa.kind == "image") {
    const Image img = synth_step_image(sa.width, sa.height, static_cast<int>(sa.pieces), seed);
    save_image(img, cfg.output);
    if (!cfg.noisy_output.empty()) save_image(add_awgn(img, cfg.sigma, seed + 1).clamped(), cfg.noisy_output);
  } else {
    throw std::invalid_argument("--kind must be signal or image");
  }
  return kOk;
}

struct Loaded {
  std::string name;
  Image image;
  std::size_t index;
};

std::vector<Loaded> load_dir(const std::string& dir, std::ostream& err) {
  std::vector<Loaded> images;
  const auto paths = list_images(dir);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    try {
      images.push_back({paths[k].filename().string(), load_image(paths[k].string()), k});
    } catch (const IoError& e) {
      err << "warning: skipping " << paths[k].string() << ": " << e.what() << '\n';
    }
  }
  if (images.empty()) throw IoError("no readable images in " + dir);
  return images;
}

int cmd_bench(RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = require_seed(cfg);
  const auto images = load_dir(cfg.input_dir, err);
  cfg.patches.threads = 1;

  const std::size_t per_image = cfg.sigmas.size() * cfg.methods.size();
  std::vector<Evaluation> evals(images.size() * per_image);
  std::vector<std::exception_ptr> errors(images.size());
  parallel_for(images.size(), worker_threads(), [&](std::size_t k) {
    try {
      std::size_t slot = k * per_image;
      for (double sigma : cfg.sigmas)
        for (Method m : cfg.methods)
          evals[slot++] = evaluate(images[k].image, sigma, noise_seed(seed, images[k].index, sigma), m, cfg);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Sink sink(cfg.report);
  auto& os = sink.stream(out);
  os << "schema,image,sigma,method,psnr,ssim,seconds\n";
  std::size_t slot = 0;
  for (const auto& img : images)
    for (double sigma : cfg.sigmas)
      for (Method m : cfg.methods) {
        const auto& ev = evals[slot++];
        os << kSchemaVersion << ',' << img.name << ',' << fmt(sigma) << ',' << method_name(m) << ','
           << fmt(ev.psnr) << ',' << fmt(ev.ssim) << ',' << timing_field(cfg, ev.seconds) << '\n';
      }

  if (!cfg.plot_dir.empty()) {
    fs::create_directories(cfg.plot_dir);
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const auto path = fs::path(cfg.plot_dir) / (method_name(cfg.methods[mi]) + ".dat");
      std::ofstream dat(path);
      if (!dat) throw IoError("cannot write " + path.string());
      dat << "# sigma mean_psnr mean_ssim\n";
      for (std::size_t si = 0; si < cfg.sigmas.size(); ++si) {
        double p = 0.0;
        double s = 0.0;
        for (std::size_t k = 0; k < images.size(); ++k) {
          const auto& ev = evals[k * per_image + si * cfg.methods.size() + mi];
          p += ev.psnr;
          s += ev.ssim;
        }
        dat << fmt(cfg.sigmas[si]) << ' ' << fmt(p / images.size()) << ' ' << fmt(s / images.size()) << '\n';
      }
    }
  }
  return kOk;
}

int cmd_gridsearch(RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.mu_grid.empty()) cfg.mu_grid = {cfg.solver.mu};
  if (cfg.rho_grid.empty()) cfg.rho_grid = {cfg.solver.rho};
  const auto images = load_dir(cfg.input_dir, err);
  cfg.patches.threads = 1;

  struct Point {
    double mu;
    double rho;
  };
  std::vector<Point> grid;
  for (double mu : cfg.mu_grid)
    for (double rho : cfg.rho_grid) grid.push_back({mu, rho});

  std::vector<Evaluation> evals(images.size() * grid.size());
  std::vector<std::exception_ptr> errors(images.size());
  parallel_for(images.size(), worker_threads(), [&](std::size_t k) {
    try {
      for (std::size_t p = 0; p < grid.size(); ++p) {
        RunConfig local = cfg;
        local.solver.mu = grid[p].mu;
        local.solver.rho = grid[p].rho;
        local.solver.validate();
        evals[k * grid.size() + p] = evaluate(images[k].image, cfg.sigma, noise_seed(seed, images[k].index, cfg.sigma),
                                              cfg.method, local);
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  });
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Sink sink(cfg.report);
  auto& os = sink.stream(out);
  os << "schema,image,sigma,method,mu,rho,psnr,ssim,seconds\n";
  for (std::size_t k = 0; k < images.size(); ++k)
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const auto& ev = evals[k * grid.size() + p];
      os << kSchemaVersion << ',' << images[k].name << ',' << fmt(cfg.sigma) << ',' << method_name(cfg.method) << ','
         << fmt(grid[p].mu) << ',' << fmt(grid[p].rho) << ',' << fmt(ev.psnr) << ',' << fmt(ev.ssim) << ','
         << timing_field(cfg, ev.seconds) << '\n';
    }

  std::size_t best = 0;
  double best_psnr = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double mean = 0.0;
    for (std::size_t k = 0; k < images.size(); ++k) mean += evals[k * grid.size() + p].psnr;
    mean /= static_cast<double>(images.size());
    if (mean > best_psnr) {
      best_psnr = mean;
      best = p;
    }
  }
  out << "best,method,mu,rho,mean_psnr\n";
  out << "best," << method_name(cfg.method) << ',' << fmt(grid[best].mu) << ',' << fmt(grid[best].rho) << ','
      << fmt(best_psnr) << '\n';
  return kOk;
}

}  // namespace

// ---------------------------------------------------------------------------

void apply_json(RunConfig& cfg, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw IoError("config: top level must be an object");
  auto& s = cfg.solver;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "method") cfg.method = parse_method(v.get<std::string>());
      else if (key == "methods") cfg.methods = parse_methods(v.get<std::vector<std::string>>());
      else if (key == "mu") { s.mu = v.get<double>(); cfg.mu_given = true; }
      else if (key == "rho") s.rho = v.get<double>();
      else if (key == "gamma") s.gamma = v.get<double>();
      else if (key == "lambda") s.lambda = v.get<double>();
      else if (key == "eps") s.eps = v.get<double>();
      else if (key == "a_max") s.a_max = v.get<double>();
      else if (key == "a_floor") s.a_floor = v.get<double>();
      else if (key == "delta") s.delta = v.get<double>();
      else if (key == "fixed_a") s.fixed_a = v.get<double>();
      else if (key == "cg_tol") s.cg_tol = v.get<double>();
      else if (key == "cg_max_iter") s.cg_max_iter = v.get<int>();
      else if (key == "pgd_inner_iters") s.pgd_inner_iters = v.get<int>();
      else if (key == "outer_max_iter") s.outer_max_iter = v.get<int>();
      else if (key == "primal_tol") s.primal_tol = v.get<double>();
      else if (key == "dual_tol") s.dual_tol = v.get<double>();
      else if (key == "refresh") s.refresh_penalty_each_outer = v.get<bool>();
      else if (key == "sigma") cfg.sigma = v.get<double>();
      else if (key == "sigmas") cfg.sigmas = v.get<std::vector<double>>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "patch") cfg.patches.patch = v.get<int>();
      else if (key == "overlap") cfg.patches.overlap = v.get<int>();
      else if (key == "per_channel_graph") cfg.patches.per_channel_graph = v.get<bool>();
      else if (key == "radius") cfg.features.window_radius = v.get<int>();
      else if (key == "metric") {
        const auto m = v.get<std::vector<double>>();
        if (m.size() != 3) throw IoError("config: metric needs three weights");
        std::copy(m.begin(), m.end(), cfg.features.metric_diag.begin());
      }
      else if (key == "mu_grid") cfg.mu_grid = v.get<std::vector<double>>();
      else if (key == "rho_grid") cfg.rho_grid = v.get<std::vector<double>>();
      else if (key == "timing") cfg.timing = v.get<bool>();
      else throw IoError("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("config: ") + e.what());
  }
}

unsigned worker_threads() {
  if (const char* env = std::getenv("NCGTV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t noise_seed(std::uint64_t base, std::size_t image_index, double sigma) {
  std::uint64_t h = base * 0x9E3779B97F4A7C15ull;
  h ^= (static_cast<std::uint64_t>(image_index) + 0x632BE59BD9B4E019ull) + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(std::llround(sigma * 1000.0)) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
  return h;
}

Evaluation evaluate(const Image& clean, double sigma, std::uint64_t seed, Method method, const RunConfig& cfg,
                    Image* restored, Image* noisy) {
  const Image y = add_awgn(clean, sigma, seed);
  const auto t0 = std::chrono::steady_clock::now();
  Image x = denoise_image(y, method, cfg.solver, cfg.features, cfg.patches);
  const auto t1 = std::chrono::steady_clock::now();
  x = x.clamped();

  Evaluation ev{};
  ev.psnr = psnr(clean, x);
  ev.ssim = (clean.width >= 11 && clean.height >= 11) ? ssim(clean, x) : std::numeric_limits<double>::quiet_NaN();
  ev.seconds = std::chrono::duration<double>(t1 - t0).count();
  if (restored) *restored = std::move(x);
  if (noisy) *noisy = y.clamped();
  return ev;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph signal denoising with non-convex graph total variation", "ncgtv"};
  app.require_subcommand(1);

  RunConfig cfg;
  Flags flags;
  SynthArgs synth;

  auto* denoise = app.add_subcommand("denoise", "add noise to an image, restore it and report PSNR/SSIM");
  add_solver_flags(denoise, flags);
  denoise->add_option("--input", cfg.input, "clean input image (PGM/PPM)")->required();
  denoise->add_option("--output", cfg.output, "restored image")->required();
  denoise->add_option("--noisy-output", cfg.noisy_output, "also save the noisy image");
  denoise->add_option("--sigma", flags.sigma, "noise level on the 0-255 scale");
  denoise->add_option("--report", cfg.report, "CSV report path (default stdout)");

  auto* cert = app.add_subcommand("certify", "print the certified MC parameter for a reference signal");
  add_solver_flags(cert, flags);
  cert->add_option("--input", cfg.input, "reference image");
  cert->add_option("--graph", cfg.graph_path, "graph file ('N M' then 'i j w' lines)");
  cert->add_option("--signal", cfg.signal_path, "reference signal, one value per node");
  cert->add_option("--report", cfg.report, "CSV report path (default stdout)");

  auto* syn = app.add_subcommand("synth", "generate piecewise-constant test data");
  syn->add_option("--kind", synth.kind, "signal or image");
  syn->add_option("--n", synth.n, "signal length");
  syn->add_option("--pieces", synth.pieces, "number of constant pieces / bands");
  syn->add_option("--width", synth.width);
  syn->add_option("--height", synth.height);
  syn->add_option("--seed", flags.seed)->required();
  syn->add_option("--sigma", flags.sigma, "noise level for --noisy-output");
  syn->add_option("--output", cfg.output)->required();
  syn->add_option("--noisy-output", cfg.noisy_output);
  syn->add_option("--graph-output", synth.graph_output, "write the matching path graph (signals only)");

  auto* bench = app.add_subcommand("bench", "score methods over a directory of images and noise levels");
  add_solver_flags(bench, flags);
  bench->add_option("--input-dir", cfg.input_dir)->required();
  bench->add_option("--sigmas", flags.sigmas, "noise levels, 0-255 scale")->delimiter(',');
  bench->add_option("--methods", flags.methods)->delimiter(',');
  bench->add_option("--report", cfg.report, "CSV report path (default stdout)");
  bench->add_option("--plot-dir", cfg.plot_dir, "write <method>.dat PSNR/SSIM curves here");

  auto* grid = app.add_subcommand("gridsearch", "exhaustive search over mu and rho");
  add_solver_flags(grid, flags);
  grid->add_option("--input-dir", cfg.input_dir)->required();
  grid->add_option("--sigma", flags.sigma, "noise level, 0-255 scale");
  grid->add_option("--mu-grid", flags.mu_grid)->delimiter(',');
  grid->add_option("--rho-grid", flags.rho_grid)->delimiter(',');
  grid->add_option("--report", cfg.report, "CSV report path (default stdout)");

  std::vector<std::string> argv_store;
  argv_store.push_back("ncgtv");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (syn->parsed()) {
      if (flags.seed) cfg.seed = *flags.seed;
      if (flags.sigma) cfg.sigma = *flags.sigma;
      return cmd_synth(cfg, synth, out);
    }
    apply_flags(cfg, flags);
    if (denoise->parsed()) return cmd_denoise(cfg, out);
    if (cert->parsed()) return cmd_certify(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    if (grid->parsed()) return cmd_gridsearch(cfg, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kUsage;
}

}  // namespace ncgtv::cli
