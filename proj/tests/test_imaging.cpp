#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ncgtv/errors.hpp"
#include "ncgtv/imaging.hpp"
#include "oracles.hpp"

using namespace ncgtv;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h, int c = 1) {
  Image img(w, h, c);
  std::uniform_int_distribution<int> u(0, 255);
  for (auto& v : img.pixels) v = u(rng) / 255.0;
  return img;
}

Image transposed(const Image& img) {
  Image t(img.height, img.width, img.channels);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < img.channels; ++ch) t.at(c, r, ch) = img.at(r, c, ch);
  return t;
}

// Smooth gradient plus texture, so SSIM has structure to compare.
Image textured(int w, int h) {
  Image img(w, h, 1);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) img.at(r, c) = 0.5 + 0.3 * std::sin(0.7 * r) * std::cos(0.4 * c) + 0.01 * c;
  return img;
}

}  // namespace

TEST_CASE("grid_graph examples") {
  FeatureConfig flat;
  flat.metric_diag = {0.0, 0.0, 0.0};
  const Graph g22 = grid_graph(Image(2, 2, 1, 0.3), flat);
  CHECK(g22.num_edges() == 6);
  for (const auto& e : g22.edges()) CHECK(e.w == 1.0);

  FeatureConfig intensity;
  intensity.metric_diag = {1.0, 0.0, 0.0};
  Image two(2, 1, 1);
  two.pixels = {0.0, 1.0};
  const Graph g21 = grid_graph(two, intensity);
  REQUIRE(g21.num_edges() == 1);
  CHECK(g21.edges()[0].w == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  CHECK(grid_graph(Image(3, 3, 1), flat).num_edges() == 20);

  CHECK_THROWS_AS(grid_graph(Image(2, 2, 3), flat), std::invalid_argument);
  FeatureConfig bad;
  bad.window_radius = 0;
  CHECK_THROWS_AS(grid_graph(Image(2, 2, 1), bad), std::invalid_argument);
}

TEST_CASE("grid_graph edge count and weight range") {
  std::mt19937_64 rng(31);
  FeatureConfig fc;
  fc.metric_diag = {10.0, 1.0, 1.0};
  for (int w = 1; w <= 7; ++w)
    for (int h = 1; h <= 5; ++h) {
      const Graph g = grid_graph(random_image(rng, w, h), fc);
      const Index expected = static_cast<Index>(w * (h - 1) + h * (w - 1) + 2 * (w - 1) * (h - 1));
      CHECK(g.num_edges() == expected);
      for (const auto& e : g.edges()) {
        CHECK(e.w > 0.0);
        CHECK(e.w <= 1.0);
      }
      // Connected: the Laplacian has a single zero eigenvalue.
      if (w * h > 1 && w * h <= 35) {
        const auto eig = dense_eigen(laplacian(g));
        CHECK(eig.values[1] > 1e-12);
      }
    }
  // Radius 2 on a 5x5 grid: every pair within Chebyshev distance 2.
  fc.window_radius = 2;
  Index pairs = 0;
  for (int a = 0; a < 25; ++a)
    for (int b = a + 1; b < 25; ++b)
      if (std::abs(a / 5 - b / 5) <= 2 && std::abs(a % 5 - b % 5) <= 2) ++pairs;
  CHECK(grid_graph(Image(5, 5, 1), fc).num_edges() == pairs);
}

TEST_CASE("add_awgn statistics and seeding") {
  const Image clean(1000, 1000, 1, 0.5);
  const double sigma = 30.0;
  const Image noisy = add_awgn(clean, sigma, 99);
  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const double d = noisy.pixels[k] - clean.pixels[k];
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(clean.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) <= 3.0 * (sigma / 255.0) / 1000.0);
  CHECK(std::abs(sd / (sigma / 255.0) - 1.0) <= 0.01);

  const Image small(20, 10, 3, 0.2);
  CHECK(add_awgn(small, 0.0, 5).pixels == small.pixels);
  CHECK(add_awgn(small, 50.0, 5).pixels == add_awgn(small, 50.0, 5).pixels);
  CHECK(add_awgn(small, 50.0, 5).pixels != add_awgn(small, 50.0, 6).pixels);
  CHECK_THROWS_AS(add_awgn(small, -1.0, 5), std::invalid_argument);
}

TEST_CASE("psnr examples") {
  std::mt19937_64 rng(32);
  const Image a = random_image(rng, 9, 7);
  CHECK(psnr(a, a) == kInfinitePsnr);

  Image b(8, 8, 1, 0.2);
  Image c = b;
  for (auto& v : c.pixels) v += 5.0 / 255.0;
  CHECK(std::abs(psnr(b, c) - 34.151) <= 1e-3);
  CHECK(psnr(b, c) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 25.0)));

  const Image d = random_image(rng, 9, 7);
  CHECK(psnr(a, d) == psnr(d, a));
  CHECK(psnr(transposed(a), transposed(d)) == doctest::Approx(psnr(a, d)).epsilon(1e-14));
  CHECK_THROWS_AS(psnr(a, Image(7, 9, 1)), std::invalid_argument);
}

TEST_CASE("ssim examples") {
  const Image t = textured(24, 20);
  CHECK(ssim(t, t) == doctest::Approx(1.0).epsilon(1e-14));

  Image neg = t;
  for (auto& v : neg.pixels) v = 1.0 - v;
  CHECK(ssim(t, neg) < 1.0);

  CHECK_THROWS_AS(ssim(Image(10, 20, 1), Image(10, 20, 1)), std::invalid_argument);
  CHECK_THROWS_AS(ssim(t, Image(20, 24, 1)), std::invalid_argument);
}

TEST_CASE("ssim matches the direct reference on 16x16 fixtures") {
  std::mt19937_64 rng(33);
  const Image base = textured(16, 16);
  for (int k = 0; k < 5; ++k) {
    const Image noisy = add_awgn(base, 10.0 + 10.0 * k, 100 + k);
    const double got = ssim(base, noisy);
    const double want = oracle::reference_ssim(base, noisy);
    CHECK(std::abs(got - want) <= 1e-6);
    CHECK(ssim(transposed(base), transposed(noisy)) == doctest::Approx(got).epsilon(1e-12));
  }
  const Image r1 = random_image(rng, 16, 16);
  const Image r2 = random_image(rng, 16, 16);
  CHECK(std::abs(ssim(r1, r2) - oracle::reference_ssim(r1, r2)) <= 1e-6);
}

TEST_CASE("synth_pwc examples") {
  const auto one = synth_pwc(10, 1, {0.0, 1.0}, 3);
  CHECK(one.breakpoints.empty());
  for (double v : one.values) CHECK(v == one.values[0]);

  const auto step = synth_pwc(8, 2, {0.0, 1.0}, 4);
  REQUIRE(step.breakpoints.size() == 1);
  for (int seed = 0; seed < 30; ++seed) {
    const auto s = synth_pwc(64, 6, {0.1, 0.9}, seed);
    Index changes = 0;
    for (Index i = 1; i < s.values.size(); ++i)
      if (s.values[i] != s.values[i - 1]) ++changes;
    CHECK(changes == 5);
    for (Index b : s.breakpoints) CHECK(s.values[b] != s.values[b - 1]);
  }
  CHECK(synth_pwc(64, 6, {0.1, 0.9}, 8).values == synth_pwc(64, 6, {0.1, 0.9}, 8).values);
  CHECK_THROWS_AS(synth_pwc(4, 0, {0.0, 1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(synth_pwc(4, 5, {0.0, 1.0}, 1), std::invalid_argument);
}

TEST_CASE("pnm round trip") {
  std::mt19937_64 rng(34);
  for (int ch : {1, 3}) {
    const Image img = random_image(rng, 13, 7, ch);
    std::stringstream ss;
    write_pnm(ss, img);
    const Image back = read_pnm(ss);
    CHECK(back.width == 13);
    CHECK(back.height == 7);
    CHECK(back.channels == ch);
    CHECK(back.pixels == img.pixels);
  }
}

TEST_CASE("pnm parsing") {
  std::stringstream p2("P2\n# comment\n1 1\n255\n128\n");
  const Image px = read_pnm(p2);
  CHECK(px.pixels == std::vector<double>{128.0 / 255.0});

  std::stringstream p3("P3 2 1 15 15 0 0 0 15 0\n");
  const Image rgb = read_pnm(p3);
  CHECK(rgb.channels == 3);
  CHECK(rgb.pixels == std::vector<double>{1, 0, 0, 0, 1, 0});

  std::stringstream truncated(std::string("P5\n4 4\n255\n") + std::string(5, 'x'));
  CHECK_THROWS_AS(read_pnm(truncated), IoError);
  std::stringstream deep("P2 1 1 65535 7\n");
  CHECK_THROWS_AS(read_pnm(deep), IoError);
  std::stringstream png("\x89PNG....");
  CHECK_THROWS_AS(read_pnm(png), IoError);
  CHECK_THROWS_AS(load_image("/nonexistent/x.pgm"), IoError);
}

TEST_CASE("tile_starts cover the axis") {
  CHECK(tile_starts(20, 36, 4) == std::vector<int>{0});
  CHECK(tile_starts(36, 36, 4) == std::vector<int>{0});
  for (int extent = 1; extent < 200; ++extent) {
    const auto s = tile_starts(extent, 36, 4);
    CHECK(s.front() == 0);
    if (extent > 36) CHECK(s.back() + 36 == extent);
    for (std::size_t k = 1; k < s.size(); ++k) {
      CHECK(s[k] > s[k - 1]);
      CHECK(s[k] <= s[k - 1] + 32);
    }
  }
  CHECK_THROWS_AS(tile_starts(50, 4, 4), std::invalid_argument);
}

TEST_CASE("denoise_image is deterministic and thread-count independent") {
  const Image clean = synth_step_image(50, 44, 4, 12);
  const Image noisy = add_awgn(clean, 30.0, 13);
  SolverConfig cfg;
  FeatureConfig fc;
  PatchConfig one;
  PatchConfig many;
  many.threads = 3;
  for (Method m : {Method::Ncgtv, Method::Gtv, Method::Glr}) {
    const Image a = denoise_image(noisy, m, cfg, fc, one);
    const Image b = denoise_image(noisy, m, cfg, fc, many);
    CHECK(a.pixels == b.pixels);
    CHECK(psnr(clean, a.clamped()) > psnr(clean, noisy.clamped()));
  }

  // Colour input on a shared luminance graph keeps its channel count.
  Image colour(40, 40, 3);
  for (int ch = 0; ch < 3; ++ch) colour.set_plane(ch, synth_step_image(40, 40, 3, 20 + ch));
  const Image out = denoise_image(add_awgn(colour, 20.0, 3), Method::Gtv, cfg, fc, one);
  CHECK(out.channels == 3);
  CHECK(out.width == 40);
}

TEST_CASE("method names") {
  for (Method m : {Method::Ncgtv, Method::Gtv, Method::Glr}) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("bm3d"), std::invalid_argument);
}
