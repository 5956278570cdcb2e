// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "b2dr/common/error.hpp"
#include "b2dr/diffusion/denoiser.hpp"
#include "b2dr/diffusion/sampler.hpp"
#include "b2dr/render/backend.hpp"
#include "b2dr/render/image_io.hpp"
#include "b2dr/render/oracle.hpp"
#include "b2dr/render/resample.hpp"
#include "b2dr/render/toy.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "render_support.hpp"
#include "test_support.hpp"

using namespace b2dr;
using test::recorded_request;
using test::RequestOptions;

namespace {

struct Fixture {
  ScenarioLog log;
  ImageStore store;
  explicit Fixture(const char* name) : log(load_scenario(test::fixture_path(name))), store(log.base_dir) {}
};

Image random_image(int W, int H, std::uint64_t seed, bool bytes = true) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> u(0, 255);
  Image img(3, H, W);
  for (double& v : img.data) v = bytes ? u(rng) / 255.0 : u(rng) / 255.0 + 0.001;
  return img;
}

// The channel that ends up on top: any box channel beats map channels, and
// within a group the higher channel index is painted last.
int top_channel(const ControlMaskStack& m, int n_box, int y, int x) {
  for (int ch = n_box - 1; ch >= 0; --ch)
    if (m.at(ch, y, x)) return ch;
  for (int ch = m.channels - 1; ch >= n_box; --ch)
    if (m.at(ch, y, x)) return ch;
  return -1;
}

}  // namespace

TEST_CASE("unknown backend id is a configuration error") {
  Fixture f("straight");
  CHECK_THROWS_AS(make_backend("neural", f.log.rig), ConfigError);
  CHECK_NOTHROW(make_backend("oracle", f.log.rig));
  CHECK_NOTHROW(make_backend("toy", f.log.rig));
}

TEST_CASE("oracle render is deterministic and pure") {
  Fixture f("straight");
  const RenderRequest req = recorded_request(f.log, 4, f.store);
  auto backend = make_backend("oracle", f.log.rig);
  const RenderedFrame a = render_frame(*backend, req);
  const RenderedFrame b = render_frame(*backend, recorded_request(f.log, 9, f.store));
  const RenderedFrame c = render_frame(*backend, req);
  REQUIRE(a.images.size() == f.log.rig.cameras.size());
  for (std::size_t i = 0; i < a.images.size(); ++i) CHECK(image_checksum(a.images[i]) == image_checksum(c.images[i]));
  CHECK(a.backend_id == "oracle");
  CHECK(a.tick == 4);
  CHECK(image_checksum(a.images[0]) != image_checksum(b.images[0]));
}

TEST_CASE("backends share one output contract") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    Fixture f(name);
    const RenderRequest req = recorded_request(f.log, 3, f.store);
    for (const char* id : {"oracle", "toy"}) {
      CAPTURE(id);
      auto backend = make_backend(id, f.log.rig);
      const RenderedFrame out = render_frame(*backend, req);
      REQUIRE(out.images.size() == f.log.rig.cameras.size());
      for (std::size_t c = 0; c < out.images.size(); ++c) {
        const Image& img = out.images[c];
        CHECK(img.channels == 3);
        CHECK(img.width == f.log.rig.cameras[c].width);
        CHECK(img.height == f.log.rig.cameras[c].height);
        CHECK(out.render_images[c].width == req.width);
        CHECK(out.render_images[c].height == req.height);
        for (double v : img.data) REQUIRE((v >= 0.0 && v <= 1.0));
      }
      CHECK(out.timing_ms >= 0.0);
    }
  }
}

TEST_CASE("oracle with no references and no layout is the horizon gradient") {
  Fixture f("straight");
  RequestOptions o;
  o.refs = false;
  o.prev = false;
  RenderRequest req = test::without_masks(recorded_request(f.log, 0, f.store, o));
  const auto images = raster_oracle_render(req);
  const Image g = horizon_gradient(req.width, req.height);
  for (const auto& img : images) CHECK(img == g);
  for (int c = 0; c < 3; ++c) {
    CHECK(g.at(c, 0, 17) == kSkyColor[c]);
    CHECK(g.at(c, req.height - 1, 17) == doctest::Approx(kGroundColor[c]).epsilon(1e-15));
    for (int v = 1; v < req.height; ++v) CHECK(g.at(c, v, 0) == g.at(c, v, req.width - 1));
  }
}

TEST_CASE("oracle paints palette colours exactly at mask pixels") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    Fixture f(name);
    for (std::size_t k : {std::size_t{0}, f.log.frames.size() / 2}) {
      const RenderRequest req = recorded_request(f.log, k, f.store);
      const auto images = raster_oracle_render(req);
      const int n_box = static_cast<int>(req.classes.box.size());
      std::size_t painted = 0;
      for (std::size_t c = 0; c < images.size(); ++c) {
        // Independent rasterization from the world, not the request's masks.
        const ControlMaskStack masks = rasterize_controls(req.world.agents, f.log.map, req.world.ego,
                                                          req.rig.cameras[c].K_at(req.width, req.height),
                                                          req.classes, req.height, req.width);
        CHECK(masks == req.masks[c]);
        const Image bg = reference_background(req.rig.cameras[c], req.world.ego, req.refs[c], req.width, req.height);
        for (int y = 0; y < req.height; ++y)
          for (int x = 0; x < req.width; ++x) {
            const int ch = top_channel(masks, n_box, y, x);
            for (int col = 0; col < 3; ++col) {
              const double want = ch < 0 ? bg.at(col, y, x) : palette_color(ch, req.classes)[col];
              if (images[c].at(col, y, x) != want) FAIL_CHECK("pixel " << x << "," << y << " channel " << ch);
            }
            painted += ch >= 0;
          }
      }
      CHECK(painted > 0);
    }
  }
}

TEST_CASE("references at the current pose reproduce the blended references") {
  Fixture f("curve");
  RequestOptions o;
  o.prev = false;
  RenderRequest req = test::without_masks(recorded_request(f.log, 6, f.store, o));
  const Pose2 here{req.world.ego.position, req.world.ego.heading};
  const Image a = random_image(req.width, req.height, 1);
  const Image b = random_image(req.width, req.height, 2);
  for (auto& r : req.refs) {
    r.front = ReferenceImage{a, here, 0.0};
    r.rear = ReferenceImage{b, here, -3.0};
  }
  const double wa = 1.0 / (0.0 + kBlendEpsilon), wb = 1.0 / (3.0 + kBlendEpsilon);
  const auto images = raster_oracle_render(req);
  for (const auto& img : images) {
    std::size_t mismatched = 0;
    for (int col = 0; col < 3; ++col)
      for (int y = 0; y < req.height; ++y)
        for (int x = 0; x < req.width; ++x) {
          double acc = 0.0;
          acc += wa * a.at(col, y, x);
          acc += wb * b.at(col, y, x);
          mismatched += img.at(col, y, x) != acc / (wa + wb);
        }
    CHECK(mismatched == 0);
  }
}

TEST_CASE("oracle foreground recovers the mask blocks at the pinned threshold") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    Fixture f(name);
    const RenderRequest req = recorded_request(f.log, f.log.frames.size() / 3, f.store);
    for (std::size_t c = 0; c < req.rig.cameras.size(); ++c) {
      const test::CellIou r = test::oracle_foreground_iou(req, c);
      CAPTURE(c);
      CHECK(r.truth > 0);
      CHECK(r.iou >= 0.98);
    }
  }
}

TEST_CASE("toy renderer is deterministic under a fixed seed") {
  Fixture f("crossing");
  const RenderRequest req = recorded_request(f.log, 5, f.store);
  ToyBackend toy;
  CHECK(toy.render(req) == toy.render(req));
  RenderRequest other = req;
  other.seed = req.seed + 1;
  CHECK(toy.render(req) != toy.render(other));
}

TEST_CASE("toy renderer foreground follows the control masks") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    Fixture f(name);
    for (std::size_t k : {f.log.frames.size() / 3, 2 * f.log.frames.size() / 3}) {
      const RenderRequest req = recorded_request(f.log, k, f.store);
      for (std::size_t c = 0; c < req.rig.cameras.size(); ++c) {
        const test::CellIou r = test::toy_foreground_iou(req, c);
        CAPTURE(k);
        CAPTURE(c);
        CAPTURE(r.truth);
        CAPTURE(r.predicted);
        if (r.truth == 0) continue;
        CHECK(r.iou >= 0.5);
      }
    }
  }
}

TEST_CASE("reference guidance matters exactly when references are present") {
  Fixture f("straight");
  ToyConfig s0, s2;
  s0.reference_scale = 0.0;
  s2.reference_scale = 2.0;
  const NoiseSchedule& sched = default_schedule();
  const RenderRequest with_refs = recorded_request(f.log, 7, f.store);
  RequestOptions o;
  o.refs = false;
  const RenderRequest no_refs = recorded_request(f.log, 7, f.store, o);
  CHECK(toy_diffusion_render(with_refs, s0, sched) != toy_diffusion_render(with_refs, s2, sched));
  CHECK(toy_diffusion_render(no_refs, s0, sched) == toy_diffusion_render(no_refs, s2, sched));
}

TEST_CASE("toy renderer without conditions is unconditional sampling from the prior") {
  Fixture f("straight");
  RequestOptions o;
  o.refs = false;
  o.prev = false;
  const NoiseSchedule& sched = default_schedule();
  const ToyConfig cfg;
  const Field prior = encode_latent(horizon_gradient(kDefaultRenderWidth, kDefaultRenderHeight));
  const Denoiser uncond = analytic_gaussian_denoiser(prior, cfg.sigma, sched);
  double sum = 0.0, sum_sq = 0.0, ref_sum = 0.0, ref_sum_sq = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    o.seed = seed;
    const RenderRequest req = test::without_masks(recorded_request(f.log, 2, f.store, o));
    const Field z = toy_diffusion_latent(req, 0, cfg, sched);
    std::mt19937_64 rng(seed * 7919 + 13);
    const Field y = sample(uncond, ConditionSet{}, cfg.steps, sched, rng, prior.channels, prior.height, prior.width);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double r = z.data[i] - prior.data[i];
      const double q = y.data[i] - prior.data[i];
      sum += r, sum_sq += r * r, ref_sum += q, ref_sum_sq += q * q;
      ++n;
    }
  }
  const double mean = sum / n, var = sum_sq / n - mean * mean;
  const double ref_mean = ref_sum / n, ref_var = ref_sum_sq / n - ref_mean * ref_mean;
  // Residual variance is a sample of n Gaussians; 4 standard errors on each side.
  const double se = ref_var * std::sqrt(2.0 / n);
  CHECK(std::abs(mean - ref_mean) <= 4.0 * std::sqrt((var + ref_var) / n));
  CHECK(std::abs(var - ref_var) <= 4.0 * std::sqrt(2.0) * se);
}

TEST_CASE("bicubic upsampling reproduces constants and ramps") {
  Image flat(3, 224, 400, 0.37);
  const Image up = bicubic_upsample(flat, 1600, 900);
  CHECK(up.width == 1600);
  CHECK(up.height == 900);
  CHECK(up.channels == 3);
  for (double v : up.data) REQUIRE(std::abs(v - 0.37) <= 1e-6);

  const int W = 400, H = 224, TW = 1600, TH = 900;
  Image ramp(3, H, W);
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) ramp.at(c, y, x) = (c + 1) * 0.002 * x;
  const Image r = bicubic_upsample(ramp, TW, TH);
  // Interior: the 4-tap support of every sample stays inside the source.
  const double scale = static_cast<double>(W) / TW;
  double worst = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < TH; y += 7)
      for (int x = 0; x < TW; ++x) {
        const double sx = (x + 0.5) * scale - 0.5;
        if (sx < 1.0 || sx > W - 3.0) continue;
        worst = std::max(worst, std::abs(r.at(c, y, x) - (c + 1) * 0.002 * sx));
      }
  CHECK(worst <= 1e-4);

  CHECK_THROWS_AS(bicubic_upsample(flat, 399, 224), ShapeError);
  CHECK_THROWS_AS(bicubic_upsample(flat, 400, 200), ShapeError);
  CHECK(bicubic_upsample(ramp, W, H) == ramp);
}

TEST_CASE("bicubic kernel matches Catmull-Rom weights") {
  // 1-D impulse upsampled 2x: samples at offsets +-0.25 and +-0.75 from the centre.
  Image impulse(1, 1, 8, 0.0);
  impulse.at(0, 0, 4) = 1.0;
  const Image up = bicubic_upsample(impulse, 16, 1);
  auto w = [](double t) {
    t = std::abs(t);
    const double a = -0.5;
    if (t < 1) return (a + 2) * t * t * t - (a + 3) * t * t + 1;
    if (t < 2) return a * t * t * t - 5 * a * t * t + 8 * a * t - 4 * a;
    return 0.0;
  };
  for (int x = 0; x < 16; ++x) {
    const double sx = (x + 0.5) * 0.5 - 0.5;
    CHECK(up.at(0, 0, x) == doctest::Approx(w(sx - 4.0)).epsilon(1e-12));
  }
}

TEST_CASE("png and base64 round trips are byte exact") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Image img = random_image(37 + static_cast<int>(seed), 23, seed);
    const Bytes png = encode_png(img);
    const Image back = decode_png(base64_decode(base64_encode(png)));
    CHECK(image_checksum(back) == image_checksum(img));
    CHECK(back == quantize_8bit(img));
  }
  const Image off = random_image(9, 9, 5, false);
  CHECK(decode_png(encode_png(off)) == quantize_8bit(off));

  for (std::size_t len = 0; len < 40; ++len) {
    Bytes b(len);
    for (std::size_t i = 0; i < len; ++i) b[i] = static_cast<std::uint8_t>(i * 37 + len);
    CHECK(base64_decode(base64_encode(b)) == b);
  }
  CHECK(base64_encode(Bytes{'f', 'o', 'o', 'b'}) == "Zm9vYg==");
  CHECK_THROWS_AS(base64_decode("Zm9v*g=="), ParseError);
  CHECK_THROWS_AS(base64_decode("Zm9"), ParseError);
  CHECK_THROWS_AS(decode_png(Bytes{1, 2, 3}), ParseError);
}

TEST_CASE("mask pages round trip") {
  Fixture f("crossing");
  const RenderRequest req = recorded_request(f.log, 4, f.store);
  for (const auto& m : req.masks) CHECK(decode_mask_pages(encode_mask_pages(m)) == m);
  ControlMaskStack empty(9, 16, 24);
  CHECK(decode_mask_pages(encode_mask_pages(empty)) == empty);
}

TEST_CASE("8-bit quantization") {
  Image img(3, 1, 2);
  img.data = {0.0, 1.0, 0.5, 0.2, -0.3, 1.7};
  const Image q = quantize_8bit(img);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double scaled = q.data[i] * 255.0;
    CHECK(std::abs(scaled - std::round(scaled)) < 1e-9);
    CHECK(q.data[i] >= 0.0);
    CHECK(q.data[i] <= 1.0);
  }
  CHECK(q.data[4] == 0.0);
  CHECK(q.data[5] == 1.0);
  CHECK(quantize_8bit(q) == q);
}

TEST_CASE("request validation") {
  Fixture f("straight");
  const RenderRequest good = recorded_request(f.log, 1, f.store);
  CHECK_NOTHROW(good.check());
  RenderRequest r = good;
  r.width = 0;
  CHECK_THROWS_AS(r.check(), InvariantError);
  r = good;
  r.masks.pop_back();
  CHECK_THROWS_AS(r.check(), ShapeError);
  r = good;
  r.prev_images[0] = Image(3, 10, 10);
  CHECK_THROWS_AS(r.check(), ShapeError);
  r = good;
  r.masks[0] = ControlMaskStack(2, good.height, good.width);
  CHECK_THROWS_AS(r.check(), ShapeError);
  r = good;
  r.prev_noise_level = -1;
  CHECK_THROWS_AS(r.check(), InvariantError);
  r = good;
  r.refs[0].front->image = Image(1, 4, 4);
  CHECK_THROWS_AS(r.check(), ShapeError);
  ToyConfig cfg;
  r = good;
  r.width = 404;
  for (auto& m : r.masks) m = ControlMaskStack(m.channels, r.height, 404);
  for (auto& p : r.prev_images) p.reset();
  CHECK_THROWS_AS(toy_diffusion_render(r, cfg, default_schedule()), ShapeError);
}

TEST_CASE("backend failures carry the backend id") {
  struct Broken : RenderBackend {
    std::string id() const override { return "broken"; }
    std::vector<Image> render(const RenderRequest&) override { throw std::runtime_error("exploded"); }
  };
  struct Short : RenderBackend {
    std::string id() const override { return "short"; }
    std::vector<Image> render(const RenderRequest&) override { return {}; }
  };
  Fixture f("straight");
  const RenderRequest req = recorded_request(f.log, 1, f.store);
  Broken broken;
  Short shrt;
  try {
    render_frame(broken, req);
    FAIL("expected a backend error");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("backend 'broken'") != std::string::npos);
    CHECK(std::string(e.what()).find("exploded") != std::string::npos);
  }
  CHECK_THROWS_AS(render_frame(shrt, req), BackendError);
}
