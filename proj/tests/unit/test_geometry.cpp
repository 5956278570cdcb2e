// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <utility>

#include <Eigen/LU>

#include "b2dr/geometry/attention.hpp"
#include "b2dr/geometry/frustum.hpp"
#include "b2dr/geometry/positional_encoding.hpp"
#include "b2dr/geometry/projection.hpp"
#include "b2dr/geometry/raster.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "b2dr/scenario/transforms.hpp"
#include "test_support.hpp"

using namespace b2dr;

namespace {

Mat4 pinhole(double fx, double fy, double cx, double cy) {
  Mat4 K = Mat4::Identity();
  K(0, 0) = fx;
  K(1, 1) = fy;
  K(0, 2) = cx;
  K(1, 2) = cy;
  return K;
}

const ScenarioLog& straight() {
  static const ScenarioLog log = load_scenario(test::fixture_path("straight"));
  return log;
}

using PixelSet = std::set<std::pair<int, int>>;

PixelSet drawn_pixels(const ControlMaskStack& m, int c) {
  PixelSet s;
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x)
      if (m.at(c, y, x)) s.insert({x, y});
  return s;
}

double directed_hausdorff(const PixelSet& a, const PixelSet& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = INFINITY;
    for (const auto& q : b) {
      const double dx = p.first - q.first, dy = p.second - q.second;
      best = std::min(best, std::sqrt(dx * dx + dy * dy));
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

TokenMatrix random_tokens(int n, int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  TokenMatrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

}  // namespace

TEST_CASE("projection examples") {
  const Mat4 K = pinhole(100, 100, 200, 112);
  const auto on_axis = project_point(Vec3(0, 0, 7), K);
  CHECK(on_axis.u == doctest::Approx(200));
  CHECK(on_axis.v == doctest::Approx(112));
  CHECK(on_axis.depth == doctest::Approx(7));
  const auto p = project_point(Vec3(1, 0, 2), K);
  CHECK(p.u == doctest::Approx(250));
  CHECK(p.v == doctest::Approx(112));
  CHECK(p.depth == doctest::Approx(2));
  CHECK_THROWS_AS(project_point(Vec3(0, 0, -1), K), BehindCameraError);
  CHECK_FALSE(try_project(Vec3(0, 0, 0), K).has_value());
}

TEST_CASE("projection round trip on fixture cameras") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(-80, 80), z(-3, 8);
  for (const Camera& cam : straight().rig.cameras) {
    const Mat4 K_inv = cam.K.inverse();
    int tested = 0;
    while (tested < 10000) {
      const Vec3 p(x(rng), x(rng), z(rng));
      const auto pr = try_project(p, cam.K);
      if (!pr) continue;
      ++tested;
      CHECK((unproject(pr->u, pr->v, pr->depth, K_inv) - p).norm() < 1e-6);
    }
  }
}

TEST_CASE("empty scene rasterizes to zeros with one channel per class") {
  const ScenarioLog& log = straight();
  const Camera& cam = log.rig.cameras[0];
  const auto m = rasterize_controls({}, {}, EgoState{}, cam.K, log.classes, 224, 400);
  CHECK(m.channels == static_cast<int>(log.classes.box.size() + log.classes.map.size()));
  CHECK(std::all_of(m.data.begin(), m.data.end(), [](auto v) { return v == 0; }));
}

TEST_CASE("box raster matches dense edge sampling within one pixel") {
  const ScenarioLog& log = straight();
  const Camera& cam = log.rig.cameras[0];
  const int W = cam.width, H = cam.height;
  AgentBox box;
  box.center = Vec3(5, 0, 0.75);
  box.dims = {4.5, 1.9, 1.5};
  box.class_id = 1;
  const EgoState ego;
  const auto m = rasterize_controls({box}, {}, ego, cam.K, log.classes, H, W);
  for (int c = 0; c < m.channels; ++c)
    if (c != 1) CHECK(m.count(c) == 0);

  PixelSet oracle;
  const auto corners = box.corners();
  for (const auto& e : box_edges()) {
    for (int i = 0; i <= 20000; ++i) {
      const double t = i / 20000.0;
      const Vec3 p = corners[e[0]] + t * (corners[e[1]] - corners[e[0]]);
      const auto pr = try_project(global_to_ego(p, ego), cam.K);
      if (!pr || pr->depth <= kNearClipDepth) continue;
      const int u = static_cast<int>(std::floor(pr->u + 0.5));
      const int v = static_cast<int>(std::floor(pr->v + 0.5));
      if (u >= 0 && u < W && v >= 0 && v < H) oracle.insert({u, v});
    }
  }
  const PixelSet drawn = drawn_pixels(m, 1);
  REQUIRE(!drawn.empty());
  REQUIRE(!oracle.empty());
  CHECK(directed_hausdorff(drawn, oracle) <= 1.0);
  CHECK(directed_hausdorff(oracle, drawn) <= 1.0);
}

TEST_CASE("raster ignores box order within a class and is binary") {
  const ScenarioLog& log = straight();
  const Camera& cam = log.rig.cameras[0];
  const EgoState ego = pose_state(log.frames[3].coord, log.frames[3].heading);
  std::vector<AgentBox> boxes = log.initial_agents;
  const auto a = rasterize_controls(boxes, log.map, ego, cam.K, log.classes, 224, 400);
  std::reverse(boxes.begin(), boxes.end());
  std::mt19937_64 rng(2);
  std::shuffle(boxes.begin(), boxes.end(), rng);
  const auto b = rasterize_controls(boxes, log.map, ego, cam.K, log.classes, 224, 400);
  CHECK(a == b);
  CHECK(std::all_of(a.data.begin(), a.data.end(), [](auto v) { return v <= 1; }));
  std::size_t total = 0;
  for (int c = 0; c < a.channels; ++c) total += a.count(c);
  CHECK(total > 0);
}

TEST_CASE("segments crossing the camera plane are clipped, not wrapped") {
  const Mat4 K = pinhole(100, 100, 50, 50);
  ControlMaskStack m(1, 100, 100);
  // From a point in view to one behind the camera: only the visible part draws.
  draw_segment(m, 0, Vec3(0, 0, 5), Vec3(0, 0, -5), K);
  CHECK(m.count(0) > 0);
  ControlMaskStack behind(1, 100, 100);
  draw_segment(behind, 0, Vec3(1, 0, -1), Vec3(-1, 0, -2), K);
  CHECK(behind.count(0) == 0);
}

TEST_CASE("frustum grid shapes and optical axis") {
  const Mat4 K = pinhole(100, 100, 4, 3);
  const FrustumGrid g = frustum_points(6, 8, 5, {1.0, 60.0}, K);
  CHECK(g.points_hom.size() == 6u * 8 * 5 * 4);
  CHECK(g.points_ego.size() == 6u * 8 * 5 * 3);
  CHECK(g.depth_bins.front() == doctest::Approx(1.0));
  CHECK(g.depth_bins.back() == doctest::Approx(60.0));
  for (std::size_t k = 1; k < g.depth_bins.size(); ++k) CHECK(g.depth_bins[k] > g.depth_bins[k - 1]);
  for (int k = 0; k < 5; ++k) {
    const Vec3 p = g.ego_point(3, 4, k);
    CHECK(std::abs(p.x()) < 1e-12);
    CHECK(std::abs(p.y()) < 1e-12);
    CHECK(p.z() == doctest::Approx(g.depth_bins[k]));
    CHECK(g.points_hom[4 * g.entry(3, 4, k) + 3] == 1.0);
  }
  CHECK(kDefaultDepthBins == 64);
}

TEST_CASE("frustum inverse consistency on fixture cameras") {
  std::mt19937_64 rng(9);
  for (const Camera& cam : straight().rig.cameras) {
    const FrustumGrid g = frustum_points(cam.height, cam.width, kDefaultDepthBins, {}, cam.K);
    std::uniform_int_distribution<int> u(0, cam.width - 1), v(0, cam.height - 1), k(0, g.depth - 1);
    for (int i = 0; i < 10000; ++i) {
      const int uu = u(rng), vv = v(rng), kk = k(rng);
      const auto pr = project_point(g.ego_point(vv, uu, kk), cam.K);
      CHECK(std::abs(pr.u - uu) < 1e-6);
      CHECK(std::abs(pr.v - vv) < 1e-6);
      CHECK(std::abs(pr.depth - g.depth_bins[kk]) < 1e-6);
    }
  }
}

TEST_CASE("positional encoding is deterministic and separates distant pixels") {
  const Camera& cam = straight().rig.cameras[0];
  const Mat4 K = cam.K_at(50, 28);
  const FrustumGrid g = frustum_points(28, 50, 16, {}, K);
  const PeField a = positional_encoding(g, Roi{});
  const PeField b = positional_encoding(frustum_points(28, 50, 16, {}, K), Roi{});
  CHECK(a == b);
  CHECK(a.dim == kDefaultPeDim);
  CHECK(a.encodings.size() == 28u * 50 * kDefaultPeDim);
  for (double e : a.encodings) CHECK(std::isfinite(e));

  // Corner pixels: every bin point differs by well over 1 m.
  const int pairs[2][2] = {{0, 0}, {27, 49}};
  double min_sep = INFINITY;
  for (int k = 0; k < g.depth; ++k)
    min_sep = std::min(min_sep, (g.ego_point(0, 0, k) - g.ego_point(27, 49, k)).norm());
  REQUIRE(min_sep >= 1.0);
  double dist = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.pixel(pairs[0][0], pairs[0][1])[i] - a.pixel(pairs[1][0], pairs[1][1])[i];
    dist += d * d;
  }
  CHECK(std::sqrt(dist) > 1e-6);
}

TEST_CASE("attention: identical keys return the shared value") {
  std::mt19937_64 rng(1);
  const TokenMatrix q = random_tokens(5, 6, rng);
  const TokenMatrix pq = random_tokens(5, 6, rng);
  TokenMatrix h(4, 6), pe = TokenMatrix::Zero(4, 6);
  for (int i = 0; i < 4; ++i) h.row(i) << 1, -2, 3, 0.5, 0, 4;
  const TokenMatrix out = reference_cross_attention(q, pq, h, pe);
  for (int i = 0; i < 5; ++i) CHECK((out.row(i) - h.row(0)).norm() < 1e-12);
}

TEST_CASE("attention: joint permutation of keys and values is exact") {
  std::mt19937_64 rng(4);
  const TokenMatrix q = random_tokens(7, 8, rng), pq = random_tokens(7, 8, rng);
  const TokenMatrix h = random_tokens(9, 8, rng), pe = random_tokens(9, 8, rng);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  TokenMatrix hp(9, 8), pep(9, 8);
  for (int i = 0; i < 9; ++i) {
    hp.row(i) = h.row(perm[i]);
    pep.row(i) = pe.row(perm[i]);
  }
  CHECK(reference_cross_attention(q, pq, h, pe) == reference_cross_attention(q, pq, hp, pep));
}

TEST_CASE("attention: a strongly matching key dominates") {
  const int d = 8;
  TokenMatrix q = TokenMatrix::Zero(1, d), pq = TokenMatrix::Zero(1, d);
  q(0, 0) = 0.6;
  pq(0, 0) = 0.4;  // query after PE addition is e0
  TokenMatrix h = TokenMatrix::Zero(d, d), pe = TokenMatrix::Zero(d, d);
  h(0, 0) = 50.0;
  for (int i = 1; i < d; ++i) h(i, i) = 1.0;
  const TokenMatrix out = reference_cross_attention(q, pq, h, pe);

  // Explicit softmax oracle.
  std::vector<double> s(d);
  for (int j = 0; j < d; ++j) s[j] = (q + pq).row(0).dot(h.row(j) + pe.row(j)) / std::sqrt(d);
  const double m = *std::max_element(s.begin(), s.end());
  double z = 0;
  for (double v : s) z += std::exp(v - m);
  Eigen::RowVectorXd want = Eigen::RowVectorXd::Zero(d);
  for (int j = 0; j < d; ++j) want += std::exp(s[j] - m) / z * h.row(j);
  CHECK((out.row(0) - want).norm() < 1e-12);
  CHECK((out.row(0) - h.row(0)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("attention rows are convex weights") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const TokenMatrix q = random_tokens(6, 5, rng, 2.0), pq = random_tokens(6, 5, rng);
    const TokenMatrix h = random_tokens(11, 5, rng, 2.0), pe = random_tokens(11, 5, rng);
    const TokenMatrix w = attention_weights(q, pq, h, pe);
    const TokenMatrix out = reference_cross_attention(q, pq, h, pe);
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(w.row(i).sum() - 1.0) < 1e-9);
      CHECK(w.row(i).minCoeff() >= 0.0);
      for (int c = 0; c < 5; ++c) {
        CHECK(out(i, c) >= h.col(c).minCoeff() - 1e-12);
        CHECK(out(i, c) <= h.col(c).maxCoeff() + 1e-12);
      }
    }
  }
  TokenMatrix bad(2, 3);
  CHECK_THROWS(reference_cross_attention(bad, bad, TokenMatrix(2, 4), TokenMatrix(2, 4)));
}
