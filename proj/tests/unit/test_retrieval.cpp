// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "b2dr/retrieval/retrieval.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "b2dr/scenario/transforms.hpp"
#include "test_support.hpp"

using namespace b2dr;

namespace {

std::vector<RecordedFrame> frames_at(std::initializer_list<double> xs) {
  std::vector<RecordedFrame> out;
  double t = 0;
  for (double x : xs) {
    RecordedFrame f;
    f.coord = Vec2(x, 0);
    f.time = t++;
    out.push_back(f);
  }
  return out;
}

// Exhaustive scan written independently of the library's loop.
RetrievedPair scan(const std::vector<RecordedFrame>& frames, const Vec2& ego, const Vec2& vel) {
  const Vec2 dir = vel.normalized();
  RetrievedPair best;
  double f_best = INFINITY, r_best = -INFINITY;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const double p = (frames[i].coord - ego).x() * dir.x() + (frames[i].coord - ego).y() * dir.y();
    if (p >= 0 && p < f_best) f_best = p, best.front = i, best.front_offset = p;
    if (p < 0 && p > r_best) r_best = p, best.rear = i, best.rear_offset = p;
  }
  return best;
}

}  // namespace

TEST_CASE("signed offsets") {
  const auto frames = frames_at({-5, 3, 7});
  const auto p = signed_offsets(frames, Vec2(0, 0), Vec2(2, 0));
  REQUIRE(p.size() == 3);
  CHECK(p[0] == doctest::Approx(-5));
  CHECK(p[1] == doctest::Approx(3));
  CHECK(p[2] == doctest::Approx(7));
  CHECK_THROWS_AS(signed_offsets(frames, Vec2(0, 0), Vec2(0, 0)), DegenerateHeadingError);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50, 50);
  std::vector<RecordedFrame> many(200);
  for (auto& f : many) f.coord = Vec2(u(rng), u(rng));
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 ego(u(rng), u(rng)), vel(u(rng), u(rng));
    const auto got = signed_offsets(many, ego, vel);
    const double n = std::hypot(vel.x(), vel.y());
    for (std::size_t i = 0; i < many.size(); ++i) {
      const double want = ((many[i].coord.x() - ego.x()) * vel.x() + (many[i].coord.y() - ego.y()) * vel.y()) / n;
      CHECK(got[i] == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("nearest pair examples") {
  const auto frames = frames_at({-7, -2, 3, 9});
  const auto pr = nearest_pair(frames, Vec2(0, 0), Vec2(1, 0));
  CHECK(pr.rear == 1u);
  CHECK(pr.front == 2u);
  const auto behind = nearest_pair(frames_at({-7, -2, -3}), Vec2(0, 0), Vec2(1, 0));
  CHECK_FALSE(behind.front.has_value());
  CHECK(behind.rear == 1u);
  const auto zero = nearest_pair(frames_at({0, -1}), Vec2(0, 0), Vec2(1, 0));
  CHECK(zero.front == 0u);
}

TEST_CASE("nearest pair matches exhaustive scan and ignores speed scale") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    const ScenarioLog log = load_scenario(test::fixture_path(name));
    std::mt19937_64 rng(17);
    Vec2 lo = log.frames[0].coord, hi = lo;
    for (const auto& f : log.frames) lo = lo.cwiseMin(f.coord), hi = hi.cwiseMax(f.coord);
    std::uniform_real_distribution<double> x(lo.x() - 20, hi.x() + 20), y(lo.y() - 20, hi.y() + 20);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI), speed(1.0, 30), scale(0.2, 100);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
      const Vec2 ego(x(rng), y(rng));
      const double a = ang(rng), s = speed(rng);
      const Vec2 vel = s * Vec2(std::cos(a), std::sin(a));
      const RetrievedPair got = nearest_pair(log.frames, ego, vel);
      const RetrievedPair want = scan(log.frames, ego, vel);
      if (got.front != want.front || got.rear != want.rear) ++mismatches;
      const RetrievedPair scaled = nearest_pair(log.frames, ego, scale(rng) * vel);
      if (scaled.front != got.front || scaled.rear != got.rear) ++mismatches;
      if (got.front) CHECK(got.front_offset >= 0.0);
      if (got.rear) CHECK(got.rear_offset < 0.0);
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("standstill falls back to the heading vector") {
  EgoState e = pose_state(Vec2(0, 0), M_PI / 2);
  e.velocity = 0.0;
  const Vec2 d = retrieval_direction(e);
  CHECK(std::abs(d.x()) < 1e-12);
  CHECK(d.y() == doctest::Approx(1));
  e.velocity = -4.0;
  CHECK(retrieval_direction(e).y() == doctest::Approx(-4));
}

TEST_CASE("interval membership") {
  CHECK(interval_of(1.99) == -1);
  CHECK(interval_of(2.0) == 0);
  CHECK(interval_of(5.0) == 1);
  CHECK(interval_of(10.0) == 2);
  CHECK(interval_of(15.0) == 2);
  CHECK(interval_of(15.01) == -1);
}

TEST_CASE("hierarchical sampling frequencies on a populated fixture") {
  const ScenarioLog log = load_scenario(test::fixture_path("straight"));
  const auto& mid = log.frames[log.frames.size() / 2];
  const Vec2 dir(std::cos(mid.heading), std::sin(mid.heading));
  std::mt19937_64 rng(2024);
  const int n = 100000;
  std::array<int, 3> front{}, rear{};
  for (int i = 0; i < n; ++i) {
    const SampledPair s = hierarchical_sample(log.frames, mid.coord, dir, rng);
    REQUIRE(s.front_interval >= 0);
    REQUIRE(s.rear_interval >= 0);
    ++front[s.front_interval];
    ++rear[s.rear_interval];
    const double fo = s.pair.front_offset, ro = s.pair.rear_offset;
    CHECK(fo > 0.0);
    CHECK(ro < 0.0);
    CHECK(interval_of(std::abs(fo)) == s.front_interval);
    CHECK(interval_of(std::abs(ro)) == s.rear_interval);
  }
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(front[k] / double(n) - kReferenceIntervalProbabilities[k]) <= 0.01);
    CHECK(std::abs(rear[k] / double(n) - kReferenceIntervalProbabilities[k]) <= 0.01);
  }
}

TEST_CASE("hierarchical sampling renormalizes and falls back") {
  std::mt19937_64 rng(1);
  const auto only_near = frames_at({-3, -1, 0.5, 2.5, 4});
  for (int i = 0; i < 2000; ++i) {
    const SampledPair s = hierarchical_sample(only_near, Vec2(0, 0), Vec2(1, 0), rng);
    CHECK(s.front_interval == 0);
    CHECK(s.rear_interval == 0);
    CHECK(std::abs(s.pair.front_offset) >= 2.0);
    CHECK(std::abs(s.pair.front_offset) <= 5.0);
  }
  const auto too_close = frames_at({-1, 0.5});
  const SampledPair s = hierarchical_sample(too_close, Vec2(0, 0), Vec2(1, 0), rng);
  CHECK(s.front_interval == -1);
  CHECK(s.pair.front == 1u);
  CHECK(s.pair.rear == 0u);
}

TEST_CASE("hierarchical sampling is reproducible") {
  const ScenarioLog log = load_scenario(test::fixture_path("curve"));
  EgoState ego = pose_state(log.frames[8].coord, log.frames[8].heading);
  ego.velocity = 5.0;
  std::mt19937_64 a(99), b(99);
  for (int i = 0; i < 500; ++i) {
    const SampledPair x = hierarchical_sample(log, ego, a);
    const SampledPair y = hierarchical_sample(log, ego, b);
    CHECK(x.pair == y.pair);
    CHECK(x.front_interval == y.front_interval);
  }
}
