// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "b2dr/behavior/ego_tracker.hpp"
#include "b2dr/behavior/idm.hpp"
#include "b2dr/behavior/lead.hpp"
#include "b2dr/behavior/step.hpp"
#include "b2dr/scenario/polyline.hpp"
#include "b2dr/scenario/scenario_io.hpp"
#include "b2dr/scenario/transforms.hpp"
#include "test_support.hpp"

using namespace b2dr;

namespace {

// Bisection on the gap for a = 0 at equal speeds; a(g) increases with g.
double equilibrium_gap(double v, const IdmParams& p) {
  double lo = 1e-6, hi = 1e4;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (idm_acceleration(v, Lead{mid, v}, p) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

AgentBox car(const std::string& id, double x, double v, std::optional<double> target = std::nullopt) {
  AgentBox b;
  b.id = id;
  b.center = Vec3(x, 0, 0.75);
  b.dims = {4.0, 1.8, 1.5};
  b.velocity = Vec2(v, 0);
  b.dynamic = true;
  b.route = {{0, 0}, {5000, 0}};
  b.route_progress = x;
  b.target_speed = target;
  return b;
}

// Ego parked far away so it never enters a corridor.
WorldState empty_world() {
  WorldState w;
  w.ego = pose_state(Vec2(-1000, -1000), 0.0);
  return w;
}

// Brute-force lead: nearest box centre ahead whose centre lies in the corridor.
std::optional<Lead> brute_lead(const AgentBox& agent, const WorldState& world, double lookahead) {
  std::vector<AgentBox> all = world.agents;
  all.push_back(ego_as_box(world.ego, world.ego_dims));
  const PolylinePath path(agent.route);
  std::optional<Lead> best;
  double best_ahead = std::numeric_limits<double>::infinity();
  for (const auto& o : all) {
    if (o.id == agent.id) continue;
    // Dense scan for the nearest point on the route.
    double best_d = std::numeric_limits<double>::infinity(), arc = 0.0;
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const double s = path.length() * i / n;
      const double d = (path.point_at(s) - o.center.head<2>()).norm();
      if (d < best_d) best_d = d, arc = s;
    }
    if (best_d > 0.5 * agent.dims.width + kLeadCorridorMargin) continue;
    const double ahead = arc - agent.route_progress;
    if (ahead <= 0.0 || ahead > lookahead || ahead >= best_ahead) continue;
    best_ahead = ahead;
    best = Lead{ahead - 0.5 * agent.dims.length - 0.5 * o.dims.length,
                o.velocity.dot(path.tangent_at(arc))};
  }
  return best;
}

}  // namespace

TEST_CASE("idm closed-form cases") {
  const IdmParams p;
  CHECK(idm_acceleration(p.v0, std::nullopt, p) == doctest::Approx(0.0));
  CHECK(idm_acceleration(0.0, std::nullopt, p) == doctest::Approx(p.a_max));
  const double s = idm_desired_gap(p.v0, p.v0, p);
  CHECK(idm_acceleration(p.v0, Lead{s, p.v0}, p) == doctest::Approx(-p.a_max));
  CHECK_THROWS_AS(idm_acceleration(5.0, Lead{0.0, 0.0}, p), LeadOverlapError);
  CHECK(p.v0 == 10.0);
  CHECK(p.T_headway == 1.5);
  CHECK(p.s0 == 2.0);
  CHECK(p.a_max == 1.5);
  CHECK(p.b_comf == 2.0);
  CHECK(p.delta == 4.0);
}

TEST_CASE("idm equilibrium gap by bisection") {
  IdmParams p;
  p.v0 = 15.0;
  const double g = equilibrium_gap(10.0, p);
  CHECK(std::abs(idm_acceleration(10.0, Lead{g, 10.0}, p)) < 1e-8);
  // Closed form: gap = s* / sqrt(1 - (v/v0)^delta).
  const double closed = (p.s0 + 10.0 * p.T_headway) / std::sqrt(1.0 - std::pow(10.0 / 15.0, 4));
  CHECK(g == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("idm monotonicity over a grid") {
  const IdmParams p;
  for (double v_lead : {0.0, 5.0, 12.0}) {
    for (double gap = 1.0; gap <= 80.0; gap += 3.0) {
      double prev = std::numeric_limits<double>::infinity();
      for (double v = 0.0; v <= 20.0; v += 0.5) {
        const double a = idm_acceleration(v, Lead{gap, v_lead}, p);
        CHECK(a <= prev + 1e-12);
        prev = a;
      }
    }
    for (double v = 0.0; v <= 20.0; v += 1.0) {
      double prev = -std::numeric_limits<double>::infinity();
      for (double gap = 0.5; gap <= 100.0; gap += 0.5) {
        const double a = idm_acceleration(v, Lead{gap, v_lead}, p);
        CHECK(a >= prev - 1e-12);
        prev = a;
      }
    }
  }
}

TEST_CASE("lead selection") {
  WorldState w = empty_world();
  AgentBox a = car("a", 0.0, 0.0);
  w.agents = {a};
  CHECK_FALSE(select_lead(a, w).has_value());

  AgentBox b = car("b", 20.0, 0.0);
  b.dynamic = false;
  w.agents = {a, b};
  const auto lead = select_lead(a, w);
  REQUIRE(lead.has_value());
  CHECK(lead->gap == doctest::Approx(16.0));
  CHECK(lead->v_lead == doctest::Approx(0.0));
}

TEST_CASE("lead selection matches a brute-force scan on random scenes") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(-10, 90), y(-4, 4), yaw(-3, 3), v(-3, 12);
  for (int scene = 0; scene < 60; ++scene) {
    WorldState w;
    w.ego = pose_state(Vec2(x(rng), y(rng)), yaw(rng));
    AgentBox self;
    self.id = "self";
    self.dims = {4.5, 1.9, 1.5};
    self.route = {{0, 0}, {30, 0}, {60, 15}, {90, 15}};
    self.route_progress = 5.0;
    const PolylinePath path(self.route);
    const Vec2 p0 = path.point_at(5.0);
    self.center = Vec3(p0.x(), p0.y(), 0.75);
    w.agents.push_back(self);
    for (int k = 0; k < 8; ++k) {
      AgentBox o;
      o.id = "o" + std::to_string(k);
      o.center = Vec3(x(rng), y(rng) + (k % 2) * 15.0, 0.75);
      o.dims = {4.0, 1.8, 1.5};
      o.velocity = Vec2(v(rng), v(rng));
      w.agents.push_back(o);
    }
    const auto got = select_lead(self, w, 60.0);
    const auto want = brute_lead(self, w, 60.0);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->gap == doctest::Approx(want->gap).epsilon(1e-3));
      CHECK(got->v_lead == doctest::Approx(want->v_lead).epsilon(1e-6));
    }
  }
}

TEST_CASE("step_agents basics") {
  IdmTable table;
  WorldState w = empty_world();
  AgentBox s = car("s", 10.0, 0.0);
  s.dynamic = false;
  w.agents = {s};
  const WorldState n = step_agents(w, 0.1, table);
  CHECK(n.tick == w.tick + 1);
  WorldState n2 = n;
  n2.tick = w.tick;
  CHECK(n2 == w);

  w.agents = {car("m", 0.0, 10.0)};
  const WorldState m = step_agents(w, 0.1, table);
  CHECK(m.agents[0].center.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(step_agents(w, 0.1, table) == m);
}

TEST_CASE("free-road speed converges to v0") {
  IdmTable table;
  WorldState w = empty_world();
  w.agents = {car("a", 0.0, 0.0)};
  for (int i = 0; i < 600; ++i) w = step_agents(w, 0.1, table);
  CHECK(std::abs(w.agents[0].speed() - table.fallback.v0) < 0.1);
}

TEST_CASE("two-vehicle platoon stays safe and converges to the equilibrium gap") {
  IdmTable table;
  WorldState w = empty_world();
  w.agents = {car("lead", 30.0, 0.0, 6.0), car("follow", 0.0, 0.0)};
  double min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1200; ++i) {
    w = step_agents(w, 0.1, table);
    const double gap = w.agents[0].route_progress - w.agents[1].route_progress - 4.0;
    min_gap = std::min(min_gap, gap);
  }
  const double gap = w.agents[0].route_progress - w.agents[1].route_progress - 4.0;
  const double g_star = equilibrium_gap(6.0, table.fallback);
  CHECK(min_gap > 0.0);
  CHECK(std::abs(gap - g_star) <= 0.05 * g_star);
}

TEST_CASE("platoon never collides for any start gap at or above s0") {
  IdmTable table;
  for (double start_gap : {2.0, 5.0, 20.0, 80.0}) {
    for (double v_follow : {0.0, 8.0, 14.0}) {
      CAPTURE(start_gap);
      CAPTURE(v_follow);
      WorldState w = empty_world();
      w.agents = {car("lead", start_gap + 4.0, 0.0, 3.0), car("follow", 0.0, v_follow)};
      w.agents[0].velocity = Vec2(0, 0);
      double min_gap = start_gap;
      for (int i = 0; i < 1200; ++i) {
        w = step_agents(w, 0.1, table);
        min_gap = std::min(min_gap, w.agents[0].route_progress - w.agents[1].route_progress - 4.0);
      }
      CHECK(min_gap >= 0.0);
    }
  }
}

TEST_CASE("ego tracker interpolation") {
  Trajectory tr;
  tr.waypoints = {{1, 0}, {2, 0}};
  tr.waypoint_dt = 0.5;
  const EgoState origin;
  const EgoState at0 = track_ego_trajectory(tr, origin, 0.0);
  CHECK(at0 == origin);
  const EgoState e = track_ego_trajectory(tr, origin, 0.25);
  CHECK((e.position - Vec2(0.5, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(track_ego_trajectory(tr, origin, 1.5), StalePlanError);
  CHECK_THROWS_AS(track_ego_trajectory(Trajectory{}, origin, 0.1), StalePlanError);
}

TEST_CASE("recorded log replayed through the tracker matches the log") {
  for (const char* name : test::kFixtureNames) {
    CAPTURE(name);
    const ScenarioLog log = load_scenario(test::fixture_path(name));
    const double frame_dt = log.frames[1].time - log.frames[0].time;
    for (std::size_t k = 0; k + 1 < log.frames.size(); ++k) {
      const auto& f = log.frames[k];
      EgoState at_plan = pose_state(f.coord, f.heading);
      at_plan.time = f.time;
      Trajectory tr;
      tr.waypoint_dt = frame_dt;
      for (std::size_t j = k + 1; j < std::min(k + 7, log.frames.size()); ++j)
        tr.waypoints.push_back(global_to_ego(log.frames[j].coord, at_plan));
      // 10 tracker ticks per plan, reading nodes at every waypoint time.
      EgoState prev = at_plan;
      for (int tick = 1; tick <= 10; ++tick) {
        const double tau = tick * tr.horizon() / 10.0;
        if (tau > tr.horizon()) break;
        prev = track_ego_trajectory(tr, at_plan, tau, prev);
        const double u = tau / frame_dt;
        const double r = std::round(u);
        if (std::abs(u - r) < 1e-9 && r >= 1)
          CHECK((prev.position - log.frames[k + static_cast<std::size_t>(r)].coord).norm() < 1e-6);
      }
    }
  }
}
