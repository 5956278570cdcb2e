// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace b2dr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Polyline2 = std::vector<Vec2>;

struct BoxDims {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;

  bool operator==(const BoxDims&) const = default;
};

/// A dynamic or parked road user. `center` is the box centroid in the global
/// frame; motion is planar.
struct AgentBox {
  std::string id;
  Vec3 center = Vec3::Zero();
  BoxDims dims;
  double yaw = 0.0;
  Vec2 velocity = Vec2::Zero();
  std::size_t class_id = 0;
  Polyline2 route;
  std::optional<double> target_speed;
  bool dynamic = false;
  /// Arc length along `route` of the last IDM update.
  double route_progress = 0.0;

  double speed() const { return velocity.norm(); }

  /// Eight corners: bottom face counter-clockwise from front-left, then the
  /// top face in the same order.
  std::array<Vec3, 8> corners() const;

  /// Four planar footprint corners in the same order as the bottom face.
  std::array<Vec2, 4> footprint() const;

  bool operator==(const AgentBox&) const = default;
};

enum class ElementKind { kPolygon, kLinestring };

struct MapElement {
  std::string id;
  Polyline2 vertices;
  std::size_t class_id = 0;
  ElementKind kind = ElementKind::kLinestring;

  bool operator==(const MapElement&) const = default;
};

struct EgoState {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;
  /// Signed longitudinal speed.
  double velocity = 0.0;
  double acceleration = 0.0;
  double steering_angle = 0.0;
  double time = 0.0;

  /// Planar rigid transform taking homogeneous ego coordinates to global.
  Mat3 ego_to_global() const;

  bool operator==(const EgoState&) const = default;
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  bool operator==(const CameraIntrinsics&) const = default;
};

/// A pinhole camera. `extrinsic` maps ego coordinates (x forward, y left,
/// z up) into the camera frame (x right, y down, z along the optical axis).
struct Camera {
  std::string name;
  CameraIntrinsics intrinsics;
  Mat4 extrinsic = Mat4::Identity();
  int width = 0;
  int height = 0;
  /// Combined ego-to-image-homogeneous matrix, as stored in the scenario.
  Mat4 K = Mat4::Identity();

  Mat4 intrinsic_matrix() const;
  Mat4 composed_K() const { return intrinsic_matrix() * extrinsic; }

  /// K for an image resampled to (w, h), with pixel centers kept aligned.
  Mat4 K_at(int w, int h) const;

  bool operator==(const Camera&) const = default;
};

struct CameraRig {
  std::vector<Camera> cameras;

  std::optional<std::size_t> index_of(const std::string& name) const;

  bool operator==(const CameraRig&) const = default;
};

struct RecordedFrame {
  Vec2 coord = Vec2::Zero();
  double heading = 0.0;
  /// One path per rig camera, in rig order, relative to the scenario file.
  std::vector<std::string> image_refs;
  double time = 0.0;

  bool operator==(const RecordedFrame&) const = default;
};

struct ClassTables {
  std::vector<std::string> box;
  std::vector<std::string> map;
  /// Map class ids whose polygons form the drivable area.
  std::vector<std::size_t> drivable;

  std::size_t channel_count() const { return box.size() + map.size(); }

  bool operator==(const ClassTables&) const = default;
};

/// The immutable recorded scenario: retrieval database, rig and initial world.
struct ScenarioLog {
  std::vector<RecordedFrame> frames;
  CameraRig rig;
  std::vector<MapElement> map;
  std::vector<AgentBox> initial_agents;
  Polyline2 ego_route;
  Vec2 goal = Vec2::Zero();
  ClassTables classes;
  BoxDims ego_dims{4.6, 1.9, 1.6};
  /// Directory image_refs are resolved against. Not serialized.
  std::string base_dir;

  bool operator==(const ScenarioLog& o) const {
    return frames == o.frames && rig == o.rig && map == o.map &&
           initial_agents == o.initial_agents && ego_route == o.ego_route && goal == o.goal &&
           classes == o.classes && ego_dims == o.ego_dims;
  }
};

struct WorldState {
  EgoState ego;
  BoxDims ego_dims{4.6, 1.9, 1.6};
  std::vector<AgentBox> agents;
  /// Borrowed from the ScenarioLog, which outlives every WorldState of a run.
  const std::vector<MapElement>* map = nullptr;
  long tick = 0;

  bool operator==(const WorldState& o) const {
    return ego == o.ego && ego_dims == o.ego_dims && agents == o.agents && map == o.map &&
           tick == o.tick;
  }
};

/// Footprint rectangle of the ego at its current pose.
std::array<Vec2, 4> ego_footprint(const EgoState& ego, const BoxDims& dims);

/// The ego expressed as a box, for lead selection and projection.
AgentBox ego_as_box(const EgoState& ego, const BoxDims& dims);

struct Trajectory {
  /// Ego-frame waypoints at plan time, the k-th at (k + 1) * waypoint_dt.
  std::vector<Vec2> waypoints;
  double waypoint_dt = 0.5;
  double plan_time = 0.0;

  double horizon() const { return static_cast<double>(waypoints.size()) * waypoint_dt; }

  bool operator==(const Trajectory&) const = default;
};

}  // namespace b2dr
