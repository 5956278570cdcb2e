// SPDX-License-Identifier: Apache-2.0
#include "b2dr/render/protocol.hpp"

#include "b2dr/common/error.hpp"
#include "b2dr/render/image_io.hpp"

namespace b2dr::bridge {

namespace {

json pose_json(const Vec2& p, double heading) { return {{"x", p.x()}, {"y", p.y()}, {"heading", heading}}; }

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }
json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json mat_json(const Mat4& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
  return rows;
}

const json& field(const json& msg, const char* key, const std::string& where) {
  if (!msg.is_object() || !msg.contains(key)) throw ProtocolError(where + ": missing field '" + key + "'");
  return msg.at(key);
}

[[noreturn]] void bad(const std::string& where, const char* key, const char* what) {
  throw ProtocolError(where + ": field '" + key + "' " + what);
}

long integer_field(const json& msg, const char* key, const std::string& where) {
  const json& v = field(msg, key, where);
  if (!v.is_number_integer()) bad(where, key, "must be an integer");
  return v.get<long>();
}

double number_field(const json& msg, const char* key, const std::string& where) {
  const json& v = field(msg, key, where);
  if (!v.is_number()) bad(where, key, "must be a number");
  return v.get<double>();
}

const std::string& string_field(const json& msg, const char* key, const std::string& where) {
  const json& v = field(msg, key, where);
  if (!v.is_string()) bad(where, key, "must be a string");
  return v.get_ref<const std::string&>();
}

const json& array_field(const json& msg, const char* key, const std::string& where) {
  const json& v = field(msg, key, where);
  if (!v.is_array()) bad(where, key, "must be an array");
  return v;
}

Bytes decode_base64_field(const json& v, const std::string& where, const char* key) {
  if (!v.is_string()) bad(where, key, "must be a base64 string");
  try {
    return base64_decode(v.get_ref<const std::string&>());
  } catch (const ParseError& e) {
    throw ProtocolError(where + ": field '" + key + "': " + e.what());
  }
}

Image decode_png_field(const json& v, const std::string& where, const char* key) {
  const Bytes bytes = decode_base64_field(v, where, key);
  try {
    return decode_png(bytes);
  } catch (const ParseError& e) {
    throw ProtocolError(where + ": field '" + key + "': " + e.what());
  }
}

Pose2 decode_pose(const json& v, const std::string& where) {
  return Pose2{Vec2(number_field(v, "x", where), number_field(v, "y", where)), number_field(v, "heading", where)};
}

std::vector<std::string> string_list(const json& v, const std::string& where, const char* key) {
  if (!v.is_array()) bad(where, key, "must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) bad(where, key, "must hold strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

json make_hello(const CameraRig& rig, int width, int height) {
  json cams = json::array();
  for (const auto& c : rig.cameras)
    cams.push_back({{"name", c.name},
                    {"width", c.width},
                    {"height", c.height},
                    {"fx", c.intrinsics.fx},
                    {"fy", c.intrinsics.fy},
                    {"cx", c.intrinsics.cx},
                    {"cy", c.intrinsics.cy},
                    {"extrinsic", mat_json(c.extrinsic)},
                    {"K", mat_json(c.K)}});
  return {{"type", "hello"},
          {"b2dr_bridge_version", kBridgeVersion},
          {"version", kBridgeVersion},
          {"rig", cams},
          {"resolution", {{"width", width}, {"height", height}}}};
}

json make_hello_ack() { return {{"type", "hello_ack"}, {"b2dr_bridge_version", kBridgeVersion}}; }

json make_error(const std::string& message) {
  return {{"type", "error"}, {"b2dr_bridge_version", kBridgeVersion}, {"message", message}};
}

json make_frame(long tick, const std::vector<Image>& images) {
  json list = json::array();
  for (const auto& img : images) list.push_back(base64_encode(encode_png(img)));
  return {{"type", "frame"}, {"b2dr_bridge_version", kBridgeVersion}, {"tick", tick}, {"images", list}};
}

json encode_render(const RenderRequest& req) {
  json prev = json::array();
  for (const auto& p : req.prev_images)
    prev.push_back(p ? json(base64_encode(encode_png(*p))) : json(nullptr));
  json masks = json::array();
  for (const auto& m : req.masks) masks.push_back(base64_encode(encode_mask_pages(m)));
  json refs = json::array();
  for (std::size_t c = 0; c < req.refs.size(); ++c) {
    const auto add = [&](const std::optional<ReferenceImage>& r, RefSide side) {
      if (!r) return;
      refs.push_back({{"camera", req.rig.cameras[c].name},
                      {"side", to_string(side)},
                      {"image", base64_encode(encode_png(r->image))},
                      {"pose", pose_json(r->pose.position, r->pose.heading)},
                      {"offset", r->offset}});
    };
    add(req.refs[c].front, RefSide::kFront);
    add(req.refs[c].rear, RefSide::kRear);
  }
  json boxes = json::array();
  for (const auto& a : req.world.agents)
    boxes.push_back({{"id", a.id},
                     {"class", a.class_id},
                     {"center", vec_json(a.center)},
                     {"dims", json::array({a.dims.length, a.dims.width, a.dims.height})},
                     {"yaw", a.yaw},
                     {"velocity", vec_json(a.velocity)}});
  json map = json::array();
  if (req.world.map != nullptr)
    for (const auto& e : *req.world.map) {
      json verts = json::array();
      for (const auto& v : e.vertices) verts.push_back(vec_json(v));
      map.push_back({{"id", e.id},
                     {"class", e.class_id},
                     {"kind", e.kind == ElementKind::kPolygon ? "polygon" : "linestring"},
                     {"vertices", verts}});
    }
  json msg = {{"type", "render"},
              {"b2dr_bridge_version", kBridgeVersion},
              {"tick", req.world.tick},
              {"seed", req.seed},
              {"prev", prev},
              {"masks", masks},
              {"refs", refs},
              {"ego_pose", pose_json(req.world.ego.position, req.world.ego.heading)},
              {"classes", {{"box", req.classes.box}, {"map", req.classes.map}}},
              {"boxes", boxes},
              {"map", map}};
  if (req.prev_noise_level) msg["prev_noise_level"] = *req.prev_noise_level;
  return msg;
}

json parse_message(const std::string& line) {
  json msg = json::parse(line, nullptr, false);
  if (msg.is_discarded()) throw ProtocolError("message is not valid JSON");
  if (!msg.is_object()) throw ProtocolError("message must be a JSON object");
  string_field(msg, "type", "message");
  return msg;
}

void expect_type(const json& msg, const char* expected) {
  const std::string& type = string_field(msg, "type", "message");
  if (type == expected) return;
  if (type == "error" && msg.contains("message") && msg["message"].is_string())
    throw BackendError("renderer error: " + msg["message"].get<std::string>());
  throw ProtocolError(std::string("message: field 'type' is '") + type + "', expected '" + expected + "'");
}

HelloMessage decode_hello(const json& msg) {
  expect_type(msg, "hello");
  HelloMessage h;
  h.version = static_cast<int>(integer_field(msg, "b2dr_bridge_version", "hello"));
  for (const auto& cam : array_field(msg, "rig", "hello")) h.camera_names.push_back(string_field(cam, "name", "hello.rig"));
  const json& res = field(msg, "resolution", "hello");
  h.width = static_cast<int>(integer_field(res, "width", "hello.resolution"));
  h.height = static_cast<int>(integer_field(res, "height", "hello.resolution"));
  return h;
}

RenderMessage decode_render(const json& msg, const std::vector<std::string>& camera_names) {
  expect_type(msg, "render");
  const std::string where = "render";
  RenderMessage r;
  r.tick = integer_field(msg, "tick", where);
  const json& seed = field(msg, "seed", where);
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) bad(where, "seed", "must be an integer");
  r.seed = seed.get<std::uint64_t>();
  const std::size_t n = camera_names.size();

  const json& masks = array_field(msg, "masks", where);
  if (masks.size() != n) bad(where, "masks", "must hold one entry per camera");
  for (const auto& m : masks) {
    const Bytes bytes = decode_base64_field(m, where, "masks");
    try {
      r.masks.push_back(decode_mask_pages(bytes));
    } catch (const ParseError& e) {
      throw ProtocolError(where + ": field 'masks': " + e.what());
    }
  }

  r.prev.resize(n);
  if (msg.contains("prev") && !msg["prev"].is_null()) {
    const json& prev = array_field(msg, "prev", where);
    if (prev.size() != n) bad(where, "prev", "must hold one entry per camera");
    for (std::size_t i = 0; i < n; ++i)
      if (!prev[i].is_null()) r.prev[i] = decode_png_field(prev[i], where, "prev");
  }
  if (msg.contains("prev_noise_level") && !msg["prev_noise_level"].is_null())
    r.prev_noise_level = static_cast<int>(integer_field(msg, "prev_noise_level", where));

  r.refs.resize(n);
  for (const auto& ref : array_field(msg, "refs", where)) {
    const std::string& cam = string_field(ref, "camera", "render.refs");
    std::size_t idx = n;
    for (std::size_t i = 0; i < n; ++i)
      if (camera_names[i] == cam) idx = i;
    if (idx == n) throw ProtocolError("render.refs: field 'camera' names unknown camera '" + cam + "'");
    const std::string& side = string_field(ref, "side", "render.refs");
    ReferenceImage img{decode_png_field(field(ref, "image", "render.refs"), "render.refs", "image"),
                       decode_pose(field(ref, "pose", "render.refs"), "render.refs.pose"),
                       ref.contains("offset") ? number_field(ref, "offset", "render.refs") : 0.0};
    if (side == "front")
      r.refs[idx].front = std::move(img);
    else if (side == "rear")
      r.refs[idx].rear = std::move(img);
    else
      throw ProtocolError("render.refs: field 'side' must be front or rear");
  }

  r.ego_pose = decode_pose(field(msg, "ego_pose", where), "render.ego_pose");
  if (msg.contains("classes")) {
    const json& cls = msg["classes"];
    r.classes.box = string_list(field(cls, "box", "render.classes"), "render.classes", "box");
    r.classes.map = string_list(field(cls, "map", "render.classes"), "render.classes", "map");
  }
  r.boxes = array_field(msg, "boxes", where);
  r.map = array_field(msg, "map", where);
  return r;
}

std::vector<Image> decode_frame(const json& msg, long expected_tick, std::size_t cameras, int width,
                                int height) {
  expect_type(msg, "frame");
  const long tick = integer_field(msg, "tick", "frame");
  if (tick != expected_tick)
    throw ProtocolError("frame: field 'tick' is " + std::to_string(tick) + ", expected " +
                        std::to_string(expected_tick));
  const json& list = array_field(msg, "images", "frame");
  if (list.size() != cameras)
    throw ProtocolError("frame: field 'images' holds " + std::to_string(list.size()) + " images for " +
                        std::to_string(cameras) + " cameras");
  std::vector<Image> images;
  for (const auto& item : list) {
    Image img = decode_png_field(item, "frame", "images");
    if (img.width != width || img.height != height)
      throw ProtocolError("frame: field 'images' has size " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + ", expected " + std::to_string(width) + "x" +
                          std::to_string(height));
    images.push_back(std::move(img));
  }
  return images;
}

}  // namespace b2dr::bridge
