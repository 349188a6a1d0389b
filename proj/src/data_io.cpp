#include "v2icalib/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "v2icalib/errors.hpp"
#include "v2icalib/geometry.hpp"

namespace v2icalib {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

[[noreturn]] void schema_error(const fs::path& path, const std::string& what) {
  throw SchemaError(path.string() + ": " + what);
}

double as_number(const json& value, const fs::path& path,
                 const std::string& field) {
  if (!value.is_number()) schema_error(path, field + " must be a number");
  return value.get<double>();
}

Eigen::Vector3d as_vector3(const json& value, const fs::path& path,
                           const std::string& field) {
  if (!value.is_array() || value.size() != 3)
    schema_error(path, field + " must be an array of 3 numbers");
  Eigen::Vector3d out;
  for (int k = 0; k < 3; ++k)
    out[k] = as_number(value[static_cast<std::size_t>(k)], path, field);
  return out;
}

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

json matrix_to_json(const Eigen::Matrix4d& m) {
  json rows = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json transform_to_json(const RigidTransform& t) {
  return matrix_to_json(t.matrix());
}

json strategy_to_json(const StrategyConfig& config) {
  json doc;
  doc["affinity_kind"] = std::string(to_string(config.affinity_kind));
  doc["use_confidence_weighting"] = config.use_confidence_weighting;
  doc["oiou_gate"] = config.oiou_gate;
  doc["edge_fusion_weight"] = config.edge_fusion_weight;
  doc["sigma_length"] = config.sigma_length;
  doc["sigma_angle"] = config.sigma_angle;
  doc["use_refinement"] = config.use_refinement;
  doc["refine_max_iterations"] = config.refine_max_iterations;
  doc["refine_convergence_tol"] = config.refine_convergence_tol;
  return doc;
}

// --- seeded generation -----------------------------------------------------
// Everything below uses explicit algorithms (no std::*_distribution) so the
// same seed reproduces the same bytes on any platform.

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Box-Muller, cosine branch only: stateless per call.
double normal(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

struct CategoryShape {
  Category category;
  Eigen::Vector3d base_size;  // length, width, height
};

const std::vector<std::pair<Category, double>>& default_category_mix() {
  static const std::vector<std::pair<Category, double>> mix = {
      {Category::kCar, 0.60},        {Category::kTruck, 0.15},
      {Category::kVan, 0.10},        {Category::kBus, 0.05},
      {Category::kPedestrian, 0.05}, {Category::kCyclist, 0.05},
  };
  return mix;
}

Eigen::Vector3d base_size_of(Category category) {
  switch (category) {
    case Category::kCar:
      return {4.2, 1.9, 1.6};
    case Category::kTruck:
      return {8.5, 2.5, 3.2};
    case Category::kVan:
      return {5.0, 2.0, 2.2};
    case Category::kBus:
      return {11.0, 2.9, 3.3};
    case Category::kPedestrian:
      return {0.7, 0.6, 1.7};
    case Category::kCyclist:
      return {1.8, 0.6, 1.7};
    case Category::kMotorcycle:
      return {2.1, 0.8, 1.4};
    case Category::kOther:
      return {2.0, 2.0, 2.0};
  }
  return {2.0, 2.0, 2.0};
}

Category pick_category(std::mt19937_64& rng,
                       const std::vector<std::pair<Category, double>>& mix) {
  double total = 0.0;
  for (const auto& [category, weight] : mix) total += weight;
  double u = uniform01(rng) * total;
  for (const auto& [category, weight] : mix) {
    u -= weight;
    if (u < 0.0) return category;
  }
  return mix.back().first;
}

/// Fresh ground-standing box with jittered footprint, uniform yaw, and a
/// center sampled in the area square.
Box3D sample_box(std::mt19937_64& rng, const SynthParams& params) {
  const Category category = pick_category(
      rng, params.category_mix.empty() ? default_category_mix()
                                       : params.category_mix);
  const Eigen::Vector3d base = base_size_of(category);
  Eigen::Vector3d size;
  for (int k = 0; k < 3; ++k) size[k] = base[k] * uniform(rng, 0.9, 1.1);
  const double half = params.area / 2.0;
  const double x = uniform(rng, -half, half);
  const double y = uniform(rng, -half, half);
  const double yaw = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return Box3D(category, {x, y, size.z() / 2.0}, size, yaw);
}

/// Separation that keeps boxes disjoint even after vehicle-side noise.
bool placeable(const Box3D& candidate, const std::vector<Box3D>& existing,
               double clearance) {
  const double r_cand = 0.5 * candidate.size.norm();
  for (const Box3D& b : existing) {
    const double min_dist = r_cand + 0.5 * b.size.norm() + clearance;
    if ((candidate.center - b.center).norm() < min_dist) return false;
  }
  return true;
}

double yaw_of(const Eigen::Matrix3d& r) { return std::atan2(r(1, 0), r(0, 0)); }

bool is_yaw_only(const Eigen::Matrix3d& r) {
  const Eigen::Matrix3d pure = rot_z(yaw_of(r));
  return (r - pure).lpNorm<Eigen::Infinity>() < 1e-9;
}

json box_to_json(const Box3D& b) {
  json obj;
  obj["category"] = std::string(to_string(b.category));
  obj["center"] = {b.center.x(), b.center.y(), b.center.z()};
  obj["size"] = {b.size.x(), b.size.y(), b.size.z()};
  obj["yaw"] = b.yaw;
  obj["confidence"] = b.confidence;
  if (b.track_id) obj["track_id"] = *b.track_id;
  return obj;
}

json synth_params_to_json(const SynthParams& p) {
  json doc;
  doc["prng"] = "mt19937_64 seeded via splitmix64; 53-bit uniforms; "
                "Box-Muller normals (cosine branch)";
  doc["seed"] = p.seed;
  doc["n_common"] = p.n_common;
  doc["n_infra_only"] = p.n_infra_only;
  doc["n_vehicle_only"] = p.n_vehicle_only;
  doc["area"] = p.area;
  doc["gt_transform"] =
      p.gt_transform ? transform_to_json(*p.gt_transform) : json(nullptr);
  doc["gt_yaw_range"] = p.gt_yaw_range;
  doc["gt_translation_range"] = p.gt_translation_range;
  doc["noise_center_sigma"] = p.noise_center_sigma;
  doc["noise_yaw_sigma"] = p.noise_yaw_sigma;
  doc["noise_size_sigma"] = p.noise_size_sigma;
  json mix = json::array();
  for (const auto& [category, weight] :
       p.category_mix.empty() ? default_category_mix() : p.category_mix) {
    mix.push_back({{"category", std::string(to_string(category))},
                   {"weight", weight}});
  }
  doc["category_mix"] = std::move(mix);
  return doc;
}

}  // namespace

Scene load_scene(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_array())
    schema_error(path, "scene file must be a JSON array of box objects");

  Scene scene;
  scene.frame_id = path.stem().string();
  scene.boxes.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& item = doc[i];
    const std::string where = "box " + std::to_string(i);
    if (!item.is_object()) schema_error(path, where + " must be an object");
    for (const auto& [key, value] : item.items()) {
      if (key != "category" && key != "center" && key != "size" &&
          key != "yaw" && key != "confidence" && key != "track_id")
        schema_error(path, where + " has unknown field '" + key + "'");
    }
    if (!item.contains("category") || !item["category"].is_string())
      schema_error(path, where + " needs a string 'category'");
    if (!item.contains("center"))
      schema_error(path, where + " needs 'center'");
    if (!item.contains("size")) schema_error(path, where + " needs 'size'");
    if (!item.contains("yaw")) schema_error(path, where + " needs 'yaw'");

    const Category category =
        category_from_string(item["category"].get<std::string>());
    const Eigen::Vector3d center =
        as_vector3(item["center"], path, where + ".center");
    const Eigen::Vector3d size =
        as_vector3(item["size"], path, where + ".size");
    if (!(size.minCoeff() > 0.0))
      schema_error(path, where + ".size must be positive");
    const double yaw = as_number(item["yaw"], path, where + ".yaw");

    double confidence = 1.0;
    if (item.contains("confidence")) {
      confidence = as_number(item["confidence"], path, where + ".confidence");
      if (confidence < 0.0 || confidence > 1.0)
        schema_error(path, where + ".confidence must be within [0, 1]");
    }
    std::optional<std::int64_t> track_id;
    if (item.contains("track_id")) {
      if (!item["track_id"].is_number_integer())
        schema_error(path, where + ".track_id must be an integer");
      track_id = item["track_id"].get<std::int64_t>();
    }
    scene.boxes.emplace_back(category, center, size, yaw, confidence,
                             track_id);
  }
  return scene;
}

void save_scene(const Scene& scene, const fs::path& path) {
  json doc = json::array();
  for (const Box3D& b : scene.boxes) doc.push_back(box_to_json(b));
  write_json(path, doc);
}

namespace {

RigidTransform transform_from_json(const json& doc,
                                   const std::string& context) {
  if (!doc.is_array() || doc.size() != 4)
    throw ParseError(context + ": expected a 4x4 matrix (4 rows)");
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    const json& row = doc[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 4)
      throw ParseError(context + ": row " + std::to_string(r) +
                       " must hold 4 numbers");
    for (int c = 0; c < 4; ++c) {
      const json& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number())
        throw ParseError(context + ": row " + std::to_string(r) +
                         " must hold 4 numbers");
      m(r, c) = cell.get<double>();
    }
  }
  if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).norm() > 1e-12)
    throw ParseError(context + ": bottom row must be (0, 0, 0, 1)");

  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  if ((r.transpose() * r - Eigen::Matrix3d::Identity())
          .lpNorm<Eigen::Infinity>() > 1e-6)
    throw NotRigid(context + ": rotation block is not orthonormal");
  if (r.determinant() < 0.0)
    throw NotRigid(context + ": rotation block is a reflection");

  // Snap to the nearest proper rotation; input may carry up to 1e-6 drift.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RigidTransform out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.translation = m.topRightCorner<3, 1>();
  return out;
}

}  // namespace

RigidTransform load_extrinsic(const fs::path& path) {
  return transform_from_json(read_json(path), path.string());
}

void save_extrinsic(const RigidTransform& transform, const fs::path& path) {
  write_json(path, transform_to_json(transform));
}

StrategyConfig load_strategy(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_object())
    schema_error(path, "strategy file must be a JSON object");

  StrategyConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "affinity_kind") {
      if (!value.is_string())
        schema_error(path, "affinity_kind must be a string");
      try {
        config.affinity_kind = affinity_kind_from_string(
            value.get<std::string>());
      } catch (const ParseError& e) {
        schema_error(path, e.what());
      }
    } else if (key == "use_confidence_weighting") {
      if (!value.is_boolean())
        schema_error(path, "use_confidence_weighting must be a boolean");
      config.use_confidence_weighting = value.get<bool>();
    } else if (key == "oiou_gate") {
      config.oiou_gate = as_number(value, path, key);
      if (config.oiou_gate < 0.0)
        schema_error(path, "oiou_gate must be >= 0");
    } else if (key == "edge_fusion_weight") {
      config.edge_fusion_weight = as_number(value, path, key);
      if (config.edge_fusion_weight < 0.0 || config.edge_fusion_weight > 1.0)
        schema_error(path, "edge_fusion_weight must be within [0, 1]");
    } else if (key == "sigma_length") {
      config.sigma_length = as_number(value, path, key);
      if (config.sigma_length <= 0.0)
        schema_error(path, "sigma_length must be > 0");
    } else if (key == "sigma_angle") {
      config.sigma_angle = as_number(value, path, key);
      if (config.sigma_angle <= 0.0)
        schema_error(path, "sigma_angle must be > 0");
    } else if (key == "use_refinement") {
      if (!value.is_boolean())
        schema_error(path, "use_refinement must be a boolean");
      config.use_refinement = value.get<bool>();
    } else if (key == "refine_max_iterations") {
      if (!value.is_number_integer() || value.get<int>() < 1)
        schema_error(path, "refine_max_iterations must be an integer >= 1");
      config.refine_max_iterations = value.get<int>();
    } else if (key == "refine_convergence_tol") {
      config.refine_convergence_tol = as_number(value, path, key);
      if (config.refine_convergence_tol <= 0.0)
        schema_error(path, "refine_convergence_tol must be > 0");
    } else {
      schema_error(path, "unknown strategy field '" + key + "'");
    }
  }
  return config;
}

void save_strategy(const StrategyConfig& config, const fs::path& path) {
  write_json(path, strategy_to_json(config));
}

SynthParams load_synth_params(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_object())
    schema_error(path, "params file must be a JSON object");

  SynthParams p;
  const auto as_count = [&](const json& value, const char* key) {
    if (!value.is_number_integer() || value.get<int>() < 0)
      schema_error(path, std::string(key) + " must be an integer >= 0");
    return value.get<int>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "prng") {
      if (!value.is_string()) schema_error(path, "prng must be a string");
    } else if (key == "seed") {
      if (!value.is_number_integer())
        schema_error(path, "seed must be an integer");
      p.seed = value.get<std::uint64_t>();
    } else if (key == "n_common") {
      p.n_common = as_count(value, "n_common");
    } else if (key == "n_infra_only") {
      p.n_infra_only = as_count(value, "n_infra_only");
    } else if (key == "n_vehicle_only") {
      p.n_vehicle_only = as_count(value, "n_vehicle_only");
    } else if (key == "area") {
      p.area = as_number(value, path, key);
      if (p.area <= 0.0) schema_error(path, "area must be > 0");
    } else if (key == "gt_transform") {
      if (!value.is_null())
        p.gt_transform =
            transform_from_json(value, path.string() + ": gt_transform");
    } else if (key == "gt_yaw_range") {
      p.gt_yaw_range = as_number(value, path, key);
      if (p.gt_yaw_range < 0.0) schema_error(path, "gt_yaw_range must be >= 0");
    } else if (key == "gt_translation_range") {
      p.gt_translation_range = as_number(value, path, key);
      if (p.gt_translation_range < 0.0)
        schema_error(path, "gt_translation_range must be >= 0");
    } else if (key == "noise_center_sigma") {
      p.noise_center_sigma = as_number(value, path, key);
    } else if (key == "noise_yaw_sigma") {
      p.noise_yaw_sigma = as_number(value, path, key);
    } else if (key == "noise_size_sigma") {
      p.noise_size_sigma = as_number(value, path, key);
    } else if (key == "category_mix") {
      if (!value.is_array()) schema_error(path, "category_mix must be an array");
      for (const json& entry : value) {
        if (!entry.is_object() || !entry.contains("category") ||
            !entry.contains("weight") || !entry["category"].is_string())
          schema_error(path,
                       "category_mix entries need 'category' and 'weight'");
        const double weight = as_number(entry["weight"], path, "weight");
        if (weight < 0.0) schema_error(path, "mix weights must be >= 0");
        p.category_mix.emplace_back(
            category_from_string(entry["category"].get<std::string>()),
            weight);
      }
    } else {
      schema_error(path, "unknown params field '" + key + "'");
    }
  }
  if (p.noise_center_sigma < 0.0 || p.noise_yaw_sigma < 0.0 ||
      p.noise_size_sigma < 0.0)
    schema_error(path, "noise sigmas must be >= 0");
  return p;
}

FramePairRecord synth_scene_pair(const SynthParams& params) {
  if (params.n_common < 0 || params.n_infra_only < 0 ||
      params.n_vehicle_only < 0)
    throw std::invalid_argument("synthetic box counts must be >= 0");
  if (params.area <= 0.0)
    throw std::invalid_argument("placement area must be > 0");
  if (params.noise_center_sigma < 0.0 || params.noise_yaw_sigma < 0.0 ||
      params.noise_size_sigma < 0.0)
    throw std::invalid_argument("noise sigmas must be >= 0");
  if (params.gt_transform && !is_yaw_only(params.gt_transform->rotation))
    throw std::invalid_argument(
        "synthetic ground truth must be a yaw-only rotation (detection "
        "boxes cannot represent roll/pitch)");

  std::mt19937_64 rng(splitmix64(params.seed));

  RigidTransform gt;
  if (params.gt_transform) {
    gt = *params.gt_transform;
  } else {
    gt.rotation =
        rot_z(uniform(rng, -params.gt_yaw_range, params.gt_yaw_range));
    // Uniform in the ball of radius gt_translation_range.
    const double z = uniform(rng, -1.0, 1.0);
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double radius =
        params.gt_translation_range * std::cbrt(uniform01(rng));
    gt.translation = radius * Eigen::Vector3d(rho * std::cos(phi),
                                              rho * std::sin(phi), z);
  }
  const double gt_yaw = yaw_of(gt.rotation);

  // Generous spacing keeps every scene pairwise disjoint even after noise.
  const double clearance =
      1.0 + 6.0 * (params.noise_center_sigma + params.noise_size_sigma);
  constexpr int kMaxTries = 1000;
  const auto place = [&](std::vector<Box3D>& into) -> Box3D& {
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
      Box3D candidate = sample_box(rng, params);
      if (placeable(candidate, into, clearance)) {
        into.push_back(std::move(candidate));
        return into.back();
      }
    }
    throw PlacementFailure(
        "could not place a disjoint box after " +
        std::to_string(kMaxTries) +
        " attempts; grow `area` or reduce box counts");
  };

  FramePairRecord record;
  record.scene_inf.frame_id = "synth_" + std::to_string(params.seed) + "_infra";
  record.scene_veh.frame_id = "synth_" + std::to_string(params.seed) + "_veh";

  for (int k = 0; k < params.n_common; ++k)
    place(record.scene_inf.boxes);

  for (int k = 0; k < params.n_common; ++k) {
    const Box3D& b = record.scene_inf.boxes[static_cast<std::size_t>(k)];
    Eigen::Vector3d center = gt.apply(b.center);
    center += Eigen::Vector3d(normal(rng, params.noise_center_sigma),
                              normal(rng, params.noise_center_sigma),
                              normal(rng, params.noise_center_sigma));
    const double yaw =
        normalize_angle(b.yaw + gt_yaw + normal(rng, params.noise_yaw_sigma));
    Eigen::Vector3d size = b.size;
    for (int axis = 0; axis < 3; ++axis) {
      size[axis] =
          std::max(0.1, size[axis] + normal(rng, params.noise_size_sigma));
    }
    record.scene_veh.boxes.emplace_back(b.category, center, size, yaw,
                                        b.confidence, b.track_id);
  }

  for (int k = 0; k < params.n_infra_only; ++k)
    place(record.scene_inf.boxes);

  for (int k = 0; k < params.n_vehicle_only; ++k) {
    // Sampled in the infrastructure area, then expressed in the vehicle
    // frame so it lands in the same neighborhood as the common objects.
    for (int attempt = 0;; ++attempt) {
      if (attempt >= kMaxTries)
        throw PlacementFailure(
            "could not place a disjoint vehicle-only box after " +
            std::to_string(kMaxTries) + " attempts");
      const Box3D local = sample_box(rng, params);
      const Box3D candidate(local.category, gt.apply(local.center),
                            local.size, normalize_angle(local.yaw + gt_yaw),
                            local.confidence, local.track_id);
      if (placeable(candidate, record.scene_veh.boxes, clearance)) {
        record.scene_veh.boxes.push_back(candidate);
        break;
      }
    }
  }

  record.gt_extrinsic = gt;
  record.difficulty = Difficulty::kUnknown;
  return record;
}

std::vector<FramePairRecord> synth_dataset(const SynthParams& params,
                                           int count) {
  if (count < 0) throw std::invalid_argument("dataset size must be >= 0");
  std::vector<FramePairRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    SynthParams per_pair = params;
    per_pair.seed = params.seed + static_cast<std::uint64_t>(i);
    out.push_back(synth_scene_pair(per_pair));
  }
  return out;
}

std::vector<FramePairRecord> load_dataset(const fs::path& manifest_path) {
  fs::path manifest = manifest_path;
  if (fs::is_directory(manifest)) manifest /= "manifest.json";
  const fs::path base = manifest.parent_path();

  const json doc = read_json(manifest);
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array())
    schema_error(manifest, "manifest needs a 'pairs' array");

  std::vector<FramePairRecord> out;
  for (std::size_t i = 0; i < doc["pairs"].size(); ++i) {
    const json& entry = doc["pairs"][i];
    const std::string where = "pairs[" + std::to_string(i) + "]";
    if (!entry.is_object() || !entry.contains("infra") ||
        !entry.contains("veh") || !entry["infra"].is_string() ||
        !entry["veh"].is_string())
      schema_error(manifest, where + " needs 'infra' and 'veh' paths");

    FramePairRecord record;
    record.scene_inf = load_scene(base / entry["infra"].get<std::string>());
    record.scene_veh = load_scene(base / entry["veh"].get<std::string>());
    if (entry.contains("gt") && !entry["gt"].is_null()) {
      if (!entry["gt"].is_string())
        schema_error(manifest, where + ".gt must be a path");
      record.gt_extrinsic =
          load_extrinsic(base / entry["gt"].get<std::string>());
    }
    if (entry.contains("difficulty")) {
      if (!entry["difficulty"].is_string())
        schema_error(manifest, where + ".difficulty must be a string");
      record.difficulty =
          difficulty_from_string(entry["difficulty"].get<std::string>());
    }
    out.push_back(std::move(record));
  }
  return out;
}

void save_dataset(const std::vector<FramePairRecord>& records,
                  const fs::path& directory, const SynthParams& provenance) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string());

  json manifest;
  manifest["generator"] = synth_params_to_json(provenance);
  json pairs = json::array();
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::ostringstream stem;
    stem << "pair_" << std::setw(4) << std::setfill('0') << i;
    const std::string infra_name = stem.str() + "_infra.json";
    const std::string veh_name = stem.str() + "_veh.json";
    const std::string gt_name = stem.str() + "_gt.json";

    save_scene(records[i].scene_inf, directory / infra_name);
    save_scene(records[i].scene_veh, directory / veh_name);
    json entry;
    entry["infra"] = infra_name;
    entry["veh"] = veh_name;
    if (records[i].gt_extrinsic) {
      save_extrinsic(*records[i].gt_extrinsic, directory / gt_name);
      entry["gt"] = gt_name;
    }
    entry["difficulty"] = std::string(to_string(records[i].difficulty));
    pairs.push_back(std::move(entry));
  }
  manifest["pairs"] = std::move(pairs);
  write_json(directory / "manifest.json", manifest);
}

BenchmarkReport load_report(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_object() || !doc.contains("rows") || !doc.contains("groups"))
    schema_error(path, "report needs 'rows' and 'groups'");

  BenchmarkReport report;
  report.success_threshold =
      doc.contains("success_threshold_m")
          ? as_number(doc["success_threshold_m"], path, "success_threshold_m")
          : 2.0;
  for (const json& row : doc["rows"]) {
    FrameResult r;
    if (row.contains("rre_deg") && !row["rre_deg"].is_null())
      r.rre_deg = as_number(row["rre_deg"], path, "rre_deg");
    if (row.contains("rte_m") && !row["rte_m"].is_null())
      r.rte_m = as_number(row["rte_m"], path, "rte_m");
    r.success = row.value("success", false);
    r.time_ms = row.contains("time_ms")
                    ? as_number(row["time_ms"], path, "time_ms")
                    : 0.0;
    r.status =
        calibration_status_from_string(row.value("status", "degenerate"));
    r.difficulty =
        difficulty_from_string(row.value("difficulty", "unknown"));
    report.rows.push_back(std::move(r));
  }
  for (const json& group : doc["groups"]) {
    GroupAggregate g;
    g.name = group.value("name", "");
    g.frames = group.value("frames", 0);
    g.ok_frames = group.value("ok_frames", 0);
    if (group.contains("mean_rre_deg") && !group["mean_rre_deg"].is_null())
      g.mean_rre_deg = as_number(group["mean_rre_deg"], path, "mean_rre_deg");
    if (group.contains("mean_rte_m") && !group["mean_rte_m"].is_null())
      g.mean_rte_m = as_number(group["mean_rte_m"], path, "mean_rte_m");
    g.success_rate_pct = group.contains("success_rate_pct")
                             ? as_number(group["success_rate_pct"], path,
                                         "success_rate_pct")
                             : 0.0;
    g.mean_time_ms =
        group.contains("mean_time_ms")
            ? as_number(group["mean_time_ms"], path, "mean_time_ms")
            : 0.0;
    report.groups.push_back(std::move(g));
  }
  return report;
}

void export_report(const BenchmarkReport& report, const fs::path& path,
                   bool stable_output) {
  json doc;
  doc["success_threshold_m"] = report.success_threshold;
  json rows = json::array();
  for (const FrameResult& r : report.rows) {
    json row;
    row["rre_deg"] = r.rre_deg ? json(*r.rre_deg) : json(nullptr);
    row["rte_m"] = r.rte_m ? json(*r.rte_m) : json(nullptr);
    row["success"] = r.success;
    row["time_ms"] = stable_output ? 0.0 : r.time_ms;
    row["status"] = std::string(to_string(r.status));
    row["difficulty"] = std::string(to_string(r.difficulty));
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  json groups = json::array();
  for (const GroupAggregate& g : report.groups) {
    json group;
    group["name"] = g.name;
    group["frames"] = g.frames;
    group["ok_frames"] = g.ok_frames;
    group["mean_rre_deg"] =
        g.mean_rre_deg ? json(*g.mean_rre_deg) : json(nullptr);
    group["mean_rte_m"] = g.mean_rte_m ? json(*g.mean_rte_m) : json(nullptr);
    group["success_rate_pct"] = g.success_rate_pct;
    group["mean_time_ms"] = stable_output ? 0.0 : g.mean_time_ms;
    groups.push_back(std::move(group));
  }
  doc["groups"] = std::move(groups);
  write_json(path, doc);
}

void export_result(const CalibrationResult& result, const fs::path& path,
                   const std::optional<RigidTransform>& gt,
                   bool stable_output) {
  json doc;
  doc["status"] = std::string(to_string(result.status));
  doc["extrinsic"] = transform_to_json(result.extrinsic);
  doc["scene_oiou"] = result.scene_oiou;
  json matches;
  matches["threshold_used"] = result.matches.threshold_used;
  json pairs = json::array();
  for (const Match& m : result.matches.pairs) {
    pairs.push_back({{"infra_index", m.infra_index},
                     {"vehicle_index", m.vehicle_index},
                     {"affinity", m.affinity}});
  }
  matches["pairs"] = std::move(pairs);
  doc["matches"] = std::move(matches);
  doc["strategy"] = strategy_to_json(result.strategy);
  json timings;
  timings["affinity_ms"] =
      stable_output ? 0.0 : result.stage_timings.affinity_ms;
  timings["matching_ms"] =
      stable_output ? 0.0 : result.stage_timings.matching_ms;
  timings["solve_ms"] = stable_output ? 0.0 : result.stage_timings.solve_ms;
  timings["refine_ms"] = stable_output ? 0.0 : result.stage_timings.refine_ms;
  timings["total_ms"] = stable_output ? 0.0 : result.stage_timings.total_ms();
  doc["stage_timings"] = std::move(timings);
  if (gt) {
    doc["rre_deg"] = rre(gt->rotation, result.extrinsic.rotation);
    doc["rte_m"] = rte(gt->translation, result.extrinsic.translation);
  }
  write_json(path, doc);
}

void export_merged_geometry(const CalibrationResult& result,
                            const Scene& scene_inf, const Scene& scene_veh,
                            const fs::path& path) {
  // Quad faces over the canonical vertex order, outward oriented.
  static constexpr std::array<std::array<int, 4>, 6> kFaces = {{
      {0, 4, 5, 1},  // +x
      {2, 6, 7, 3},  // -x
      {0, 3, 7, 4},  // +y
      {1, 5, 6, 2},  // -y
      {4, 7, 6, 5},  // +z
      {0, 1, 2, 3},  // -z
  }};

  std::vector<std::array<Eigen::Vector3d, 8>> boxes;
  std::vector<int> sources;
  for (const Box3D& b : scene_veh.boxes) {
    boxes.push_back(box_vertices(b));
    sources.push_back(0);
  }
  for (const Box3D& b : scene_inf.boxes) {
    boxes.push_back(box_vertices(apply_transform(result.extrinsic, b)));
    sources.push_back(1);
  }

  std::ostringstream out;
  out << "ply\n"
      << "format ascii 1.0\n"
      << "comment vehicle boxes (source 0) and calibrated infrastructure "
         "boxes (source 1)\n"
      << "element vertex " << boxes.size() * 8 << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property uchar source\n"
      << "element face " << boxes.size() * 6 << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    for (const Eigen::Vector3d& v : boxes[i]) {
      out << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
          << format_double(v.z()) << ' ' << sources[i] << "\n";
    }
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const int base = static_cast<int>(i) * 8;
    for (const auto& face : kFaces) {
      out << "4 " << base + face[0] << ' ' << base + face[1] << ' '
          << base + face[2] << ' ' << base + face[3] << "\n";
    }
  }
  write_text(path, out.str());
}

}  // namespace v2icalib
