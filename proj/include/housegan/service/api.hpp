#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "housegan/metrics/evaluation.hpp"
#include "housegan/service/base64.hpp"

namespace housegan::service {

/// Request failure carrying the HTTP status to answer with.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

inline Json error_body(int status, const std::string& message) {
  return Json{{"error", {{"status", status}, {"message", message}}}};
}

/// A checkpoint held read-only for generation.
struct LoadedModel {
  std::string id;
  std::filesystem::path path;
  ModelConfig config;
  std::optional<Group> held_out;
  std::int64_t iteration = 0;
  std::unique_ptr<LayoutGenerator> generator;
};

inline bool looks_like_checkpoint(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && std::equal(magic, magic + 4, kCheckpointMagic);
}

class ModelRegistry {
 public:
  /// Registers a checkpoint under `id` (defaults to the file name).
  const LoadedModel& load(const std::filesystem::path& path, std::string id = {}) {
    if (id.empty()) id = path.filename().string();
    if (models_.count(id)) throw ValidationError("duplicate checkpoint id: " + id);
    const Checkpoint ck = load_checkpoint(path);
    auto m = std::make_unique<LoadedModel>();
    m->id = id;
    m->path = path;
    m->config = ck.config;
    m->held_out = ck.held_out;
    m->iteration = ck.iteration;
    m->generator = std::make_unique<LayoutGenerator>(ck);
    return *models_.emplace(id, std::move(m)).first->second;
  }

  /// Every regular file in `dir` that starts with the checkpoint magic.
  int load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw FormatError("checkpoint directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.is_regular_file() && looks_like_checkpoint(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load(f);
    return static_cast<int>(files.size());
  }

  const LoadedModel* find(const std::string& id) const {
    auto it = models_.find(id);
    return it == models_.end() ? nullptr : it->second.get();
  }

  std::vector<const LoadedModel*> all() const {
    std::vector<const LoadedModel*> out;
    for (const auto& [id, m] : models_) out.push_back(m.get());
    return out;
  }

  bool empty() const { return models_.empty(); }

 private:
  std::map<std::string, std::unique_ptr<LoadedModel>> models_;
};

struct ServiceConfig {
  int max_samples = 64;
  /// Per-layout budget for the compatibility search.
  double ged_timeout_seconds = 2.0;
};

inline std::string hex_color(const Rgb& c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s = "#";
  for (auto v : c) {
    s += kDigits[v >> 4];
    s += kDigits[v & 15];
  }
  return s;
}

/// GET /roomtypes
inline Json roomtypes_json(const Palette& palette) {
  Json out = Json::array();
  for (int t = 0; t < kNumRoomTypes; ++t) {
    const RoomType rt = room_type_from_code(t);
    const Rgb& c = palette.color(rt);
    out.push_back({{"code", t},
                   {"name", std::string(room_type_name(rt))},
                   {"color", hex_color(c)},
                   {"rgb", Json::array({c[0], c[1], c[2]})}});
  }
  return out;
}

/// GET /checkpoints
inline Json checkpoints_json(const ModelRegistry& registry) {
  Json out = Json::array();
  for (const LoadedModel* m : registry.all()) {
    out.push_back({{"id", m->id},
                   {"preset", m->config.arch.preset},
                   {"variant", std::string(variant_name(m->config.variant))},
                   {"ablation", ablation_name(m->config)},
                   {"held_out_group", m->held_out ? Json(std::string(group_name(*m->held_out))) : Json(nullptr)},
                   {"iteration", m->iteration},
                   {"noise_dim", m->config.arch.noise_dim},
                   {"mask_size", m->config.arch.mask_size()}});
  }
  return out;
}

struct GenerateRequest {
  BubbleDiagram diagram;
  int num_samples = 1;
  std::optional<std::uint64_t> seed;
  std::map<int, NoiseVector> pinned_noise;
  std::string checkpoint_id;
  bool include_masks = false;
};

/// Validates in the order diagram (400), checkpoint (404), pinned noise
/// (422 for unknown nodes, 400 for malformed vectors).
inline std::pair<GenerateRequest, const LoadedModel*> parse_generate(const Json& body, const ModelRegistry& registry,
                                                                     const ServiceConfig& cfg) {
  if (!body.is_object()) throw ApiError(400, "request body must be a JSON object");
  GenerateRequest req;
  if (!body.contains("diagram")) throw ApiError(400, "missing \"diagram\"");
  try {
    req.diagram = diagram_from_json(body["diagram"]);
  } catch (const ValidationError& e) {
    throw ApiError(400, std::string("invalid diagram: ") + e.what());
  }

  if (body.contains("num_samples")) {
    const Json& n = body["num_samples"];
    if (!n.is_number_integer() || n.get<std::int64_t>() < 1 || n.get<std::int64_t>() > cfg.max_samples) {
      throw ApiError(400, "num_samples must be an integer in [1, " + std::to_string(cfg.max_samples) + "]");
    }
    req.num_samples = n.get<int>();
  }
  if (body.contains("seed") && !body["seed"].is_null()) {
    const Json& s = body["seed"];
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      throw ApiError(400, "seed must be a non-negative integer");
    }
    req.seed = s.get<std::uint64_t>();
  }
  if (body.contains("include_masks")) {
    if (!body["include_masks"].is_boolean()) throw ApiError(400, "include_masks must be a boolean");
    req.include_masks = body["include_masks"].get<bool>();
  }

  if (!body.contains("checkpoint_id") || !body["checkpoint_id"].is_string()) {
    throw ApiError(400, "missing \"checkpoint_id\"");
  }
  req.checkpoint_id = body["checkpoint_id"].get<std::string>();
  const LoadedModel* model = registry.find(req.checkpoint_id);
  if (!model) throw ApiError(404, "unknown checkpoint: " + req.checkpoint_id);
  if (req.diagram.size() > model->config.arch.max_rooms) {
    throw ApiError(400, "diagram exceeds the model's room capacity");
  }

  if (body.contains("pinned_noise") && !body["pinned_noise"].is_null()) {
    const Json& pins = body["pinned_noise"];
    if (!pins.is_object()) throw ApiError(400, "pinned_noise must map node ids to vectors");
    const int dim = model->config.arch.noise_dim;
    for (const auto& [key, vec] : pins.items()) {
      std::size_t used = 0;
      int node = -1;
      try {
        node = std::stoi(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || node < 0 || node >= req.diagram.size()) {
        throw ApiError(422, "pinned noise for nonexistent node " + key);
      }
      if (!vec.is_array() || static_cast<int>(vec.size()) != dim) {
        throw ApiError(400, "pinned noise for node " + key + " must have " + std::to_string(dim) + " numbers");
      }
      NoiseVector z;
      for (const Json& x : vec) {
        if (!x.is_number()) throw ApiError(400, "pinned noise values must be numbers");
        z.push_back(x.get<double>());
      }
      req.pinned_noise[node] = std::move(z);
    }
  }
  return {std::move(req), model};
}

inline Json noise_json(const std::vector<NoiseVector>& noise) {
  Json out = Json::object();
  for (std::size_t i = 0; i < noise.size(); ++i) out[std::to_string(i)] = noise[i];
  return out;
}

inline Json masks_json(const std::vector<RoomMask>& masks) {
  std::vector<float> flat;
  const int m = masks.empty() ? 0 : masks.front().resolution();
  for (const RoomMask& mask : masks)
    for (double v : mask.values()) flat.push_back(static_cast<float>(v));
  return {{"dtype", "float32"},
          {"byte_order", "little"},
          {"shape", Json::array({static_cast<int>(masks.size()), m, m})},
          {"data", base64::encode_floats(flat)}};
}

/// POST /generate. Sample s, node i uses the pinned vector when given and
/// otherwise room_noise(seed, s, i).
inline Json handle_generate(const Json& body, const ModelRegistry& registry, const ServiceConfig& cfg = {}) {
  auto [req, model] = parse_generate(body, registry, cfg);
  const std::uint64_t seed = req.seed ? *req.seed : std::random_device{}();
  const int dim = model->config.arch.noise_dim;
  GedConfig ged_cfg;
  ged_cfg.timeout_seconds = cfg.ged_timeout_seconds;
  ged_cfg.ignore_node_labels = model->config.ignores_room_types();

  Json samples = Json::array();
  for (int s = 0; s < req.num_samples; ++s) {
    std::vector<NoiseVector> noise;
    for (int i = 0; i < req.diagram.size(); ++i) {
      auto pin = req.pinned_noise.find(i);
      noise.push_back(pin != req.pinned_noise.end()
                          ? pin->second
                          : room_noise(seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(i), dim));
    }
    const auto masks = model->generator->masks(req.diagram, noise);
    const FittedLayout fitted = fit_rectangles(req.diagram.types(), masks);
    const GedResult compat = compatibility(req.diagram, fitted, ged_cfg);
    Json degenerate = Json::array();
    for (int i = 0; i < fitted.layout.size(); ++i)
      if (fitted.degenerate[static_cast<std::size_t>(i)]) degenerate.push_back(i);
    Json sample = {{"index", s},
                   {"layout", layout_to_json(fitted.layout)},
                   {"degenerate_rooms", degenerate},
                   {"compatibility", compat.distance},
                   {"compatibility_exact", compat.exact},
                   {"noise", noise_json(noise)}};
    if (req.include_masks) sample["masks"] = masks_json(masks);
    samples.push_back(std::move(sample));
  }

  const Group g = group_of(req.diagram.size());
  return {{"checkpoint_id", model->id},
          {"seed", seed},
          {"diagram_group", std::string(group_name(g))},
          {"in_held_out_group", model->held_out.has_value() && *model->held_out == g},
          {"samples", std::move(samples)}};
}

}  // namespace housegan::service
