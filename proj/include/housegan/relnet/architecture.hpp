#pragma once

#include <string>
#include <string_view>

#include "housegan/core/diagram.hpp"
#include "housegan/core/json_io.hpp"

namespace housegan {

/// Layer widths and spatial sizes. "standard" is the full-size network
/// (128-d noise, 32x32 masks); "tiny" keeps the same topology at a size
/// where finite-difference checks and overfit runs are cheap.
struct Architecture {
  std::string preset = "standard";
  int noise_dim = 128;
  /// Feature channels flowing through Conv-MPN and up/down sampling.
  int channels = 16;
  /// Spatial size of the first generator volume; masks are 4x larger.
  int base_size = 8;
  int gen_hidden_1 = 256;
  int gen_hidden_2 = 128;
  /// Channels of the critic's room-type volume.
  int type_channels = 8;
  int critic_hidden_1 = 256;
  int critic_hidden_2 = 128;
  int critic_embedding = 128;
  int gcn_embedding = 128;
  int gcn_hidden = 512;
  int gcn_rounds = 2;
  /// Slots in the CNN-only fixed-size encoding.
  int max_rooms = kMaxRooms;

  int mask_size() const { return base_size * 4; }
  int type_dim() const { return kNumRoomTypes; }
  /// Upper-triangular pair count: C(max_rooms, 2).
  int connection_slots() const { return max_rooms * (max_rooms - 1) / 2; }
  int cnn_condition_dim() const { return max_rooms * kNumRoomTypes + connection_slots(); }

  static Architecture standard() { return Architecture{}; }

  static Architecture tiny() {
    Architecture a;
    a.preset = "tiny";
    a.noise_dim = 8;
    a.channels = 4;
    a.base_size = 2;
    a.gen_hidden_1 = 8;
    a.gen_hidden_2 = 8;
    a.type_channels = 2;
    a.critic_hidden_1 = 8;
    a.critic_hidden_2 = 8;
    a.critic_embedding = 8;
    a.gcn_embedding = 8;
    a.gcn_hidden = 16;
    return a;
  }

  static Architecture from_preset(std::string_view name) {
    if (name == "standard") return standard();
    if (name == "tiny") return tiny();
    throw ValidationError("unknown architecture preset: " + std::string(name));
  }

  void validate() const {
    if (noise_dim < 1 || channels < 1 || gen_hidden_1 < 1 || gen_hidden_2 < 1 || type_channels < 1 ||
        critic_hidden_1 < 1 || critic_hidden_2 < 1 || critic_embedding < 1 || gcn_embedding < 1 ||
        gcn_hidden < 1 || gcn_rounds < 0) {
      throw ValidationError("architecture widths must be positive");
    }
    // Three stride-2 convolutions after two downsamplings must reach 1x1.
    if (base_size != 1 && base_size != 2 && base_size != 4 && base_size != 8) {
      throw ValidationError("base_size must be 1, 2, 4 or 8");
    }
    if (kCanvasSize % mask_size() != 0) throw ValidationError("mask size must divide the canvas");
    if (max_rooms < 1 || max_rooms > kMaxRooms) throw ValidationError("max_rooms out of range");
  }

  Json to_json() const {
    return Json{{"preset", preset},
                {"noise_dim", noise_dim},
                {"channels", channels},
                {"base_size", base_size},
                {"gen_hidden_1", gen_hidden_1},
                {"gen_hidden_2", gen_hidden_2},
                {"type_channels", type_channels},
                {"critic_hidden_1", critic_hidden_1},
                {"critic_hidden_2", critic_hidden_2},
                {"critic_embedding", critic_embedding},
                {"gcn_embedding", gcn_embedding},
                {"gcn_hidden", gcn_hidden},
                {"gcn_rounds", gcn_rounds},
                {"max_rooms", max_rooms}};
  }

  static Architecture from_json(const Json& j) {
    Architecture a;
    a.preset = j.at("preset").get<std::string>();
    a.noise_dim = j.at("noise_dim").get<int>();
    a.channels = j.at("channels").get<int>();
    a.base_size = j.at("base_size").get<int>();
    a.gen_hidden_1 = j.at("gen_hidden_1").get<int>();
    a.gen_hidden_2 = j.at("gen_hidden_2").get<int>();
    a.type_channels = j.at("type_channels").get<int>();
    a.critic_hidden_1 = j.at("critic_hidden_1").get<int>();
    a.critic_hidden_2 = j.at("critic_hidden_2").get<int>();
    a.critic_embedding = j.at("critic_embedding").get<int>();
    a.gcn_embedding = j.at("gcn_embedding").get<int>();
    a.gcn_hidden = j.at("gcn_hidden").get<int>();
    a.gcn_rounds = j.at("gcn_rounds").get<int>();
    a.max_rooms = j.at("max_rooms").get<int>();
    a.validate();
    return a;
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

enum class ModelVariant { kHouseGan, kCnnOnly, kGcn };

inline std::string_view variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::kHouseGan: return "house-gan";
    case ModelVariant::kCnnOnly: return "cnn-only";
    case ModelVariant::kGcn: return "gcn";
  }
  return "?";
}

inline ModelVariant parse_variant(std::string_view s) {
  if (s == "house-gan") return ModelVariant::kHouseGan;
  if (s == "cnn-only") return ModelVariant::kCnnOnly;
  if (s == "gcn") return ModelVariant::kGcn;
  throw ValidationError("unknown model variant: " + std::string(s));
}

/// Which parts of the bubble diagram the model is given. Only the four
/// cumulative rows {}, {count}, {count, type}, {count, type, connectivity}
/// are legal.
struct Ablation {
  bool use_count = true;
  bool use_type = true;
  bool use_connectivity = true;

  bool legal() const {
    if (use_connectivity && !use_type) return false;
    if (use_type && !use_count) return false;
    return true;
  }

  friend bool operator==(const Ablation&, const Ablation&) = default;
};

/// Model variant plus ablation, i.e. what one trained checkpoint is.
struct ModelConfig {
  Architecture arch = Architecture::standard();
  ModelVariant variant = ModelVariant::kHouseGan;
  Ablation ablation{};

  void validate() const {
    arch.validate();
    if (!ablation.legal()) throw ValidationError("illegal ablation combination");
    const bool relational = variant != ModelVariant::kCnnOnly;
    if (relational && !ablation.use_count) {
      throw ValidationError("relational models always know the room count");
    }
    if (!relational && ablation.use_count != ablation.use_type) {
      // CNN-only is either the full-information baseline or the no-count row.
      throw ValidationError("CNN-only supports the full and no-count ablations only");
    }
  }

  /// The GED compatibility score ignores room labels when the model never
  /// saw them.
  bool ignores_room_types() const { return !ablation.use_type; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Command-line ablation names.
///   full     House-GAN with count, type and connectivity
///   no-conn  House-GAN on a fully-connected graph (count + type)
///   no-type  House-GAN on a fully-connected graph without types (count only)
///   no-count CNN-only without type and connectivity inputs
///   cnn-only CNN-only baseline with full information
///   gcn      GCN baseline with full information
inline ModelConfig model_config_for(std::string_view ablation, Architecture arch) {
  ModelConfig c;
  c.arch = std::move(arch);
  if (ablation == "full") {
  } else if (ablation == "no-conn") {
    c.ablation = {true, true, false};
  } else if (ablation == "no-type") {
    c.ablation = {true, false, false};
  } else if (ablation == "no-count") {
    c.variant = ModelVariant::kCnnOnly;
    c.ablation = {false, false, false};
  } else if (ablation == "cnn-only") {
    c.variant = ModelVariant::kCnnOnly;
  } else if (ablation == "gcn") {
    c.variant = ModelVariant::kGcn;
  } else {
    throw ValidationError("unknown ablation: " + std::string(ablation));
  }
  c.validate();
  return c;
}

inline std::string ablation_name(const ModelConfig& c) {
  switch (c.variant) {
    case ModelVariant::kGcn: return "gcn";
    case ModelVariant::kCnnOnly: return c.ablation.use_count ? "cnn-only" : "no-count";
    case ModelVariant::kHouseGan:
      if (c.ablation.use_connectivity) return "full";
      return c.ablation.use_type ? "no-conn" : "no-type";
  }
  return "?";
}

}  // namespace housegan
