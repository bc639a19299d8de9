#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "housegan/dataio/corpus.hpp"
#include "housegan/nn/adam.hpp"
#include "housegan/relnet/model.hpp"

// Checkpoint container, version 1, all integers and floats little-endian:
//
//   bytes 0..3   magic "HGCK"
//   u32          format version
//   u64          header length L
//   L bytes      UTF-8 JSON header
//   f64[]        tensor payload, in the order the header lists them
//
// The header records the architecture, variant, ablation, held-out group,
// training seed and iteration, and a "blocks" array. Each block names a
// parameter set ("generator", "critic", and optionally the Adam moments
// "adam.generator.m", ...) and lists its tensors as {name, shape, fan_in}.

namespace housegan {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

inline constexpr char kCheckpointMagic[4] = {'H', 'G', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct OptimizerSnapshot {
  nn::AdamConfig config;
  std::int64_t steps = 0;
  nn::ParamSet<double> m;
  nn::ParamSet<double> v;

  static OptimizerSnapshot of(const nn::Adam& a) {
    return {a.config(), a.steps(), a.first_moment(), a.second_moment()};
  }
  nn::Adam restore(const nn::ParamSet<double>& like) const {
    nn::Adam a(config, like);
    a.restore(steps, m, v);
    return a;
  }
};

struct Checkpoint {
  ModelConfig config;
  std::optional<Group> held_out;
  std::uint64_t seed = 0;
  std::int64_t iteration = 0;
  /// Free-form training settings, echoed for provenance of the run.
  Json train_config = Json::object();
  ModelParams params;
  std::optional<OptimizerSnapshot> generator_optimizer;
  std::optional<OptimizerSnapshot> critic_optimizer;
};

namespace detail {

inline Json tensor_list(const nn::ParamSet<double>& p) {
  Json list = Json::array();
  for (const auto& e : p.entries()) list.push_back({{"name", e.name}, {"shape", e.value.shape()}, {"fan_in", e.fan_in}});
  return list;
}

inline nn::ParamSet<double> declare_from(const Json& list) {
  nn::ParamSet<double> p;
  for (const Json& t : list) p.add(t.at("name").get<std::string>(), t.at("shape").get<nn::Shape>(), t.at("fan_in").get<int>());
  return p;
}

inline Json adam_json(const nn::AdamConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"epsilon", c.epsilon}};
}

inline nn::AdamConfig adam_from_json(const Json& j) {
  return {j.at("learning_rate").get<double>(), j.at("beta1").get<double>(), j.at("beta2").get<double>(),
          j.at("epsilon").get<double>()};
}

template <typename Int>
void put(std::string& out, Int v) {
  char buf[sizeof(Int)];
  std::memcpy(buf, &v, sizeof(Int));
  out.append(buf, sizeof(Int));
}

template <typename Int>
Int take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(Int) > in.size()) throw FormatError("checkpoint truncated");
  Int v;
  std::memcpy(&v, in.data() + pos, sizeof(Int));
  pos += sizeof(Int);
  return v;
}

}  // namespace detail

inline std::string checkpoint_to_bytes(const Checkpoint& ck) {
  struct Block {
    std::string name;
    const nn::ParamSet<double>* set;
  };
  std::vector<Block> blocks = {{"generator", &ck.params.generator}, {"critic", &ck.params.critic}};
  Json optim = Json::object();
  auto add_optimizer = [&](const std::string& net, const std::optional<OptimizerSnapshot>& o) {
    if (!o) return;
    optim[net] = {{"config", detail::adam_json(o->config)}, {"steps", o->steps}};
    blocks.push_back({"adam." + net + ".m", &o->m});
    blocks.push_back({"adam." + net + ".v", &o->v});
  };
  add_optimizer("generator", ck.generator_optimizer);
  add_optimizer("critic", ck.critic_optimizer);

  Json header;
  header["architecture"] = ck.config.arch.to_json();
  header["variant"] = std::string(variant_name(ck.config.variant));
  header["ablation"] = ablation_name(ck.config);
  header["held_out_group"] = ck.held_out ? Json(std::string(group_name(*ck.held_out))) : Json(nullptr);
  header["seed"] = ck.seed;
  header["iteration"] = ck.iteration;
  header["train_config"] = ck.train_config;
  header["optimizers"] = optim;
  Json bl = Json::array();
  for (const auto& b : blocks) bl.push_back({{"name", b.name}, {"tensors", detail::tensor_list(*b.set)}});
  header["blocks"] = bl;

  const std::string text = header.dump();
  std::string out(kCheckpointMagic, 4);
  detail::put<std::uint32_t>(out, kCheckpointVersion);
  detail::put<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& b : blocks) {
    for (const auto& e : b.set->entries()) {
      out.append(reinterpret_cast<const char*>(e.value.data()), e.value.size() * sizeof(double));
    }
  }
  return out;
}

inline Checkpoint checkpoint_from_bytes(const std::string& bytes) {
  if (bytes.size() < 16 || bytes.compare(0, 4, kCheckpointMagic, 4) != 0) throw FormatError("not a checkpoint file");
  std::size_t pos = 4;
  const auto version = detail::take<std::uint32_t>(bytes, pos);
  if (version != kCheckpointVersion) throw FormatError("unsupported checkpoint version " + std::to_string(version));
  const auto len = detail::take<std::uint64_t>(bytes, pos);
  if (pos + len > bytes.size()) throw FormatError("checkpoint header truncated");
  const Json header = Json::parse(bytes.substr(pos, len));
  pos += len;

  Checkpoint ck;
  ck.config = model_config_for(header.at("ablation").get<std::string>(), Architecture::from_json(header.at("architecture")));
  if (std::string(variant_name(ck.config.variant)) != header.at("variant").get<std::string>()) {
    throw FormatError("checkpoint variant and ablation disagree");
  }
  if (!header.at("held_out_group").is_null()) ck.held_out = parse_group(header["held_out_group"].get<std::string>());
  ck.seed = header.at("seed").get<std::uint64_t>();
  ck.iteration = header.at("iteration").get<std::int64_t>();
  ck.train_config = header.at("train_config");

  std::map<std::string, nn::ParamSet<double>> sets;
  for (const Json& b : header.at("blocks")) {
    nn::ParamSet<double> p = detail::declare_from(b.at("tensors"));
    for (auto& e : p.entries()) {
      const std::size_t n = e.value.size() * sizeof(double);
      if (pos + n > bytes.size()) throw FormatError("checkpoint payload truncated");
      std::memcpy(e.value.data(), bytes.data() + pos, n);
      pos += n;
    }
    sets.emplace(b.at("name").get<std::string>(), std::move(p));
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes after checkpoint payload");

  ModelParams expected;
  RelationalGan<double>(ck.config).declare(expected.generator, expected.critic);
  if (!sets.count("generator") || !sets.count("critic") || !sets["generator"].same_layout(expected.generator) ||
      !sets["critic"].same_layout(expected.critic)) {
    throw FormatError("checkpoint parameters do not match the declared architecture");
  }
  ck.params.generator = std::move(sets["generator"]);
  ck.params.critic = std::move(sets["critic"]);
  const Json& optim = header.at("optimizers");
  auto load_optimizer = [&](const std::string& net) -> std::optional<OptimizerSnapshot> {
    if (!optim.contains(net)) return std::nullopt;
    OptimizerSnapshot o;
    o.config = detail::adam_from_json(optim[net].at("config"));
    o.steps = optim[net].at("steps").get<std::int64_t>();
    o.m = std::move(sets.at("adam." + net + ".m"));
    o.v = std::move(sets.at("adam." + net + ".v"));
    return o;
  };
  ck.generator_optimizer = load_optimizer("generator");
  ck.critic_optimizer = load_optimizer("critic");
  return ck;
}

inline void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw FormatError("cannot write " + tmp.string());
    const std::string bytes = checkpoint_to_bytes(ck);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_bytes(ss.str());
}

}  // namespace housegan
