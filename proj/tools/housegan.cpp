// housegan: corpus synthesis, training, generation, evaluation and the HTTP
// service behind one command.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "housegan/service/server.hpp"
#include "housegan/training/trainer.hpp"

namespace fs = std::filesystem;
using namespace housegan;

namespace {

constexpr const char* kCheckpointDirEnv = "HOUSEGAN_CHECKPOINT_DIR";

std::optional<fs::path> checkpoint_dir() {
  const char* v = std::getenv(kCheckpointDirEnv);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return fs::path(v);
}

// A checkpoint argument names a file, or a file inside $HOUSEGAN_CHECKPOINT_DIR.
fs::path resolve_checkpoint(const std::string& arg) {
  const fs::path p(arg);
  if (fs::exists(p)) return p;
  if (auto dir = checkpoint_dir(); dir && p.is_relative() && fs::exists(*dir / p)) return *dir / p;
  throw FormatError("checkpoint not found: " + arg);
}

Json checkpoint_info(const fs::path& path, const Checkpoint& ck) {
  return {{"path", path.string()},
          {"preset", ck.config.arch.preset},
          {"variant", std::string(variant_name(ck.config.variant))},
          {"ablation", ablation_name(ck.config)},
          {"held_out_group", ck.held_out ? Json(std::string(group_name(*ck.held_out))) : Json(nullptr)},
          {"iteration", ck.iteration}};
}

std::vector<Group> parse_groups(const std::string& arg) {
  if (arg == "all") return {kAllGroups.begin(), kAllGroups.end()};
  return {parse_group(arg)};
}

const std::vector<std::string> kGroupChoices = {"1-3", "4-6", "7-9", "10-12", "13+"};
const std::vector<std::string> kAblationChoices = {"full", "no-conn", "no-type", "no-count", "cnn-only", "gcn"};

// ---------------------------------------------------------------- synth

struct SynthArgs {
  fs::path out;
  std::uint64_t seed = 0;
  int per_group = 20;
  std::vector<int> counts;
  int max_rooms = 16;
  int min_side = 12;
};

int run_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.samples_per_group.fill(a.per_group);
  if (!a.counts.empty()) {
    if (a.counts.size() != kNumGroups) throw ValidationError("--counts needs five values");
    std::copy(a.counts.begin(), a.counts.end(), cfg.samples_per_group.begin());
  }
  cfg.max_rooms = a.max_rooms;
  cfg.min_side = a.min_side;
  const Corpus c = synthesize_corpus(cfg, a.seed);
  save_corpus(c, a.out);
  std::cout << "wrote " << c.samples.size() << " samples to " << a.out.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  fs::path corpus;
  std::string group;
  std::string ablation = "full";
  std::string preset = "standard";
  std::int64_t iters = 200000;
  std::uint64_t seed = 0;
  std::string out;
  int batch_size = 32;
  double lr_g = 1e-4;
  double lr_d = 1e-4;
  int n_critic = 1;
  double gp_weight = 10.0;
  std::int64_t checkpoint_every = 0;
  fs::path metrics_log;
  fs::path batch_audit;
  std::string resume;
  bool quiet = false;
};

int run_train(const TrainArgs& a) {
  const Group held_out = parse_group(a.group);
  const ModelConfig model = model_config_for(a.ablation, Architecture::from_preset(a.preset));
  TrainConfig cfg;
  cfg.iterations = a.iters;
  cfg.seed = a.seed;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate_g = a.lr_g;
  cfg.learning_rate_d = a.lr_d;
  cfg.n_critic = a.n_critic;
  cfg.gp_weight = a.gp_weight;

  fs::path out = a.out;
  if (out.empty()) {
    const auto dir = checkpoint_dir();
    if (!dir) throw ValidationError(std::string("--out is required unless ") + kCheckpointDirEnv + " is set");
    fs::create_directories(*dir);
    out = *dir / (a.ablation + "-" + std::string(group_name(held_out)) + ".ckpt");
  }

  const Corpus corpus = load_corpus(a.corpus);
  RunOptions opt;
  opt.out = out;
  opt.metrics_log = a.metrics_log;
  opt.batch_audit = a.batch_audit;
  opt.checkpoint_every = a.checkpoint_every;
  if (!a.quiet) {
    const std::int64_t every = std::max<std::int64_t>(1, a.iters / 20);
    opt.on_step = [every](const StepLog& s) {
      if ((s.iteration + 1) % every == 0) {
        std::cout << "iter " << s.iteration + 1 << " d_loss " << s.d_loss << " g_loss " << s.g_loss << " gp " << s.gp
                  << '\n';
      }
    };
  }
  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) resume = load_checkpoint(resolve_checkpoint(a.resume));
  const Checkpoint ck = train_run(cfg, corpus, held_out, model, opt, resume ? &*resume : nullptr);
  std::cout << "checkpoint " << out.string() << " at iteration " << ck.iteration << '\n';
  return 0;
}

// ------------------------------------------------------------- generate

struct GenerateArgs {
  std::string ckpt;
  fs::path diagram;
  int samples = 1;
  std::optional<std::uint64_t> seed;
  fs::path pin;
  fs::path out;
  bool masks = false;
  bool render = false;
};

int run_generate(const GenerateArgs& a) {
  service::ModelRegistry registry;
  const auto& model = registry.load(resolve_checkpoint(a.ckpt));
  Json body = {{"diagram", read_json_file(a.diagram)},
               {"num_samples", a.samples},
               {"checkpoint_id", model.id},
               {"include_masks", a.masks}};
  if (a.seed) body["seed"] = *a.seed;
  if (!a.pin.empty()) body["pinned_noise"] = read_json_file(a.pin);
  service::ServiceConfig cfg;
  cfg.max_samples = std::max(cfg.max_samples, a.samples);
  Json response;
  try {
    response = service::handle_generate(body, registry, cfg);
  } catch (const service::ApiError& e) {
    throw ValidationError(e.what());
  }
  if (a.out.empty()) {
    std::cout << response.dump(2) << '\n';
    return 0;
  }
  fs::create_directories(a.out);
  write_json_file(a.out / "response.json", response);
  for (const Json& s : response["samples"]) {
    const std::string stem = "sample_" + std::to_string(s["index"].get<int>());
    write_json_file(a.out / (stem + ".layout.json"), s["layout"]);
    write_json_file(a.out / (stem + ".noise.json"), s["noise"]);
    if (a.render) {
      const Layout l = layout_from_json(s["layout"]);
      std::vector<bool> skip(static_cast<std::size_t>(l.size()), false);
      for (const Json& d : s["degenerate_rooms"]) skip[d.get<std::size_t>()] = true;
      write_ppm(a.out / (stem + ".ppm"), rasterize(l, Palette(), kCanvasSize, skip));
    }
    std::cout << stem << " compatibility " << s["compatibility"].get<double>() << '\n';
  }
  return 0;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string ckpt;
  fs::path corpus;
  std::string group;
  std::string metric;
  std::optional<int> samples;
  std::optional<int> variations;
  double timeout = GedConfig{}.timeout_seconds;
  int ged_bound = GedConfig{}.upper_bound;
  std::string labels = "auto";
  std::string features = "pixels-rp64";
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  fs::path report;
};

int run_evaluate(const EvaluateArgs& a) {
  const fs::path path = resolve_checkpoint(a.ckpt);
  const Checkpoint ck = load_checkpoint(path);
  const Corpus corpus = load_corpus(a.corpus);
  const Metric metric = parse_metric(a.metric);

  EvalRequest req;
  req.num_diagrams = a.samples;
  req.variations_per_diagram = a.variations;
  req.seed = a.seed;
  req.ged.timeout_seconds = a.timeout;
  req.ged.upper_bound = a.ged_bound;
  req.ged.ignore_node_labels = a.labels == "ignore" || (a.labels == "auto" && ck.config.ignores_room_types());
  req.feature_extractor = a.features;
  req.workers = a.workers;

  const LayoutGenerator gen(ck);
  const Json report =
      evaluation_report(metric, parse_groups(a.group), corpus, generator_source(gen, a.seed), req, checkpoint_info(path, ck));
  if (a.report.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    write_json_file(a.report, report);
    std::cout << a.metric << " " << a.group << " score " << report["score"].dump() << " -> " << a.report.string()
              << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  std::vector<std::string> ckpts;
  std::string ckpt_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t workers = 4;
  fs::path palette = fs::path(HOUSEGAN_CONFIG_DIR) / "palette.json";
  fs::path openapi = fs::path(HOUSEGAN_API_DIR) / "openapi.json";
};

service::Server* g_server = nullptr;

int run_serve(const ServeArgs& a) {
  service::ModelRegistry registry;
  for (const auto& c : a.ckpts) registry.load(resolve_checkpoint(c));
  fs::path dir = a.ckpt_dir;
  if (dir.empty() && a.ckpts.empty()) {
    if (auto env = checkpoint_dir()) dir = *env;
  }
  if (!dir.empty()) registry.load_directory(dir);
  if (registry.empty()) throw ValidationError("no checkpoints to serve");

  service::ServerOptions opt;
  opt.host = a.host;
  opt.port = a.port;
  opt.workers = a.workers;
  if (fs::exists(a.openapi)) {
    std::ifstream in(a.openapi);
    opt.openapi_document.assign(std::istreambuf_iterator<char>(in), {});
  }
  service::Server server(registry, Palette::load(a.palette), opt);
  const int port = server.bind();
  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cout << "listening on " << a.host << ":" << port << " with " << registry.all().size() << " checkpoint(s)"
            << std::endl;
  server.listen();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"House layout generation from bubble diagrams"};
  app.require_subcommand(1);
  int rc = 0;

  SynthArgs synth;
  auto* s = app.add_subcommand("synth-corpus", "Write a synthetic layout corpus");
  s->add_option("--out", synth.out, "Corpus directory")->required();
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--per-group", synth.per_group, "Samples in every room-count group")->check(CLI::NonNegativeNumber);
  s->add_option("--counts", synth.counts, "Samples per group 1-3,4-6,7-9,10-12,13+")->delimiter(',');
  s->add_option("--max-rooms", synth.max_rooms, "Largest room count in 13+")->check(CLI::Range(13, kMaxRooms));
  s->add_option("--min-side", synth.min_side, "Smallest room side in pixels");
  s->callback([&] { rc = run_synth(synth); });

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train on every group except the held-out one");
  t->add_option("--corpus", train.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  t->add_option("--group", train.group, "Held-out group")->required()->check(CLI::IsMember(kGroupChoices));
  t->add_option("--ablation", train.ablation, "Model variant")->check(CLI::IsMember(kAblationChoices));
  t->add_option("--preset", train.preset, "Architecture preset")->check(CLI::IsMember({"standard", "tiny"}));
  t->add_option("--iters", train.iters, "Training iterations")->check(CLI::NonNegativeNumber);
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--out", train.out, std::string("Checkpoint path (default: $") + kCheckpointDirEnv + ")");
  t->add_option("--batch-size", train.batch_size)->check(CLI::PositiveNumber);
  t->add_option("--lr-g", train.lr_g, "Generator learning rate");
  t->add_option("--lr-d", train.lr_d, "Critic learning rate");
  t->add_option("--n-critic", train.n_critic, "Critic updates per generator update")->check(CLI::PositiveNumber);
  t->add_option("--gp-weight", train.gp_weight, "Gradient penalty weight");
  t->add_option("--checkpoint-every", train.checkpoint_every, "Intermediate checkpoint period");
  t->add_option("--metrics-log", train.metrics_log, "Loss CSV");
  t->add_option("--batch-audit", train.batch_audit, "Per-iteration batch sample ids");
  t->add_option("--resume", train.resume, "Continue from a checkpoint");
  t->add_flag("--quiet", train.quiet, "No progress lines");
  t->callback([&] { rc = run_train(train); });

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate layouts for a diagram file");
  g->add_option("--ckpt", gen.ckpt, "Checkpoint")->required();
  g->add_option("--diagram", gen.diagram, "Diagram JSON")->required()->check(CLI::ExistingFile);
  g->add_option("--samples", gen.samples, "Number of layouts")->check(CLI::PositiveNumber);
  g->add_option("--seed", gen.seed, "Noise seed");
  g->add_option("--pin", gen.pin, "Noise record JSON to reuse")->check(CLI::ExistingFile);
  g->add_option("--out", gen.out, "Output directory (default: print the response)");
  g->add_flag("--masks", gen.masks, "Include raw masks");
  g->add_flag("--render", gen.render, "Write 256x256 PPM renders");
  g->callback([&] { rc = run_generate(gen); });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score a checkpoint on a corpus group");
  e->add_option("--ckpt", ev.ckpt, "Checkpoint")->required();
  e->add_option("--corpus", ev.corpus, "Corpus directory")->required()->check(CLI::ExistingDirectory);
  auto group_choices = kGroupChoices;
  group_choices.push_back("all");
  e->add_option("--group", ev.group, "Group to evaluate, or all")->required()->check(CLI::IsMember(group_choices));
  e->add_option("--metric", ev.metric, "compat or fid")->required()->check(CLI::IsMember({"compat", "fid"}));
  e->add_option("--samples", ev.samples, "Diagrams per group (default: protocol value)")->check(CLI::PositiveNumber);
  e->add_option("--variations", ev.variations, "Layouts per diagram (default: protocol value)")
      ->check(CLI::PositiveNumber);
  e->add_option("--timeout", ev.timeout, "Edit-distance budget per pair, seconds")->check(CLI::PositiveNumber);
  e->add_option("--ged-bound", ev.ged_bound, "Edit-distance upper bound")->check(CLI::PositiveNumber);
  e->add_option("--labels", ev.labels, "Room labels in the edit distance: auto, use or ignore")
      ->check(CLI::IsMember({"auto", "use", "ignore"}));
  e->add_option("--features", ev.features, "Feature extractor for fid")
      ->check(CLI::IsMember(feature_extractor_ids()));
  e->add_option("--seed", ev.seed, "Sampling and noise seed");
  e->add_option("--workers", ev.workers, "Edit-distance worker threads (0: one per core)");
  e->add_option("--report", ev.report, "Report JSON path (default: print)");
  e->callback([&] { rc = run_evaluate(ev); });

  ServeArgs serve;
  auto* v = app.add_subcommand("serve", "Run the HTTP generation service");
  v->add_option("--ckpt", serve.ckpts, "Checkpoint to load (repeatable)");
  v->add_option("--ckpt-dir", serve.ckpt_dir, std::string("Load every checkpoint here (default: $") +
                                                  kCheckpointDirEnv + ")");
  v->add_option("--host", serve.host);
  v->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
  v->add_option("--workers", serve.workers, "Concurrent requests")->check(CLI::PositiveNumber);
  v->add_option("--palette", serve.palette)->check(CLI::ExistingFile);
  v->add_option("--openapi", serve.openapi);
  v->callback([&] { rc = run_serve(serve); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return rc;
}
