#include <gtest/gtest.h>

#include <thread>

#include "housegan/service/server.hpp"

namespace housegan::service {
namespace {

namespace fs = std::filesystem;

// A small untrained checkpoint on disk, shared by the tests in this file.
class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "housegan_service_test";
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    Checkpoint ck;
    ck.config.arch = Architecture::tiny();
    ck.held_out = Group::k4to6;
    ck.seed = 3;
    ck.params = make_params(ck.config, 3);
    save_checkpoint(ck, dir_ / "tiny-full.ckpt");
    std::ofstream(dir_ / "notes.txt") << "not a checkpoint";
    registry_ = new ModelRegistry();
    registry_->load_directory(dir_);
  }
  static void TearDownTestSuite() {
    delete registry_;
    fs::remove_all(dir_);
  }

  static Json diagram(int rooms) {
    Json nodes = Json::array(), edges = Json::array();
    for (int i = 0; i < rooms; ++i) {
      nodes.push_back({{"id", i}, {"type", i % 10}});
      if (i > 0) edges.push_back(Json::array({i - 1, i}));
    }
    return {{"nodes", nodes}, {"edges", edges}};
  }

  static Json request(int rooms = 4) {
    return {{"diagram", diagram(rooms)}, {"num_samples", 2}, {"seed", 11}, {"checkpoint_id", "tiny-full.ckpt"}};
  }

  static int status_of(const Json& body) {
    try {
      handle_generate(body, *registry_);
    } catch (const ApiError& e) {
      return e.status();
    }
    return 200;
  }

  static inline fs::path dir_;
  static inline ModelRegistry* registry_ = nullptr;
};

TEST(Base64, KnownVectors) {
  EXPECT_EQ(base64::encode(""), "");
  EXPECT_EQ(base64::encode("f"), "Zg==");
  EXPECT_EQ(base64::encode("fo"), "Zm8=");
  EXPECT_EQ(base64::encode("foo"), "Zm9v");
  EXPECT_EQ(base64::encode("foob"), "Zm9vYg==");
  EXPECT_EQ(base64::encode("fooba"), "Zm9vYmE=");
  EXPECT_EQ(base64::encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64::decode("Zm9vYmE="), "fooba");
  EXPECT_THROW(base64::decode("Zm9"), FormatError);
  EXPECT_THROW(base64::decode("Zm=v"), FormatError);
}

TEST(Base64, FloatRoundTrip) {
  const std::vector<float> v = {0.0f, -1.0f, 1.0f, 3.25e-7f, -0.5f};
  EXPECT_EQ(base64::decode_floats(base64::encode_floats(v)), v);
  // 1.0f little-endian is 00 00 80 3f.
  EXPECT_EQ(base64::encode_floats({1.0f}), "AACAPw==");
}

TEST_F(ServiceTest, RoomTypesFollowOneHotOrderAndPalette) {
  const Json rt = roomtypes_json(Palette::load(fs::path(HOUSEGAN_CONFIG_DIR) / "palette.json"));
  ASSERT_EQ(rt.size(), 10U);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(rt[static_cast<std::size_t>(t)]["code"], t);
  EXPECT_EQ(rt[2]["name"], "bedroom");
  EXPECT_EQ(rt[2]["color"], "#ffa500");
}

TEST_F(ServiceTest, CheckpointListing) {
  const Json list = checkpoints_json(*registry_);
  ASSERT_EQ(list.size(), 1U);
  EXPECT_EQ(list[0]["id"], "tiny-full.ckpt");
  EXPECT_EQ(list[0]["preset"], "tiny");
  EXPECT_EQ(list[0]["ablation"], "full");
  EXPECT_EQ(list[0]["held_out_group"], "4-6");
}

TEST_F(ServiceTest, TenSamplesGiveTenLayouts) {
  Json r = request(5);
  r["num_samples"] = 10;
  const Json out = handle_generate(r, *registry_);
  ASSERT_EQ(out["samples"].size(), 10U);
  for (const Json& s : out["samples"]) {
    EXPECT_EQ(s["layout"]["rooms"].size(), 5U);
    EXPECT_EQ(s["noise"].size(), 5U);
    EXPECT_GE(s["compatibility"].get<double>(), 0.0);
  }
  EXPECT_EQ(out["diagram_group"], "4-6");
  EXPECT_TRUE(out["in_held_out_group"].get<bool>());
}

TEST_F(ServiceTest, SameSeedSameResponse) {
  EXPECT_EQ(handle_generate(request(), *registry_), handle_generate(request(), *registry_));
  Json other = request();
  other["seed"] = 12;
  EXPECT_NE(handle_generate(request(), *registry_)["samples"][0]["noise"],
            handle_generate(other, *registry_)["samples"][0]["noise"]);
}

TEST_F(ServiceTest, ResubmittedNoiseRegeneratesLayout) {
  const Json first = handle_generate(request(6), *registry_);
  for (const Json& s : first["samples"]) {
    Json again = request(6);
    again.erase("seed");
    again["num_samples"] = 1;
    again["pinned_noise"] = s["noise"];
    const Json out = handle_generate(again, *registry_);
    EXPECT_EQ(out["samples"][0]["layout"], s["layout"]);
    EXPECT_EQ(out["samples"][0]["noise"], s["noise"]);
  }
}

TEST_F(ServiceTest, PinnedNodesKeepTheirNoiseWhenARoomIsAdded) {
  const Json first = handle_generate(request(3), *registry_);
  Json grown = request(4);
  grown["num_samples"] = 1;
  grown["pinned_noise"] = first["samples"][0]["noise"];
  const Json out = handle_generate(grown, *registry_);
  for (const char* k : {"0", "1", "2"}) EXPECT_EQ(out["samples"][0]["noise"][k], first["samples"][0]["noise"][k]);
  EXPECT_EQ(out["samples"][0]["layout"]["rooms"].size(), 4U);
}

TEST_F(ServiceTest, MasksAreDecodable) {
  Json r = request(3);
  r["include_masks"] = true;
  const Json m = handle_generate(r, *registry_)["samples"][0]["masks"];
  EXPECT_EQ(m["shape"], Json::array({3, 8, 8}));
  const auto v = base64::decode_floats(m["data"].get<std::string>());
  ASSERT_EQ(v.size(), 3U * 8 * 8);
  for (float x : v) {
    EXPECT_GE(x, -1.0f);
    EXPECT_LE(x, 1.0f);
  }
  EXPECT_FALSE(handle_generate(request(3), *registry_)["samples"][0].contains("masks"));
}

TEST_F(ServiceTest, ErrorStatuses) {
  Json self_loop = request();
  self_loop["diagram"]["edges"] = Json::array({Json::array({1, 1})});
  EXPECT_EQ(status_of(self_loop), 400);
  Json bad_ids = request();
  bad_ids["diagram"]["nodes"][0]["id"] = 7;
  EXPECT_EQ(status_of(bad_ids), 400);
  EXPECT_EQ(status_of(request(41)), 400);
  Json zero = request();
  zero["num_samples"] = 0;
  EXPECT_EQ(status_of(zero), 400);
  Json unknown = request();
  unknown["checkpoint_id"] = "nope";
  EXPECT_EQ(status_of(unknown), 404);
  Json ghost = request(3);
  ghost["pinned_noise"] = {{"3", std::vector<double>(8, 0.0)}};
  EXPECT_EQ(status_of(ghost), 422);
  ghost["pinned_noise"] = {{"first", std::vector<double>(8, 0.0)}};
  EXPECT_EQ(status_of(ghost), 422);
  Json short_noise = request(3);
  short_noise["pinned_noise"] = {{"0", std::vector<double>(5, 0.0)}};
  EXPECT_EQ(status_of(short_noise), 400);
  EXPECT_EQ(status_of(Json::array()), 400);
}

TEST_F(ServiceTest, HttpRoundTrip) {
  ServerOptions opt;
  opt.port = 0;
  opt.workers = 2;
  opt.openapi_document = R"({"openapi":"3.1.0"})";
  Server server(*registry_, Palette(), opt);
  const int port = server.bind();
  std::thread th([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto rt = client.Get("/roomtypes");
  ASSERT_TRUE(rt);
  EXPECT_EQ(rt->status, 200);
  EXPECT_EQ(Json::parse(rt->body).size(), 10U);
  EXPECT_EQ(rt->get_header_value("Access-Control-Allow-Origin"), "*");

  auto gen = client.Post("/generate", request().dump(), "application/json");
  ASSERT_TRUE(gen);
  EXPECT_EQ(gen->status, 200);
  EXPECT_EQ(Json::parse(gen->body), handle_generate(request(), *registry_));

  Json unknown = request();
  unknown["checkpoint_id"] = "missing";
  auto nf = client.Post("/generate", unknown.dump(), "application/json");
  ASSERT_TRUE(nf);
  EXPECT_EQ(nf->status, 404);
  EXPECT_EQ(Json::parse(nf->body)["error"]["status"], 404);

  auto bad = client.Post("/generate", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto doc = client.Get("/openapi.json");
  ASSERT_TRUE(doc);
  EXPECT_EQ(Json::parse(doc->body)["openapi"], "3.1.0");

  auto missing = client.Get("/nothing-here");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  server.stop();
  th.join();
}

}  // namespace
}  // namespace housegan::service
