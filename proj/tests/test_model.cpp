#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "psi/error.hpp"
#include "psi/model.hpp"

using namespace psi;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "psi_model_tests";
  fs::create_directories(dir);
  return dir / name;
}

Checkpoint make_checkpoint(MutualOp op = MutualOp::interactive_mlp) {
  Vocabulary vocab;
  vocab.add("good");
  vocab.add("food");
  EncoderConfig cfg{vocab.size(), 4, 4, 6};
  Checkpoint ckpt;
  ckpt.model = Model::create(cfg, op, 42);
  ckpt.vocab = vocab;
  ckpt.max_len = 8;
  return ckpt;
}

}  // namespace

TEST_CASE("checkpoint round trips every parameter exactly") {
  Checkpoint ckpt = make_checkpoint();
  fs::path p = temp_file("roundtrip.json");
  save_checkpoint(p, ckpt);
  Checkpoint loaded = load_checkpoint(p);

  CHECK(loaded.max_len == 8);
  CHECK(loaded.vocab.tokens() == ckpt.vocab.tokens());
  CHECK(loaded.model.encoder.embedding.value() ==
        ckpt.model.encoder.embedding.value());
  CHECK(loaded.model.encoder.w2.value() == ckpt.model.encoder.w2.value());
  REQUIRE(loaded.model.head.has_value());
  CHECK(loaded.model.head->op() == MutualOp::interactive_mlp);
  CHECK(loaded.model.head->w1.value() == ckpt.model.head->w1.value());
  CHECK(loaded.model.classifier.weight.value() ==
        ckpt.model.classifier.weight.value());
}

TEST_CASE("baseline checkpoints have no head and load back that way") {
  Checkpoint ckpt = make_checkpoint();
  ckpt.model = Model::create_baseline(ckpt.model.encoder.config(), 7);
  fs::path p = temp_file("baseline.json");
  save_checkpoint(p, ckpt);
  Checkpoint loaded = load_checkpoint(p);
  CHECK_FALSE(loaded.model.head.has_value());
}

TEST_CASE("parameter-free head variants round trip without tensors") {
  Checkpoint ckpt = make_checkpoint(MutualOp::subtract_square);
  CHECK(ckpt.model.head->parameters().empty());
  fs::path p = temp_file("paramfree.json");
  save_checkpoint(p, ckpt);
  Checkpoint loaded = load_checkpoint(p);
  CHECK(loaded.model.head->op() == MutualOp::subtract_square);
  CHECK(loaded.model.head->parameters().empty());
}

TEST_CASE("mismatched tensor shapes are rejected on load") {
  Checkpoint ckpt = make_checkpoint();
  nlohmann::json j = checkpoint_to_json(ckpt);
  j["encoder"]["w1"].erase(0);  // one value short
  CHECK_THROWS_AS(checkpoint_from_json(j), IoError);

  nlohmann::json j2 = checkpoint_to_json(ckpt);
  j2["classifier"]["dim"] = 99;
  CHECK_THROWS_AS(checkpoint_from_json(j2), IoError);

  nlohmann::json j3 = checkpoint_to_json(ckpt);
  j3["version"] = 2;
  CHECK_THROWS_AS(checkpoint_from_json(j3), IoError);

  nlohmann::json j4 = checkpoint_to_json(ckpt);
  j4["encoder"]["vocab_size"] = 1000;
  CHECK_THROWS_AS(checkpoint_from_json(j4), IoError);
}

TEST_CASE("optimizer partition is disjoint and covers everything") {
  Checkpoint ckpt = make_checkpoint();
  const Model& m = ckpt.model;
  auto backbone = m.backbone_parameters();
  auto interaction = m.interaction_parameters();
  auto all = m.parameters();
  CHECK(backbone.size() + interaction.size() == all.size());
  for (const Tensor& a : backbone)
    for (const Tensor& b : interaction) CHECK_FALSE(a.same_node(b));

  // every parameter is reachable from exactly one optimizer group
  std::size_t matched = 0;
  for (const Tensor& p : all) {
    bool in_backbone = false, in_interaction = false;
    for (const Tensor& b : backbone) in_backbone |= p.same_node(b);
    for (const Tensor& i : interaction) in_interaction |= p.same_node(i);
    CHECK(in_backbone != in_interaction);
    ++matched;
  }
  CHECK(matched == all.size());
}

TEST_CASE("zero_grad clears gradients and leaves values alone") {
  Checkpoint ckpt = make_checkpoint();
  Tensor w = ckpt.model.encoder.w1;
  const double before = w.value()[0];
  w.grad()[0] = 3.5;
  ckpt.model.zero_grad();
  CHECK(w.grad()[0] == 0.0);
  CHECK(w.value()[0] == before);
}

TEST_CASE("loading a missing or corrupt file is an io error") {
  CHECK_THROWS_AS(load_checkpoint(temp_file("does_not_exist.json")), IoError);
  fs::path p = temp_file("garbage.json");
  std::ofstream(p) << "{not json";
  CHECK_THROWS_AS(load_checkpoint(p), IoError);
}
