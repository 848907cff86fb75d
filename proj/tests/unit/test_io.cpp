#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "anomalens/error.hpp"
#include "anomalens/io/config.hpp"
#include "anomalens/io/model_io.hpp"
#include "generators.hpp"

using namespace anomalens;
using namespace anomalens::testing;

TEST_CASE("config: parsing, typed reads and unused keys") {
  const auto c = io::Config::parse(
      "# comment\n"
      "train.epochs = 12\n"
      "train.learning_rate=0.5\n"
      "contribution.lambdas = 0.1, 0.01\n"
      "ae.active_relu = false\n"
      "typo.key = 3\n");
  CHECK(c.get_int("train.epochs", 0) == 12);
  CHECK(c.get_double("train.learning_rate", 0.0) == 0.5);
  CHECK(c.get_doubles("contribution.lambdas", {}) == std::vector<double>{0.1, 0.01});
  CHECK_FALSE(c.get_bool("ae.active_relu", true));
  CHECK(c.get_string("missing", "x") == "x");
  CHECK(c.unused_keys() == std::vector<std::string>{"typo.key"});
  CHECK_THROWS_AS(io::Config::parse("no equals sign\n"), UsageError);
  CHECK_THROWS_AS(io::Config::parse("a = b\n").get_double("a", 0.0), UsageError);
  CHECK_THROWS_AS(io::Config::load("/nonexistent/anomalens.cfg"), UsageError);
}

TEST_CASE("config: train and contribution sections override defaults") {
  const auto c = io::Config::parse("t.epochs = 7\nt.batch_size = 3\ncontribution.max_iters = 9\n");
  const auto tc = io::train_config(c, "t", nn::TrainConfig{.learning_rate = 0.2});
  CHECK(tc.epochs == 7);
  CHECK(tc.batch_size == 3);
  CHECK(tc.learning_rate == 0.2);
  const auto cc = io::contribution_config(c);
  CHECK(cc.max_iters == 9);
  CHECK(cc.lambdas.size() == 8);
}

TEST_CASE("seed precedence") {
  auto c = io::Config::parse("seed = 5\n");
  ::setenv("ANOMALENS_SEED", "9", 1);
  CHECK(io::resolve_seed(3, c) == 3);
  CHECK(io::resolve_seed(std::nullopt, c) == 5);
  CHECK(io::resolve_seed(std::nullopt, io::Config{}) == 9);
  ::unsetenv("ANOMALENS_SEED");
  CHECK(io::resolve_seed(std::nullopt, io::Config{}) == 0);
}

TEST_CASE("autoencoder detector round trip scores bit-exactly") {
  Rng rng(1);
  const Dataset train = random_matrix(rng, 7, 60, 0.0, 100.0);
  const Index hidden[] = {3};
  auto plan = detection::ActivationPlan::uniform(1, nn::Activation::kRelu, nn::Activation::kIdentity);
  plan.relu_bias = detection::ActivationPlan::ReluBias::kActive;
  const auto det = detection::train_detector(train, hidden, plan, {.epochs = 5, .batch_size = 10, .learning_rate = 0.05});
  const std::string text = io::detector_to_json(det);
  CHECK(io::model_kind(text) == "ae");
  const auto back = io::detector_from_json(text);
  const Dataset probe = random_matrix(rng, 7, 20, -50.0, 150.0);
  CHECK(back.score_batch(probe) == det.score_batch(probe));
  CHECK(back.threshold() == det.threshold());
  CHECK(back.outlier_degree(probe.col(0)) == det.outlier_degree(probe.col(0)));
  CHECK(io::detector_to_json(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "anomalens_io_model.json";
  io::write_text(path, text);
  CHECK(io::read_text(path) == text);
  CHECK_THROWS_AS(io::detector_from_json("{}"), DataError);
  CHECK_THROWS_AS(io::model_kind("not json"), DataError);
  CHECK_THROWS_AS(io::pca_from_json(text), DataError);
}

TEST_CASE("pca round trip scores bit-exactly") {
  Rng rng(2);
  const Dataset train = random_matrix(rng, 5, 40);
  const auto pca = detection::PcaBaseline::fit(train, 2);
  const auto back = io::pca_from_json(io::pca_to_json(pca));
  const Dataset probe = random_matrix(rng, 5, 10, -2.0, 2.0);
  CHECK(back.score_batch(probe) == pca.score_batch(probe));
}

TEST_CASE("multimodal detector round trip scores bit-exactly") {
  Rng rng(3);
  const std::vector<Dataset> train{random_matrix(rng, 4, 50, 0.0, 5.0), random_matrix(rng, 3, 50, 0.0, 5.0)};
  multimodal::ModalitySchema s{{{"a", 4, 2}, {"b", 3, 2}}, 3};
  multimodal::MaeTrainConfig cfg{.pretrain = {.epochs = 3, .batch_size = 10},
                                 .finetune = {.epochs = 3, .batch_size = 10},
                                 .active_relu = true,
                                 .seed = 1};
  const auto det = multimodal::train_multimodal(train, s, cfg);
  const std::string text = io::multimodal_to_json(det);
  CHECK(io::model_kind(text) == "mae");
  const auto back = io::multimodal_from_json(text);
  CHECK(back.schema().types[1].name == "b");
  CHECK(back.nu() == det.nu());
  CHECK(back.weights() == det.weights());
  CHECK(back.threshold() == det.threshold());
  for (Index t = 0; t < 10; ++t) {
    const std::vector<Vector> in{random_vector(rng, 4, -1.0, 6.0), random_vector(rng, 3, -1.0, 6.0)};
    const auto a = det.score(in);
    const auto b = back.score(in);
    CHECK(a.wmse == b.wmse);
    CHECK(a.per_type_mse == b.per_type_mse);
  }
}
