#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "anomalens/contribution/attribution_metrics.hpp"
#include "anomalens/data/multimodal_stream.hpp"
#include "anomalens/error.hpp"
#include "anomalens/multimodal/mae.hpp"
#include "anomalens/multimodal/mae_training.hpp"
#include "anomalens/multimodal/multimodal_detector.hpp"
#include "generators.hpp"

using namespace anomalens;
using namespace anomalens::multimodal;
using namespace anomalens::testing;

namespace {

ModalitySpec spec(const char* name, Index input, Index code, nn::Activation act = nn::Activation::kRelu) {
  return ModalitySpec{name, input, code, act, act, nn::Activation::kIdentity};
}

// Every parameter with random values, biases included.
MaeNetwork random_mae(const ModalitySchema& schema, Rng& rng) {
  MaeNetwork net = MaeNetwork::glorot(schema, rng);
  for (std::size_t k = 0; k < schema.type_count(); ++k) {
    for (nn::Layer* l : {&net.params(k).encoder, &net.params(k).fusion, &net.params(k).defusion,
                         &net.params(k).decoder}) {
      l->weights = random_matrix(rng, l->weights.rows(), l->weights.cols());
      l->biases = random_vector(rng, l->biases.size(), -0.3, 0.3);
    }
  }
  return net;
}

std::vector<nn::Layer*> layers_of(MaeNetwork& net) {
  std::vector<nn::Layer*> out;
  for (std::size_t k = 0; k < net.schema().type_count(); ++k) {
    auto& p = net.params(k);
    out.insert(out.end(), {&p.encoder, &p.fusion, &p.defusion, &p.decoder});
  }
  return out;
}

std::vector<const nn::Layer*> layers_of(const MaeGradients& g) {
  std::vector<const nn::Layer*> out;
  for (const auto& p : g) out.insert(out.end(), {&p.encoder, &p.fusion, &p.defusion, &p.decoder});
  return out;
}

Vector flatten(const std::vector<const nn::Layer*>& layers) {
  std::vector<double> v;
  for (const auto* l : layers) {
    v.insert(v.end(), l->weights.data(), l->weights.data() + l->weights.size());
    v.insert(v.end(), l->biases.data(), l->biases.data() + l->biases.size());
  }
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

Vector flatten(MaeNetwork& net) {
  auto layers = layers_of(net);
  return flatten(std::vector<const nn::Layer*>(layers.begin(), layers.end()));
}

void assign(MaeNetwork& net, const Vector& p) {
  Index i = 0;
  for (auto* l : layers_of(net)) {
    for (Index j = 0; j < l->weights.size(); ++j) l->weights.data()[j] = p[i++];
    for (Index j = 0; j < l->biases.size(); ++j) l->biases[j] = p[i++];
  }
}

bool same_layer(const nn::Layer& a, const nn::Layer& b) {
  return a.weights == b.weights && a.biases == b.biases;
}

// Two types driven by the same two latent factors, values in [0, 1].
std::vector<Dataset> coupled_data(Rng& rng, Index records) {
  Dataset a(4, records), b(3, records);
  for (Index t = 0; t < records; ++t) {
    const double u = rng.uniform(), v = rng.uniform();
    a.col(t) << u, v, 0.5 * (u + v), 0.3 * u + 0.2;
    b.col(t) << v, 0.5 * u + 0.25 * v, 1.0 - u;
  }
  return {a, b};
}

}  // namespace

TEST_CASE("schema validation") {
  ModalitySchema s{{spec("a", 4, 2), spec("b", 3, 2)}, 3};
  CHECK_NOTHROW(s.validate());
  CHECK(s.total_input() == 7);
  CHECK(s.input_offsets() == std::vector<Index>{0, 4});
  s.shared_size = 4;
  CHECK_THROWS_AS(s.validate(), DataError);
  s.shared_size = 3;
  s.types[0].code_size = 4;
  CHECK_THROWS_AS(s.validate(), DataError);
  CHECK_THROWS_AS(ModalitySchema{}.validate(), DataError);
}

TEST_CASE("forward: zero parameters give zero reconstructions, sizes are checked") {
  ModalitySchema s{{spec("a", 4, 2, nn::Activation::kIdentity), spec("b", 3, 2, nn::Activation::kIdentity)}, 3};
  Rng rng(1);
  MaeNetwork net = MaeNetwork::glorot(s, rng);
  for (auto* l : layers_of(net)) l->weights.setZero();
  const std::vector<Vector> in{Vector::Ones(4), Vector::Ones(3)};
  const auto acts = net.forward(in);
  CHECK(acts.reconstructions[0].isZero(0.0));
  CHECK(acts.reconstructions[1].isZero(0.0));
  const std::vector<Vector> bad{Vector::Ones(4), Vector::Ones(2)};
  CHECK_THROWS_WITH_AS(net.forward(bad), doctest::Contains("b"), DataError);
}

TEST_CASE("forward: shared layer sums every type's fusion term inside one activation") {
  ModalitySchema s{{spec("a", 3, 2), spec("b", 3, 2)}, 2, nn::Activation::kRelu};
  Rng rng(2);
  const MaeNetwork net = random_mae(s, rng);
  const std::vector<Vector> in{random_vector(rng, 3), random_vector(rng, 3)};
  const auto acts = net.forward(in);
  Vector pre = Vector::Zero(2);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& p = net.params()[k];
    const Vector code = nn::affine_activate(p.encoder.weights, p.encoder.biases, p.encoder.activation, in[k]);
    CHECK(code == acts.codes[k]);
    pre += p.fusion.weights * code + p.fusion.biases;
  }
  CHECK((acts.shared - pre.cwiseMax(0.0)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("K=1 reduces bit-exactly to the plain five-layer network") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    ModalitySchema s{{ModalitySpec{"only", 6, 4, random_activation(rng), random_activation(rng), random_activation(rng)}},
                     3, random_activation(rng)};
    const MaeNetwork mae = random_mae(s, rng);
    const nn::DenseNetwork dense = mae.to_dense();
    REQUIRE(dense.depth() == 4);
    const Vector x = random_vector(rng, 6, 0.0, 1.0);
    const std::vector<Vector> in{x};
    CHECK(mae.forward(in).reconstructions[0] == dense.output(x));

    const double w[] = {1.0};
    std::vector<double> per_type;
    std::vector<Vector> grad;
    const double wmse = mae.weighted_mse(in, w, &per_type, &grad);
    CHECK(wmse == nn::reconstruction_mse(dense, x));
    CHECK(per_type[0] == wmse);
    CHECK(grad[0] == nn::grad_input(dense, x));
  }
}

TEST_CASE("property: MAE gradients match finite differences") {
  Rng rng(4);
  int checked = 0;
  for (int t = 0; t < 400 && checked < 40; ++t) {
    const Index n0 = 2 + static_cast<Index>(rng.below(4)), n1 = 2 + static_cast<Index>(rng.below(4));
    ModalitySchema s{{ModalitySpec{"a", n0, 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n0 - 1))),
                                   random_activation(rng), random_activation(rng), random_activation(rng)},
                      ModalitySpec{"b", n1, 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n1 - 1))),
                                   random_activation(rng), random_activation(rng), random_activation(rng)}},
                     1, random_activation(rng)};
    MaeNetwork net = random_mae(s, rng);
    const std::vector<Vector> in{random_vector(rng, n0, 0.0, 1.0), random_vector(rng, n1, 0.0, 1.0)};
    const double w[] = {0.3, 0.7};

    // Skip samples that sit on a relu kink anywhere in the graph.
    const auto acts = net.forward(in);
    bool near_kink = false;
    auto check_pre = [&](const Vector& pre, nn::Activation a) {
      if (a == nn::Activation::kRelu && pre.cwiseAbs().minCoeff() < 1e-3) near_kink = true;
    };
    Vector fused = Vector::Zero(1);
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& p = net.params()[k];
      check_pre(p.encoder.weights * in[k] + p.encoder.biases, p.encoder.activation);
      check_pre(p.defusion.weights * acts.shared + p.defusion.biases, p.defusion.activation);
      check_pre(p.decoder.weights * acts.defused[k] + p.decoder.biases, p.decoder.activation);
      fused += p.fusion.weights * acts.codes[k] + p.fusion.biases;
    }
    check_pre(fused, s.shared);
    if (near_kink) continue;

    // Input gradient.
    std::vector<Vector> grad;
    net.weighted_mse(in, w, nullptr, &grad);
    Vector joined(n0 + n1);
    joined << in[0], in[1];
    const Vector fd_in = central_difference(
        [&](const Vector& z) {
          const std::vector<Vector> parts{z.head(n0), z.tail(n1)};
          return net.weighted_mse(parts, w, nullptr, nullptr);
        },
        joined, 1e-6);
    Vector analytic_in(n0 + n1);
    analytic_in << grad[0], grad[1];
    CHECK(relative_error(analytic_in, fd_in, 1e-7) < 1e-4);

    // Parameter gradient with the input held fixed as the target.
    std::vector<Matrix> batch_in{in[0], in[1]};
    const MaeBatch batch = net.forward_batch(batch_in);
    std::vector<Matrix> deltas;
    for (std::size_t k = 0; k < 2; ++k) {
      deltas.push_back(2.0 * w[k] * (batch.outputs[k] - batch_in[k]) / static_cast<double>(in[k].size()));
    }
    MaeGradients g = zero_gradients(net);
    backpropagate(net, batch, deltas, &g, nullptr);
    const Vector p0 = flatten(net);
    MaeNetwork probe = net;
    const Vector fd_p = central_difference(
        [&](const Vector& p) {
          assign(probe, p);
          double loss = 0.0;
          const auto a = probe.forward(in);
          for (std::size_t k = 0; k < 2; ++k) {
            loss += w[k] * (a.reconstructions[k] - in[k]).squaredNorm() / static_cast<double>(in[k].size());
          }
          return loss;
        },
        p0, 1e-6);
    CHECK(relative_error(flatten(layers_of(g)), fd_p, 1e-7) < 1e-4);
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("learnability weights") {
  const double nu[] = {0.1, 0.3};
  const Vector w = learnability_weights(nu);
  CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(0.75 * 0.2 + 0.25 * 0.4 == doctest::Approx(0.25));

  const double zero[] = {0.0, 1.0};
  CHECK(learnability_weights(zero)[0] == doctest::Approx(1.0));
  const double negative[] = {-1.0};
  CHECK_THROWS_AS(learnability_weights(negative), DataError);

  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + rng.below(6));
    for (double& x : v) x = std::pow(10.0, rng.uniform(-6.0, 1.0));
    const Vector wt = learnability_weights(v);
    CHECK(std::abs(wt.sum() - 1.0) <= 1e-12);
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = 0; b < v.size(); ++b)
        if (v[a] < v[b]) CHECK(wt[static_cast<Index>(a)] > wt[static_cast<Index>(b)]);
  }
}

TEST_CASE("wMSE of a hand-built detector") {
  // Zero weights and identity activations reconstruct zero, so MSE_k = ||x_k||^2 / N_k.
  ModalitySchema s{{spec("a", 2, 1, nn::Activation::kIdentity), spec("b", 2, 1, nn::Activation::kIdentity)}, 1,
                   nn::Activation::kIdentity};
  Rng rng(6);
  MaeNetwork net = MaeNetwork::glorot(s, rng);
  for (auto* l : layers_of(net)) l->weights.setZero();
  std::vector<detection::Normalizer> norms(2, detection::Normalizer(Vector::Zero(2), Vector::Ones(2)));
  const MultimodalDetector det(net, norms, Vector{{0.1, 0.3}}, 0.0, 0.0, 0.2);
  const std::vector<Vector> in{Vector::Constant(2, std::sqrt(0.2)), Vector::Constant(2, std::sqrt(0.4))};
  const auto score = det.score(in);
  CHECK(score.per_type_mse[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(score.per_type_mse[1] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(score.wmse == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(det.evaluate(in).anomalous);
  const std::vector<Vector> zero{Vector::Zero(2), Vector::Zero(2)};
  CHECK(det.score(zero).wmse == 0.0);
  CHECK(det.split(det.normalize_concatenated(in))[1] == in[1]);
}

TEST_CASE("pretrain_outer: K=1 matches plain shallow training and lowers the loss") {
  Rng rng(7);
  const auto data = coupled_data(rng, 200);
  ModalitySchema s{{spec("a", 4, 2), spec("b", 3, 2)}, 3};
  MaeNetwork start = MaeNetwork::glorot(s, rng);
  activate_relu_biases(start, data);
  nn::TrainConfig cfg{.epochs = 40, .batch_size = 20, .learning_rate = 0.1, .weight_decay = 0.0, .seed = 9};

  auto shallow_mse = [&](const MaeNetwork& net, std::size_t k) {
    const auto& p = net.params()[k];
    return nn::reconstruction_mse_batch(nn::DenseNetwork({p.encoder, p.decoder}), data[k]).mean();
  };
  MaeNetwork net = start;
  pretrain_outer(net, data, cfg);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(shallow_mse(net, k) <= shallow_mse(start, k));
    CHECK(same_layer(net.params()[k].fusion, start.params()[k].fusion));
    CHECK(same_layer(net.params()[k].defusion, start.params()[k].defusion));
  }

  // Each type trains in isolation: type b's result ignores type a's data.
  MaeNetwork other = start;
  std::vector<Dataset> altered = data;
  altered[0] = random_matrix(rng, 4, 200, 0.0, 1.0);
  pretrain_outer(other, altered, cfg);
  CHECK(same_layer(other.params()[1].encoder, net.params()[1].encoder));
  CHECK(same_layer(other.params()[1].decoder, net.params()[1].decoder));

  nn::TrainConfig plain = cfg;
  plain.seed = derive_seed(cfg.seed, 200 + 1);
  const auto& p = start.params()[1];
  const auto trained = nn::sgd_train(nn::DenseNetwork({p.encoder, p.decoder}), data[1], plain);
  CHECK(same_layer(trained.network.layer(0), net.params()[1].encoder));
}

TEST_CASE("pretrain_inner: freeze contract and linear subspace oracle") {
  Rng rng(8);
  const auto data = coupled_data(rng, 200);
  const auto I = nn::Activation::kIdentity;
  ModalitySchema s{{spec("a", 4, 2, I), spec("b", 3, 2, I)}, 3, I};
  MaeNetwork net = MaeNetwork::glorot(s, rng);
  nn::TrainConfig outer{.epochs = 100, .batch_size = 20, .learning_rate = 0.1, .weight_decay = 0.0, .seed = 1};
  pretrain_outer(net, data, outer);
  const MaeNetwork before = net;

  auto code_mse = [&](const MaeNetwork& m) {
    std::vector<Matrix> codes;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& e = m.params()[k].encoder;
      codes.push_back(nn::affine_activate_batch(e.weights, e.biases, e.activation, data[k]));
    }
    const Matrix shared = m.fuse_batch(codes);
    double total = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& d = m.params()[k].defusion;
      const Matrix back = nn::affine_activate_batch(d.weights, d.biases, d.activation, shared);
      total += (back - codes[k]).squaredNorm() / static_cast<double>(codes[k].size());
    }
    return total;
  };

  nn::TrainConfig inner{.epochs = 300, .batch_size = 20, .learning_rate = 0.05, .weight_decay = 0.0, .seed = 2};
  const double start_loss = code_mse(net);
  pretrain_inner(net, data, inner);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(same_layer(net.params()[k].encoder, before.params()[k].encoder));
    CHECK(same_layer(net.params()[k].decoder, before.params()[k].decoder));
  }
  // Both types' codes live in a two-dimensional latent space, narrower than
  // the shared layer, so a linear middle section can reproduce them.
  CHECK(code_mse(net) < start_loss);
  CHECK(code_mse(net) <= 1e-3);
}

TEST_CASE("train_mae_network: fine-tuning lowers the joint objective, seeds reproduce") {
  Rng rng(10);
  const auto data = coupled_data(rng, 300);
  ModalitySchema s{{spec("a", 4, 2), spec("b", 3, 2)}, 3};
  MaeTrainConfig cfg{.pretrain = {.epochs = 30, .batch_size = 20, .learning_rate = 0.1},
                     .finetune = {.epochs = 30, .batch_size = 20, .learning_rate = 0.03},
                     .inner = nn::TrainConfig{.epochs = 30, .batch_size = 20, .learning_rate = 0.01},
                     .active_relu = true,
                     .seed = 4};
  const MaeNetwork a = train_mae_network(s, data, cfg);
  const MaeNetwork b = train_mae_network(s, data, cfg);
  CHECK(a.params()[0].encoder.weights == b.params()[0].encoder.weights);
  CHECK(a.params()[1].decoder.biases == b.params()[1].decoder.biases);

  // Replay the schedule up to the end of pre-training and compare.
  MaeTrainConfig no_finetune = cfg;
  no_finetune.finetune.epochs = 0;
  const MaeNetwork pre = train_mae_network(s, data, no_finetune);
  CHECK(joint_objective(a, data) <= joint_objective(pre, data));

  const MultimodalDetector det = train_multimodal(data, s, cfg);
  CHECK(std::abs(det.weights().sum() - 1.0) <= 1e-12);
  CHECK(det.threshold() == doctest::Approx(det.wmse_mean() + 3.0 * det.wmse_std()));
  const auto mse = per_type_mse(det.network(), std::vector<Dataset>{det.normalizers()[0].apply(data[0]),
                                                                     det.normalizers()[1].apply(data[1])});
  CHECK(det.nu()[0] == doctest::Approx(mse[0].mean()).epsilon(1e-14));
}

TEST_CASE("multimodal contribution: K=1 matches the plain path, clean records get zero") {
  Rng rng(11);
  const Dataset train = random_matrix(rng, 5, 80, 0.0, 1.0);
  ModalitySchema s{{spec("only", 5, 3)}, 2};
  MaeTrainConfig cfg{.pretrain = {.epochs = 10, .batch_size = 10, .learning_rate = 0.05},
                     .finetune = {.epochs = 10, .batch_size = 10, .learning_rate = 0.05},
                     .active_relu = true,
                     .seed = 1};
  const std::vector<Dataset> raw{train};
  const MultimodalDetector mm = train_multimodal(raw, s, cfg);
  const detection::AutoencoderDetector plain(
      mm.network().to_dense(), mm.normalizers()[0],
      detection::compute_training_stats(mm.network().to_dense(), mm.normalizers()[0], train), mm.threshold());

  Vector x = train.col(0);
  x[2] += 3.0;
  const std::vector<Vector> in{x};
  const auto multi = mae_estimate_contribution(mm, in);
  const auto single = contribution::estimate_contribution(plain, x);
  CHECK(multi.combined.eta == single.eta);
  CHECK(multi.combined.lambda_used == single.lambda_used);
  CHECK(multi.per_type[0].eta == single.eta);

  MultimodalDetector lenient = mm;
  lenient.set_threshold(1e9);
  const auto quiet = mae_estimate_contribution(lenient, in);
  CHECK(quiet.combined.eta.isZero(0.0));
  CHECK(quiet.combined.iterations == 0);
}

TEST_CASE("a fault confined to one type concentrates the contribution there") {
  data::MultimodalConfig g;
  g.records = 600;
  g.seed = 21;
  const data::MultimodalGenerator gen(g);
  const auto train = gen.generate();
  const std::vector<Index> sizes = gen.type_sizes();
  const std::vector<Index> codes{6, 4, 10};
  ModalitySchema s;
  s.shared_size = 8;
  for (std::size_t k = 0; k < 3; ++k) s.types.push_back(spec(train.type_names[k].c_str(), sizes[k], codes[k]));
  MaeTrainConfig cfg{.pretrain = {.epochs = 60, .batch_size = 50, .learning_rate = 0.1},
                     .finetune = {.epochs = 60, .batch_size = 50, .learning_rate = 0.03},
                     .inner = nn::TrainConfig{.epochs = 60, .batch_size = 50, .learning_rate = 0.01},
                     .active_relu = true,
                     .seed = 2};
  const auto det = train_multimodal(train.types, s, cfg);

  data::MultimodalConfig tg = g;
  tg.seed = 22;
  tg.records = 20;
  auto test = data::MultimodalGenerator(tg).generate();
  gen.inject(test, data::MultimodalFault{.archetype = data::FaultArchetype::kCounterSpike, .start = 10,
                                         .duration = 1, .seed = 5});
  std::vector<Vector> in;
  for (std::size_t k = 0; k < 3; ++k) in.push_back(test.types[k].col(10));
  REQUIRE(det.evaluate(in).anomalous);
  const auto result = mae_estimate_contribution(det, in);
  const auto top = contribution::top_k_dimensions(result.combined.eta, 5);
  const Index mib_begin = sizes[0], mib_end = sizes[0] + sizes[1];
  int in_mib = 0;
  for (const auto& e : top.entries) in_mib += (e.index >= mib_begin && e.index < mib_end) ? 1 : 0;
  CHECK(in_mib >= 3);
  const auto& truth = test.events[0].affected[0].dims;
  const Index best = top.entries[0].index - mib_begin;
  CHECK(std::find(truth.begin(), truth.end(), best) != truth.end());
}
