// Acceptance gate. Prints one PASS, FAIL or SKIP line per criterion.
// Exit status: 0 when nothing failed, 1 on any failure, 77 when every
// selected criterion was skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "anomalens/contribution/contribution.hpp"
#include "anomalens/data/nslkdd.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/eval/experiment_multimodal.hpp"
#include "anomalens/eval/experiment_nslkdd.hpp"
#include "anomalens/eval/experiment_sim61.hpp"
#include "anomalens/io/model_io.hpp"
#include "anomalens/multimodal/multimodal_detector.hpp"
#include "generators.hpp"

using namespace anomalens;
using namespace anomalens::testing;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
    notes_.push_back(std::string(ok ? "ok " : "FAILED ") + what);
  }
  void note(const std::string& text) { notes_.push_back(text); }

  Outcome outcome() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < notes_.size(); ++i) out << (i ? "; " : "") << notes_[i];
    return {failures_.empty() ? Status::kPass : Status::kFail, out.str()};
  }

 private:
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector flatten(const nn::DenseNetwork& net) {
  std::vector<double> v;
  for (const auto& l : net.layers()) {
    v.insert(v.end(), l.weights.data(), l.weights.data() + l.weights.size());
    v.insert(v.end(), l.biases.data(), l.biases.data() + l.biases.size());
  }
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

nn::DenseNetwork assign(nn::DenseNetwork net, const Vector& p) {
  Index i = 0;
  for (std::size_t k = 0; k < net.depth(); ++k) {
    auto& l = net.layer(k);
    for (Index j = 0; j < l.weights.size(); ++j) l.weights.data()[j] = p[i++];
    for (Index j = 0; j < l.biases.size(); ++j) l.biases[j] = p[i++];
  }
  return net;
}

Vector flatten(const nn::Gradients& g) {
  std::vector<double> v;
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    v.insert(v.end(), g.weights[k].data(), g.weights[k].data() + g.weights[k].size());
    v.insert(v.end(), g.biases[k].data(), g.biases[k].data() + g.biases[k].size());
  }
  return Eigen::Map<Vector>(v.data(), static_cast<Index>(v.size()));
}

Outcome gradient_check() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(0xacce551);
  int checked = 0;
  double worst_params = 0.0, worst_input = 0.0;
  bool seen[3] = {false, false, false};
  for (int trial = 0; checked < 200 && trial < 5000; ++trial) {
    const auto net = random_network(rng, 5, 10, true);
    const Vector x = random_vector(rng, net.input_dim(), 0.0, 1.0);
    const Vector target = random_vector(rng, net.input_dim(), 0.0, 1.0);
    if (!away_from_kinks(net, x, 1e-3)) continue;
    for (const auto& l : net.layers()) seen[static_cast<int>(l.activation)] = true;
    const Vector fd = central_difference(
        [&](const Vector& p) {
          const Vector out = assign(net, p).output(x);
          return (out - target).squaredNorm() / static_cast<double>(out.size());
        },
        flatten(net), 1e-6);
    worst_params = std::max(worst_params, relative_error(flatten(nn::grad_params(net, x, target)), fd, 1e-7));
    const Vector fd_x = central_difference([&](const Vector& z) { return nn::reconstruction_mse(net, z); }, x, 1e-6);
    worst_input = std::max(worst_input, relative_error(nn::grad_input(net, x), fd_x, 1e-7));
    ++checked;
  }
  const double elapsed = seconds_since(start);
  Checks c;
  c.expect(checked >= 100, std::to_string(checked) + " networks");
  c.expect(seen[0] && seen[1] && seen[2], "all three activations exercised");
  c.expect(worst_params < 1e-4, "max grad_params rel err " + fmt(worst_params));
  c.expect(worst_input < 1e-4, "max grad_input rel err " + fmt(worst_input));
  c.expect(elapsed < 30.0, "runtime " + fmt(elapsed, 3) + " s < 30 s");
  return c.outcome();
}

Outcome lasso_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(0x1a550);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(50));
    const Vector x = random_vector(rng, n, 0.0, 1.0);
    const double lambda = std::pow(10.0, rng.uniform(-4.0, -1.0));
    // Zero reconstruction: the score is ||x - eta||^2 / N.
    nn::DenseNetwork net({nn::Layer{Matrix::Zero(n, n), Vector::Zero(n), nn::Activation::kIdentity}});
    const detection::AutoencoderDetector det(
        std::move(net), detection::Normalizer(Vector::Zero(n), Vector::Ones(n)),
        detection::TrainingStats{Vector::Zero(n), Vector::Ones(n), 0.0, 0.0}, 0.0);
    contribution::ContributionConfig cfg{.lambdas = {lambda}, .step_size = std::nullopt, .initial_step = 1.0, .max_iters = 5000, .mse_stop = 0.0};
    const Vector eta = contribution::estimate_contribution(det, x, cfg).eta;
    const double t_shrink = lambda * static_cast<double>(n) / 2.0;
    for (Index i = 0; i < n; ++i) {
      const double expected = std::max(std::abs(x[i]) - t_shrink, 0.0) * (x[i] > 0 ? 1.0 : -1.0);
      worst = std::max(worst, std::abs(eta[i] - expected));
    }
  }
  const double elapsed = seconds_since(start);
  Checks c;
  c.expect(worst <= 1e-6, "50 pairs, max |eta - closed form| " + fmt(worst));
  c.expect(elapsed < 10.0, "runtime " + fmt(elapsed, 3) + " s < 10 s");
  return c.outcome();
}

Outcome sim61(bool full_scale) {
  if (full_scale && std::getenv("ANOMALENS_FULL_SCALE") == nullptr) {
    return {Status::kSkip, "full scale runs only with ANOMALENS_FULL_SCALE set"};
  }
  const auto start = std::chrono::steady_clock::now();
  eval::Sim61Params p;
  p.scale = full_scale ? 1.0 : 0.1;
  p.runs = 10;
  p.n_f_values = {10};
  p.beta_gamma = {{100.0, 50.0}};
  p.seed = 1;
  const auto report = eval::run_sim61(p);
  const double elapsed = seconds_since(start);
  const auto& cell = report.cells.front();

  using M = eval::Sim61Metric;
  const auto idx = [](M m) { return static_cast<std::size_t>(m); };
  const double contrib_recall = cell.recall[idx(M::kContribution)].mean;
  const double contrib_precision = cell.precision[idx(M::kContribution)].mean;
  double best_other = 0.0;
  for (M m : {M::kOutlierDegree, M::kReconstructionError, M::kContributionWithoutL1}) {
    best_other = std::max(best_other, cell.precision[idx(m)].mean);
  }
  Checks c;
  c.note("scale " + fmt(p.scale) + ", n_f " + std::to_string(cell.n_f));
  // The reduced variant is held to the relative orderings only; detecting
  // every fault is asserted at full size.
  const std::string exceeded =
      "threshold exceeded in " + std::to_string(cell.exceeded) + "/" + std::to_string(cell.runs) + " runs";
  if (full_scale) {
    c.expect(cell.exceeded == cell.runs, exceeded);
  } else {
    c.note(exceeded);
  }
  c.expect(cell.exceeded > 0, "at least one detected run to attribute");
  c.expect(contrib_recall >= 0.8, "contribution recall " + fmt(contrib_recall) + " >= 0.8");
  c.expect(contrib_precision >= 2.0 * best_other,
           "contribution precision " + fmt(contrib_precision) + " >= 2 x best baseline " + fmt(best_other));
  for (M m : {M::kOutlierDegree, M::kReconstructionError, M::kContributionWithoutL1, M::kContribution}) {
    c.expect(cell.recall[idx(m)].mean >= 0.7,
             std::string(eval::to_string(m)) + " recall " + fmt(cell.recall[idx(m)].mean) + " >= 0.7");
  }
  const double budget = full_scale ? 1800.0 : 180.0;
  c.expect(elapsed < budget, "runtime " + fmt(elapsed, 4) + " s < " + fmt(budget) + " s");
  return c.outcome();
}

Outcome nslkdd() {
  const char* dir = std::getenv("ANOMALENS_NSLKDD_DIR");
  if (dir == nullptr) return {Status::kSkip, "NSL-KDD files not available (set ANOMALENS_NSLKDD_DIR)"};
  const std::filesystem::path root(dir);
  eval::NslKddParams p;
  p.train_file = root / "KDDTrain+.txt";
  p.test_file = std::filesystem::exists(root / "KDDTest-21.txt") ? root / "KDDTest-21.txt" : root / "KDDTest+.txt";
  if (!std::filesystem::exists(p.train_file) || !std::filesystem::exists(p.test_file)) {
    return {Status::kSkip, "KDDTrain+.txt or the test file is missing in " + root.string()};
  }
  const auto start = std::chrono::steady_clock::now();
  const auto report = eval::run_nslkdd(p);
  const double elapsed = seconds_since(start);
  auto contains = [](const std::vector<std::string>& list, const std::string& name) {
    return std::find(list.begin(), list.end(), name) != list.end();
  };
  const auto dos = report.top_features("DoS", 10);
  const auto u2r = report.top_features("U2R", 10);
  Checks c;
  c.note(std::to_string(report.train_normals) + " training normals, " + std::to_string(report.test_records) +
         " test records");
  c.expect(report.ae_auroc_max >= 0.71, "AE AUROC " + fmt(report.ae_auroc_max) + " >= 0.71");
  c.expect(report.ae_auroc_max - report.pca_auroc_max >= 0.0,
           "AE - PCA AUROC " + fmt(report.ae_auroc_max - report.pca_auroc_max) + " >= 0");
  c.expect(contains(dos, "same_srv_rate"), "DoS top-10 has same_srv_rate");
  c.expect(contains(u2r, "service_pop_3") || contains(u2r, "root_shell"), "U2R top-10 has service_pop_3 or root_shell");
  c.expect(elapsed < 1200.0, "runtime " + fmt(elapsed, 4) + " s < 1200 s");
  return c.outcome();
}

Outcome mae_structure() {
  Rng rng(0x5eed5);
  Checks c;
  bool bit_exact = true;
  for (int t = 0; t < 50; ++t) {
    multimodal::ModalitySchema s{{multimodal::ModalitySpec{"only", 8, 5, random_activation(rng), random_activation(rng),
                                                          random_activation(rng)}},
                                 3, random_activation(rng)};
    multimodal::MaeNetwork mae = multimodal::MaeNetwork::glorot(s, rng);
    auto& p = mae.params(0);
    for (nn::Layer* l : {&p.encoder, &p.fusion, &p.defusion, &p.decoder}) {
      l->biases = random_vector(rng, l->biases.size(), -0.3, 0.3);
    }
    const nn::DenseNetwork dense = mae.to_dense();
    const Vector x = random_vector(rng, 8, 0.0, 1.0);
    const std::vector<Vector> in{x};
    const double w[] = {1.0};
    std::vector<Vector> grad;
    const double wmse = mae.weighted_mse(in, w, nullptr, &grad);
    bit_exact = bit_exact && mae.forward(in).reconstructions[0] == dense.output(x) &&
                wmse == nn::reconstruction_mse(dense, x) && grad[0] == nn::grad_input(dense, x);
  }
  c.expect(bit_exact, "K=1 forward, MSE and input gradient bit-identical to the five-layer AE (50 networks)");

  double worst_sum = 0.0;
  bool ordered = true;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> nu(1 + rng.below(8));
    for (double& v : nu) v = std::pow(10.0, rng.uniform(-8.0, 2.0));
    const Vector w = multimodal::learnability_weights(nu);
    worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
    for (std::size_t a = 0; a < nu.size(); ++a)
      for (std::size_t b = 0; b < nu.size(); ++b)
        if (nu[a] < nu[b] && !(w[static_cast<Index>(a)] > w[static_cast<Index>(b)])) ordered = false;
  }
  c.expect(worst_sum <= 1e-12, "max |sum w - 1| " + fmt(worst_sum));
  c.expect(ordered, "nu ordering inverts weight ordering (1000 draws)");
  return c.outcome();
}

eval::MultimodalParams multimodal_params() {
  eval::MultimodalParams p;
  p.seed = 1;
  return p;
}

Outcome pretraining_benefit() {
  const auto start = std::chrono::steady_clock::now();
  const auto params = multimodal_params();
  const auto models = eval::train_models(params);
  const double elapsed = seconds_since(start);
  auto row = [&](const std::string& name) -> const std::vector<double>& {
    for (const auto& r : models.table)
      if (r.model == name) return r.per_type;
    throw std::runtime_error("missing model row " + name);
  };
  const auto& mae = row("MAE");
  const auto& plain = row("MAE w/o pre-training");
  const auto& each = row("AE for each");
  const auto& names = models.train.type_names;
  int beats_plain = 0;
  std::string per_type;
  bool beats_each = true;
  for (std::size_t k = 0; k < mae.size(); ++k) {
    if (mae[k] <= plain[k]) ++beats_plain;
    if (!(mae[k] <= each[k])) beats_each = false;
    per_type += (k ? ", " : "") + names[k] + " " + fmt(mae[k]) + "/" + fmt(plain[k]) + "/" + fmt(each[k]);
  }
  Checks c;
  c.note("MAE/no-pretraining/per-type AE MSE: " + per_type);
  c.expect(beats_plain >= 2, "MAE <= MAE w/o pre-training on " + std::to_string(beats_plain) + "/3 types");
  c.expect(beats_each, "MAE <= per-type AE on every coupled type");
  c.expect(elapsed < 600.0, "runtime " + fmt(elapsed, 4) + " s < 600 s");
  return c.outcome();
}

Outcome wmse_sensitivity() {
  const auto trials = eval::run_sensitivity(multimodal_params());
  int hits = 0;
  for (const auto& t : trials)
    if (t.mae_flagged && !t.merged_flagged) ++hits;
  Checks c;
  c.note("target type " + (trials.empty() ? std::string("-") : trials.front().target_type));
  c.expect(trials.size() == 10, std::to_string(trials.size()) + " trials");
  c.expect(hits >= 7, "wMSE flags while merged AE stays quiet in " + std::to_string(hits) + "/10 trials");
  return c.outcome();
}

Outcome determinism() {
  Rng rng(0xd00d);
  Checks c;
  const Dataset train = random_matrix(rng, 12, 200, 0.0, 10.0);
  const Dataset probe = random_matrix(rng, 12, 20, -2.0, 12.0);
  const Index hidden[] = {4};
  auto plan = detection::ActivationPlan::uniform(1, nn::Activation::kRelu, nn::Activation::kIdentity);
  plan.relu_bias = detection::ActivationPlan::ReluBias::kActive;
  const nn::TrainConfig cfg{.epochs = 20, .batch_size = 16, .learning_rate = 0.05, .seed = 3};
  const auto a = detection::train_detector(train, hidden, plan, cfg);
  const auto b = detection::train_detector(train, hidden, plan, cfg);
  c.expect(io::detector_to_json(a) == io::detector_to_json(b), "AE training reproducible");
  c.expect(a.score_batch(probe) == b.score_batch(probe), "AE scores reproducible");
  const Vector anomalous = probe.col(0) + Vector::Constant(12, 8.0);
  const auto ea = contribution::estimate_contribution(a, anomalous);
  const auto eb = contribution::estimate_contribution(b, anomalous);
  c.expect(ea.eta == eb.eta && ea.iterations == eb.iterations, "explain reproducible");
  const auto reloaded = io::detector_from_json(io::detector_to_json(a));
  c.expect(reloaded.score_batch(probe) == a.score_batch(probe), "AE save/load scores bit-exact");
  c.expect(contribution::estimate_contribution(reloaded, anomalous).eta == ea.eta, "AE save/load explain bit-exact");

  const auto pca = detection::PcaBaseline::fit(train, 3);
  c.expect(io::pca_from_json(io::pca_to_json(pca)).score_batch(probe) == pca.score_batch(probe),
           "PCA save/load scores bit-exact");

  const std::vector<Dataset> mm_train{random_matrix(rng, 6, 120, 0.0, 3.0), random_matrix(rng, 5, 120, 0.0, 3.0)};
  multimodal::ModalitySchema s{{{"a", 6, 3}, {"b", 5, 2}}, 3};
  multimodal::MaeTrainConfig mcfg{.pretrain = {.epochs = 5, .batch_size = 20, .learning_rate = 0.05},
                                  .finetune = {.epochs = 5, .batch_size = 20, .learning_rate = 0.03},
                                  .inner = std::nullopt,
                                  .active_relu = true,
                                  .seed = 7};
  const auto ma = multimodal::train_multimodal(mm_train, s, mcfg);
  const auto mb = multimodal::train_multimodal(mm_train, s, mcfg);
  c.expect(io::multimodal_to_json(ma) == io::multimodal_to_json(mb), "MAE training reproducible");
  const auto mre = io::multimodal_from_json(io::multimodal_to_json(ma));
  bool same = true;
  for (Index t = 0; t < 10; ++t) {
    const std::vector<Vector> in{random_vector(rng, 6, 0.0, 6.0), random_vector(rng, 5, 0.0, 6.0)};
    same = same && ma.score(in).wmse == mre.score(in).wmse && ma.score(in).wmse == mb.score(in).wmse;
    if (t == 0) {
      same = same && multimodal::mae_estimate_contribution(ma, in).combined.eta ==
                         multimodal::mae_estimate_contribution(mre, in).combined.eta;
    }
  }
  c.expect(same, "MAE scores and explain reproducible and bit-exact after save/load");
  return c.outcome();
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  bool full_scale = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (arg == "--full-scale") {
      full_scale = true;
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--full-scale]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria{
      {1, "gradient correctness", gradient_check},
      {2, "lasso oracle", lasso_oracle},
      {3, full_scale ? "simulation study (full scale)" : "simulation study (scale 0.1)",
       [full_scale] { return sim61(full_scale); }},
      {4, "NSL-KDD reproduction", nslkdd},
      {5, "MAE structure", mae_structure},
      {6, "pre-training benefit", pretraining_benefit},
      {7, "wMSE sensitivity", wmse_sensitivity},
      {8, "determinism and persistence", determinism},
  };

  int failed = 0, skipped = 0, ran = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("error: ") + e.what()};
    }
    const char* label = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    std::cout << label << " criterion " << c.id << " (" << c.name << "): " << o.detail << std::endl;
    if (o.status == Status::kFail) ++failed;
    if (o.status == Status::kSkip) ++skipped;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  if (failed > 0) return 1;
  return skipped == ran ? 77 : 0;
}
