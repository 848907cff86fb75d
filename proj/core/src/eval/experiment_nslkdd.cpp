#include "anomalens/eval/experiment_nslkdd.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <numeric>

#include "anomalens/contribution/attribution_metrics.hpp"
#include "anomalens/data/csv.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::eval {

std::vector<std::string> NslKddReport::top_features(const std::string& category,
                                                    std::size_t k) const {
  const auto it = frequencies.find(category);
  if (it == frequencies.end()) return {};
  const auto& counts = it->second.counts;
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < order.size() && out.size() < k; ++i) {
    if (counts[order[i]] == 0) break;
    out.push_back(feature_names[order[i]]);
  }
  return out;
}

NslKddReport run_nslkdd(const data::NslKddSplit& split, const NslKddParams& params) {
  if (params.seed_count == 0) throw UsageError("nslkdd: seed_count must be positive");
  NslKddReport report;
  report.feature_names = split.train.feature_names;

  Dataset normals = data::select_class(split.train, "normal");
  if (normals.cols() == 0) throw DataError("nslkdd: training file has no normal records");
  if (params.subsample > 0 && static_cast<std::size_t>(normals.cols()) > params.subsample) {
    std::vector<Index> idx(static_cast<std::size_t>(normals.cols()));
    std::iota(idx.begin(), idx.end(), Index{0});
    Rng rng(derive_seed(params.seed, 0x5b));
    rng.shuffle(std::span<Index>(idx));
    idx.resize(params.subsample);
    std::sort(idx.begin(), idx.end());
    Dataset sub(normals.rows(), static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) sub.col(static_cast<Index>(i)) = normals.col(idx[i]);
    normals = std::move(sub);
  }
  report.train_normals = static_cast<std::size_t>(normals.cols());
  report.test_records = split.test.classes.size();

  std::vector<bool> labels_vec(split.test.classes.size());
  for (std::size_t t = 0; t < labels_vec.size(); ++t) labels_vec[t] = split.test.classes[t] != "normal";
  const std::unique_ptr<bool[]> labels(new bool[labels_vec.size()]);
  std::copy(labels_vec.begin(), labels_vec.end(), labels.get());
  const std::span<const bool> label_span(labels.get(), labels_vec.size());

  const Index hidden[] = {params.hidden};
  auto plan = detection::ActivationPlan::uniform(1, nn::Activation::kRelu, nn::Activation::kIdentity);
  plan.relu_bias = params.relu_bias;
  std::vector<detection::AutoencoderDetector> detectors;
  for (std::size_t s = 0; s < params.seed_count; ++s) {
    NslKddSeedResult r;
    r.seed = derive_seed(params.seed, s);
    nn::TrainConfig train = params.train;
    train.seed = r.seed;
    auto det = detection::train_detector(normals, hidden, plan, train);
    const Vector ae_scores = det.score_batch(split.test.features);
    const RocCurve ae = roc_auc(std::span<const double>(ae_scores.data(), ae_scores.size()), label_span);
    r.ae_auroc = ae.auroc;
    r.ae_threshold = det.threshold();
    if (s == 0 || r.ae_auroc > report.ae_auroc_max) {
      report.ae_auroc_max = r.ae_auroc;
      report.ae_curve = ae;
      report.best_seed_index = s;
    }
    detectors.push_back(std::move(det));
    report.seeds.push_back(r);
  }
  // PCA is deterministic; one fit serves every seed row.
  const auto pca = detection::PcaBaseline::fit(normals, params.pca_components);
  const Vector pca_scores = pca.score_batch(split.test.features);
  report.pca_curve = roc_auc(std::span<const double>(pca_scores.data(), pca_scores.size()), label_span);
  report.pca_auroc_max = report.pca_curve.auroc;
  for (auto& r : report.seeds) r.pca_auroc = report.pca_auroc_max;

  const auto& best = detectors[report.best_seed_index];
  for (const auto& category : data::nslkdd_categories()) {
    if (category == "normal") continue;
    FeatureFrequency f;
    f.counts.assign(report.feature_names.size(), 0);
    report.frequencies[category] = std::move(f);
  }
  for (std::size_t t = 0; t < split.test.classes.size(); ++t) {
    const std::string& category = split.test.classes[t];
    if (category == "normal") continue;
    FeatureFrequency& f = report.frequencies[category];
    ++f.records;
    const FeatureVector x = split.test.features.col(static_cast<Index>(t));
    if (!best.evaluate(x).anomalous) continue;
    ++f.detected;
    const auto result = contribution::estimate_contribution(best, x, params.contribution);
    for (const auto& e : contribution::top_k_dimensions(result.eta, params.top_k).entries) {
      ++f.counts[static_cast<std::size_t>(e.index)];
    }
  }
  return report;
}

NslKddReport run_nslkdd(const NslKddParams& params) {
  return run_nslkdd(data::load_nslkdd(params.train_file, params.test_file), params);
}

void write_nslkdd(const NslKddReport& report, const std::filesystem::path& dir, bool plotdata) {
  std::filesystem::create_directories(dir);
  using data::format_double;
  {
    std::ofstream out(dir / "auroc.csv");
    out << "seed_index,seed,ae_auroc,pca_auroc,ae_threshold\n";
    for (std::size_t s = 0; s < report.seeds.size(); ++s) {
      const auto& r = report.seeds[s];
      out << s << ',' << r.seed << ',' << format_double(r.ae_auroc) << ','
          << format_double(r.pca_auroc) << ',' << format_double(r.ae_threshold) << '\n';
    }
    out << "max,," << format_double(report.ae_auroc_max) << ','
        << format_double(report.pca_auroc_max) << ",\n";
  }
  {
    std::ofstream out(dir / "feature_frequency.csv");
    out << "category,records,detected,feature,count\n";
    for (const auto& [category, f] : report.frequencies) {
      for (std::size_t i = 0; i < f.counts.size(); ++i) {
        if (f.counts[i] == 0) continue;
        out << category << ',' << f.records << ',' << f.detected << ','
            << report.feature_names[i] << ',' << f.counts[i] << '\n';
      }
    }
  }
  if (plotdata) {
    std::ofstream out(dir / "roc_long.csv");
    out << "model,fpr,tpr,threshold\n";
    for (const auto& [name, curve] : {std::pair{"ae", &report.ae_curve}, {"pca", &report.pca_curve}}) {
      for (const auto& p : curve->points) {
        out << name << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
            << format_double(p.threshold) << '\n';
      }
    }
  }
}

}  // namespace anomalens::eval
