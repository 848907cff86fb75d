#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "anomalens/contribution/contribution.hpp"
#include "anomalens/data/nslkdd.hpp"
#include "anomalens/eval/roc.hpp"
#include "anomalens/nn/train.hpp"

namespace anomalens::eval {

struct NslKddParams {
  std::filesystem::path train_file;
  std::filesystem::path test_file;
  /// Train on at most this many normal records (0 keeps all).
  std::size_t subsample = 0;
  std::size_t seed_count = 5;
  Index hidden = 10;
  detection::ActivationPlan::ReluBias relu_bias = detection::ActivationPlan::ReluBias::kActive;
  Index pca_components = 10;
  nn::TrainConfig train{.epochs = 100, .batch_size = 50, .learning_rate = 0.1,
                        .weight_decay = 1e-6};
  std::size_t top_k = 10;
  contribution::ContributionConfig contribution;
  std::uint64_t seed = 0;
};

struct NslKddSeedResult {
  std::uint64_t seed = 0;
  double ae_auroc = 0.0;
  double pca_auroc = 0.0;
  double ae_threshold = 0.0;
};

/// How often each feature appeared in the top-k |contribution| of detected
/// records, per attack category.
struct FeatureFrequency {
  std::size_t detected = 0;
  std::size_t records = 0;
  std::vector<std::size_t> counts;  // per feature
};

struct NslKddReport {
  std::vector<std::string> feature_names;
  std::size_t train_normals = 0;
  std::size_t test_records = 0;
  std::vector<NslKddSeedResult> seeds;
  double ae_auroc_max = 0.0;
  double pca_auroc_max = 0.0;
  std::size_t best_seed_index = 0;
  RocCurve ae_curve;   // best AE seed
  RocCurve pca_curve;  // best PCA seed
  std::map<std::string, FeatureFrequency> frequencies;  // best AE seed

  /// Feature names ordered by descending frequency (ties by index).
  std::vector<std::string> top_features(const std::string& category, std::size_t k) const;
};

/// AE (relu hidden layer, identity output) against PCA on the same
/// normalized data, maximum AUROC over seeds, then contribution-based
/// feature frequencies for the best AE seed.
NslKddReport run_nslkdd(const data::NslKddSplit& split, const NslKddParams& params);
NslKddReport run_nslkdd(const NslKddParams& params);

/// Writes auroc.csv, feature_frequency.csv and, with plotdata, roc_long.csv.
void write_nslkdd(const NslKddReport& report, const std::filesystem::path& dir, bool plotdata);

}  // namespace anomalens::eval
