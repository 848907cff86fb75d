#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anomalens/data/multimodal_stream.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/eval/events.hpp"
#include "anomalens/multimodal/multimodal_detector.hpp"

namespace anomalens::eval {

struct MultimodalParams {
  data::MultimodalConfig generator;  // `records` is the training length
  Index test_records = 1000;
  std::vector<Index> code_sizes{6, 4, 10};
  Index shared_size = 8;
  multimodal::MaeTrainConfig mae{
      .pretrain = {.epochs = 500, .batch_size = 50, .learning_rate = 0.1, .weight_decay = 1e-6},
      .finetune = {.epochs = 500, .batch_size = 50, .learning_rate = 0.03, .weight_decay = 1e-6},
      .inner = nn::TrainConfig{.epochs = 500, .batch_size = 50, .learning_rate = 0.01,
                               .weight_decay = 1e-6},
      .active_relu = true};
  /// Baselines train for pretrain + finetune epochs with these settings and
  /// share the MAE's active_relu choice.
  nn::TrainConfig baseline{.epochs = 1000, .batch_size = 50, .learning_rate = 0.1,
                           .weight_decay = 1e-6};
  double target_fpr = 0.03;
  Index window = 5;
  Index fault_duration = 3;
  std::size_t faults_per_archetype = 4;
  std::size_t sensitivity_trials = 10;
  double sensitivity_shift = 0.3;  // fraction of the training range
  Index sensitivity_width = 4;
  std::uint64_t seed = 0;
};

multimodal::ModalitySchema multimodal_schema(const MultimodalParams& params,
                                             const std::vector<Index>& type_sizes);

/// Per-type mean training MSE of each model.
struct ModelMse {
  std::string model;
  std::vector<double> per_type;
};

struct TrainedModels {
  data::MultimodalStream train;
  multimodal::MultimodalDetector mae;
  detection::AutoencoderDetector merged;  // five-layer AE on the stacked vector
  detection::PcaBaseline pca;
  std::vector<ModelMse> table;  // MAE, MAE w/o pre-training, AE for each, AE
};

/// Fault-free training stream for the configured seed.
data::MultimodalStream make_training_stream(const MultimodalParams& params);

/// Test stream with faults_per_archetype events of every archetype spread
/// evenly over it; decoupling faults rotate through the types.
data::MultimodalStream make_test_stream(const MultimodalParams& params);

/// Trains every model on one fault-free stream and fills the MSE table.
TrainedModels train_models(const MultimodalParams& params);

struct DetectionResult {
  std::string model;
  double threshold = 0.0;  // chosen for target_fpr on the normal bins
  EventRates rates;
  std::vector<std::pair<std::string, std::size_t>> detected_by_archetype;
  Vector scores;
};

struct EventDetection {
  data::MultimodalStream test;
  std::vector<DetectionResult> models;  // mae, ae, pca
};

/// Scores a faulted test stream with every model and evaluates event TPR
/// and FPR at the threshold that yields target_fpr on normal bins.
EventDetection detect_events(const TrainedModels& models, const MultimodalParams& params);

struct SensitivityTrial {
  std::uint64_t seed = 0;
  std::string target_type;  // lowest-nu type receiving the fault
  std::vector<Index> dims;
  double wmse = 0.0;
  double wmse_threshold = 0.0;
  double merged_mse = 0.0;
  double merged_threshold = 0.0;
  bool mae_flagged = false;
  bool merged_flagged = false;
};

/// Independent trials: fresh data and models, then a small shift of a few
/// dims of the most learnable type in one test record. Each model uses its
/// own mean + 3 std threshold.
std::vector<SensitivityTrial> run_sensitivity(const MultimodalParams& params);

struct MultimodalReport {
  std::vector<std::string> type_names;
  Vector nu;
  Vector weights;
  std::vector<ModelMse> table;
  std::vector<DetectionResult> detection;
  std::vector<SensitivityTrial> sensitivity;
};

MultimodalReport run_multimodal(const MultimodalParams& params);

/// Writes table3.csv, detection.csv, sensitivity.csv and, with plotdata,
/// scores_long.csv.
void write_multimodal(const MultimodalReport& report, const std::filesystem::path& dir,
                      bool plotdata);

}  // namespace anomalens::eval
