#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anomalens/contribution/attribution_metrics.hpp"
#include "anomalens/contribution/contribution.hpp"
#include "anomalens/data/simulator.hpp"
#include "anomalens/eval/summary.hpp"
#include "anomalens/nn/train.hpp"

namespace anomalens::eval {

/// Per-dimension attribution metrics compared by the simulation study.
enum class Sim61Metric { kOutlierDegree, kReconstructionError, kContributionWithoutL1, kContribution };
inline constexpr std::size_t kSim61MetricCount = 4;
const char* to_string(Sim61Metric metric);

struct Sim61Params {
  /// 1 reproduces 1000 dims and 10,000 training records; 0.1 gives 100 dims
  /// and 1,000 records. Dims per component, records, n_f and batch size scale
  /// together; epochs do not.
  double scale = 1.0;
  std::size_t runs = 10;
  std::vector<Index> n_f_values{10, 30};
  std::vector<std::pair<double, double>> beta_gamma{{100.0, 50.0}, {200.0, 50.0}};
  /// Unset draws increase or decrease with equal probability per run.
  std::optional<data::FaultDirection> direction;
  Index hidden = 10;
  /// Values for scale 1. The run uses batch_size * scale and
  /// learning_rate * scale^0.7 (20 at scale 0.1).
  nn::TrainConfig train{.epochs = 500, .batch_size = 500, .learning_rate = 100.0,
                        .weight_decay = 1e-6};
  contribution::ContributionConfig contribution;
  std::uint64_t seed = 0;
};

struct Sim61Run {
  Index n_f = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  data::FaultDirection direction = data::FaultDirection::kIncrease;
  double r = 1.0;
  Index component = 0;
  std::vector<Index> truth;
  double mse = 0.0;
  double threshold = 0.0;
  bool exceeded = false;
  double lambda_used = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::array<contribution::RecallPrecision, kSim61MetricCount> scores{};
  std::array<Vector, kSim61MetricCount> metrics;  // per-dimension values
  double train_seconds = 0.0;
};

struct Sim61Cell {
  Index n_f = 0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t runs = 0;
  std::size_t exceeded = 0;
  std::array<MeanInterval, kSim61MetricCount> recall{};
  std::array<MeanInterval, kSim61MetricCount> precision{};
};

struct Sim61Report {
  Sim61Params params;
  data::SimConfig base_config;  // scaled, before per-cell beta/gamma and seeds
  Index n_f_scaled(Index n_f) const;
  std::vector<Sim61Run> runs;
  std::vector<Sim61Cell> cells;
};

/// Simulator settings for a scale factor.
data::SimConfig scaled_sim_config(double scale);

/// Train, inject, score and attribute for every (n_f, beta, gamma) cell and
/// run. Recall/precision are averaged over the runs whose MSE exceeded the
/// threshold (the attribution step only runs on detected records).
Sim61Report run_sim61(const Sim61Params& params,
                      const std::function<void(const Sim61Run&)>& on_run = {});

/// Writes runs.csv, summary.csv and, with plotdata, metrics_long.csv.
void write_sim61(const Sim61Report& report, const std::filesystem::path& dir, bool plotdata);

}  // namespace anomalens::eval
