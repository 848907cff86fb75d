#include "anomalens/eval/experiment_sim61.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "anomalens/data/csv.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::eval {
namespace {

Index scaled(Index value, double scale, Index minimum) {
  return std::max(minimum, static_cast<Index>(std::llround(static_cast<double>(value) * scale)));
}

}  // namespace

const char* to_string(Sim61Metric metric) {
  switch (metric) {
    case Sim61Metric::kOutlierDegree: return "outlier_degree";
    case Sim61Metric::kReconstructionError: return "reconstruction_error";
    case Sim61Metric::kContributionWithoutL1: return "contribution_without_l1";
    case Sim61Metric::kContribution: return "contribution_degree";
  }
  return "unknown";
}

data::SimConfig scaled_sim_config(double scale) {
  if (!(scale > 0.0 && scale <= 1.0)) throw UsageError("scale must be in (0, 1]");
  data::SimConfig cfg;
  cfg.dims_per_component = scaled(cfg.dims_per_component, scale, 2);
  cfg.records = scaled(cfg.records, scale, 1);
  return cfg;
}

Index Sim61Report::n_f_scaled(Index n_f) const {
  return std::min(scaled(n_f, params.scale, 1), base_config.dims_per_component - 1);
}

Sim61Report run_sim61(const Sim61Params& params, const std::function<void(const Sim61Run&)>& on_run) {
  if (params.runs == 0) throw UsageError("sim61: runs must be positive");
  Sim61Report report;
  report.params = params;
  report.base_config = scaled_sim_config(params.scale);
  nn::TrainConfig train = params.train;
  train.batch_size = static_cast<std::size_t>(
      scaled(static_cast<Index>(params.train.batch_size), params.scale, 1));
  train.learning_rate = params.train.learning_rate * std::pow(params.scale, 0.7);

  const Index hidden[] = {params.hidden};
  auto plan =
      detection::ActivationPlan::uniform(1, nn::Activation::kSigmoid, nn::Activation::kSigmoid);
  plan.output_bias = detection::ActivationPlan::OutputBias::kTrainingMean;

  std::uint64_t cell_id = 0;
  for (const Index n_f_full : params.n_f_values) {
    for (const auto& [beta, gamma] : params.beta_gamma) {
      Sim61Cell cell;
      cell.n_f = report.n_f_scaled(n_f_full);
      cell.beta = beta;
      cell.gamma = gamma;
      cell.runs = params.runs;
      std::array<std::vector<double>, kSim61MetricCount> recalls, precisions;

      for (std::size_t run = 0; run < params.runs; ++run) {
        Sim61Run out;
        out.n_f = cell.n_f;
        out.beta = beta;
        out.gamma = gamma;
        out.run = run;
        out.seed = derive_seed(params.seed, cell_id * 1000 + run);

        data::SimConfig cfg = report.base_config;
        cfg.beta = beta;
        cfg.gamma = gamma;
        cfg.seed = derive_seed(out.seed, 1);
        const auto t0 = std::chrono::steady_clock::now();
        const Dataset training = data::gen_simulated(cfg);
        nn::TrainConfig run_train = train;
        run_train.seed = derive_seed(out.seed, 4);
        const auto detector = detection::train_detector(training, hidden, plan, run_train);
        out.train_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        data::SimConfig test_cfg = cfg;
        test_cfg.seed = derive_seed(out.seed, 2);
        const FeatureVector clean = data::gen_simulated_record(test_cfg, 0);
        data::FaultSpec spec;
        spec.n_f = cell.n_f;
        if (params.direction) {
          spec.direction = *params.direction;
        } else {
          Rng coin(derive_seed(out.seed, 5));
          spec.direction =
              coin.bernoulli(0.5) ? data::FaultDirection::kIncrease : data::FaultDirection::kDecrease;
        }
        const data::FaultResult fault = data::inject_fault(clean, cfg, spec, derive_seed(out.seed, 3));
        out.direction = spec.direction;
        out.r = fault.r;
        out.component = fault.component;
        out.truth = fault.label.dims;

        const detection::Decision decision = detector.evaluate(fault.record);
        out.mse = decision.score;
        out.threshold = detector.threshold();
        out.exceeded = decision.anomalous;
        if (out.exceeded) {
          const auto l1 = contribution::estimate_contribution(detector, fault.record, params.contribution);
          const auto dense =
              contribution::contribution_without_l1(detector, fault.record, params.contribution);
          out.lambda_used = l1.lambda_used;
          out.iterations = l1.iterations;
          out.converged = l1.converged;
          out.metrics = {detector.outlier_degree(fault.record),
                         detector.reconstruction_error(fault.record), dense.eta, l1.eta};
          ++cell.exceeded;
          for (std::size_t m = 0; m < kSim61MetricCount; ++m) {
            const auto estimated = contribution::estimated_dimension_set(out.metrics[m]);
            out.scores[m] = contribution::recall_precision(estimated, out.truth);
            recalls[m].push_back(out.scores[m].recall);
            precisions[m].push_back(out.scores[m].precision);
          }
        }
        if (on_run) on_run(out);
        report.runs.push_back(std::move(out));
      }
      for (std::size_t m = 0; m < kSim61MetricCount; ++m) {
        if (recalls[m].empty()) continue;
        cell.recall[m] = bootstrap_mean(recalls[m], derive_seed(params.seed, 0xb007 + cell_id));
        cell.precision[m] = bootstrap_mean(precisions[m], derive_seed(params.seed, 0xb007 + cell_id));
      }
      report.cells.push_back(cell);
      ++cell_id;
    }
  }
  return report;
}

void write_sim61(const Sim61Report& report, const std::filesystem::path& dir, bool plotdata) {
  std::filesystem::create_directories(dir);
  using data::format_double;
  {
    std::ofstream out(dir / "runs.csv");
    out << "n_f,beta,gamma,run,seed,direction,r,component,mse,threshold,exceeded,lambda_used,"
           "iterations,converged";
    for (std::size_t m = 0; m < kSim61MetricCount; ++m) {
      const char* name = to_string(static_cast<Sim61Metric>(m));
      out << ',' << name << "_recall," << name << "_precision";
    }
    out << '\n';
    for (const auto& r : report.runs) {
      out << r.n_f << ',' << format_double(r.beta) << ',' << format_double(r.gamma) << ',' << r.run
          << ',' << r.seed << ',' << data::to_string(r.direction) << ',' << format_double(r.r)
          << ',' << r.component << ',' << format_double(r.mse) << ','
          << format_double(r.threshold) << ',' << r.exceeded << ','
          << format_double(r.lambda_used) << ',' << r.iterations << ',' << r.converged;
      for (const auto& s : r.scores) {
        out << ',' << format_double(s.recall) << ',' << format_double(s.precision);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "summary.csv");
    out << "n_f,beta,gamma,runs,exceeded,metric,recall_mean,recall_lo,recall_hi,precision_mean,"
           "precision_lo,precision_hi\n";
    for (const auto& c : report.cells) {
      for (std::size_t m = 0; m < kSim61MetricCount; ++m) {
        out << c.n_f << ',' << format_double(c.beta) << ',' << format_double(c.gamma) << ','
            << c.runs << ',' << c.exceeded << ',' << to_string(static_cast<Sim61Metric>(m)) << ','
            << format_double(c.recall[m].mean) << ',' << format_double(c.recall[m].lo) << ','
            << format_double(c.recall[m].hi) << ',' << format_double(c.precision[m].mean) << ','
            << format_double(c.precision[m].lo) << ',' << format_double(c.precision[m].hi) << '\n';
      }
    }
  }
  if (plotdata) {
    std::ofstream out(dir / "metrics_long.csv");
    out << "n_f,beta,gamma,run,metric,dimension,value,contributing\n";
    for (const auto& r : report.runs) {
      if (!r.exceeded) continue;
      for (std::size_t m = 0; m < kSim61MetricCount; ++m) {
        const Vector& v = r.metrics[m];
        for (Index i = 0; i < v.size(); ++i) {
          const bool hit = std::binary_search(r.truth.begin(), r.truth.end(), i);
          out << r.n_f << ',' << format_double(r.beta) << ',' << format_double(r.gamma) << ','
              << r.run << ',' << to_string(static_cast<Sim61Metric>(m)) << ',' << i << ','
              << format_double(v[i]) << ',' << hit << '\n';
        }
      }
    }
  }
}

}  // namespace anomalens::eval
