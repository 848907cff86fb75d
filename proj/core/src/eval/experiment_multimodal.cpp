#include "anomalens/eval/experiment_multimodal.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>

#include "anomalens/data/csv.hpp"
#include "anomalens/error.hpp"
#include "anomalens/rng.hpp"

namespace anomalens::eval {
namespace {

const std::array<data::FaultArchetype, 5> kArchetypes{
    data::FaultArchetype::kVolumeFlood, data::FaultArchetype::kCounterSpike,
    data::FaultArchetype::kNovelTemplate, data::FaultArchetype::kTemplateBurst,
    data::FaultArchetype::kDecoupling};

data::MultimodalGenerator make_generator(const MultimodalParams& params, Index records,
                                         std::uint64_t stream) {
  data::MultimodalConfig cfg = params.generator;
  cfg.records = records;
  cfg.seed = derive_seed(params.seed, stream);
  return data::MultimodalGenerator(cfg);
}

detection::ActivationPlan::ReluBias relu_bias(const MultimodalParams& params) {
  return params.mae.active_relu ? detection::ActivationPlan::ReluBias::kActive
                                : detection::ActivationPlan::ReluBias::kZero;
}

detection::AutoencoderDetector train_merged(const Dataset& merged, const MultimodalParams& params,
                                            std::uint64_t seed) {
  const Index codes = std::accumulate(params.code_sizes.begin(), params.code_sizes.end(), Index{0});
  const Index hidden[] = {codes, params.shared_size, codes};
  detection::ActivationPlan plan;
  plan.layers = {nn::Activation::kRelu, nn::Activation::kIdentity, nn::Activation::kRelu,
                 nn::Activation::kIdentity};
  plan.relu_bias = relu_bias(params);
  nn::TrainConfig cfg = params.baseline;
  cfg.seed = seed;
  return detection::train_detector(merged, hidden, plan, cfg);
}

// Per-type mean training MSE of a network over the stacked vector.
std::vector<double> sliced_mse(const detection::AutoencoderDetector& det, const Dataset& merged,
                               const std::vector<Index>& sizes) {
  const Dataset x = det.normalizer().apply(merged);
  const Matrix residual = det.network().output_batch(x) - x;
  std::vector<double> out;
  Index offset = 0;
  for (Index n : sizes) {
    out.push_back(residual.middleRows(offset, n).squaredNorm() /
                  static_cast<double>(n * residual.cols()));
    offset += n;
  }
  return out;
}

std::vector<double> mean_per_type(const std::vector<Vector>& per_record) {
  std::vector<double> out;
  for (const auto& v : per_record) out.push_back(v.mean());
  return out;
}

double wmse_of(const multimodal::MultimodalDetector& det, const data::MultimodalStream& s, Index t) {
  std::vector<FeatureVector> parts;
  for (const auto& d : s.types) parts.push_back(d.col(t));
  return det.score(parts).wmse;
}

}  // namespace

multimodal::ModalitySchema multimodal_schema(const MultimodalParams& params,
                                             const std::vector<Index>& type_sizes) {
  static const char* const kNames[] = {"flow", "mib", "syslog"};
  if (params.code_sizes.size() != type_sizes.size()) {
    throw UsageError("multimodal: need one code size per data type");
  }
  multimodal::ModalitySchema schema;
  schema.shared_size = params.shared_size;
  for (std::size_t k = 0; k < type_sizes.size(); ++k) {
    multimodal::ModalitySpec spec;
    spec.name = k < 3 ? kNames[k] : "type" + std::to_string(k);
    spec.input_size = type_sizes[k];
    spec.code_size = params.code_sizes[k];
    schema.types.push_back(spec);
  }
  schema.validate();
  return schema;
}

TrainedModels train_models(const MultimodalParams& params) {
  TrainedModels m;
  m.train = make_training_stream(params);
  std::vector<Index> sizes;
  for (const auto& d : m.train.types) sizes.push_back(d.rows());
  const auto schema = multimodal_schema(params, sizes);

  multimodal::MaeTrainConfig mae = params.mae;
  mae.seed = derive_seed(params.seed, 2);
  m.mae = multimodal::train_multimodal(m.train.types, schema, mae);

  std::vector<Dataset> normalized;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    normalized.push_back(m.mae.normalizers()[k].apply(m.train.types[k]));
  }
  multimodal::MaeTrainConfig direct = mae;
  direct.use_pretraining = false;
  const auto no_pretrain = multimodal::train_mae_network(schema, normalized, direct);

  std::vector<double> each;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const Index hidden[] = {params.code_sizes[k]};
    nn::TrainConfig cfg = params.baseline;
    cfg.seed = derive_seed(params.seed, 10 + k);
    auto plan = detection::ActivationPlan::uniform(1, nn::Activation::kRelu, nn::Activation::kIdentity);
    plan.relu_bias = relu_bias(params);
    const auto det = detection::train_detector(m.train.types[k], hidden, plan, cfg);
    each.push_back(det.stats().mse_mean);
  }

  const Dataset merged = m.train.merged();
  m.merged = train_merged(merged, params, derive_seed(params.seed, 20));
  m.pca = detection::PcaBaseline::fit(merged, params.shared_size);

  const Vector& nu = m.mae.nu();
  m.table.push_back({"MAE", std::vector<double>(nu.data(), nu.data() + nu.size())});
  m.table.push_back({"MAE w/o pre-training", mean_per_type(multimodal::per_type_mse(no_pretrain, normalized))});
  m.table.push_back({"AE for each", each});
  m.table.push_back({"AE", sliced_mse(m.merged, merged, sizes)});
  return m;
}

data::MultimodalStream make_training_stream(const MultimodalParams& params) {
  return make_generator(params, params.generator.records, 1).generate();
}

data::MultimodalStream make_test_stream(const MultimodalParams& params) {
  const auto generator = make_generator(params, params.test_records, 3);
  auto test = generator.generate();
  const std::size_t total = kArchetypes.size() * params.faults_per_archetype;
  const Index spacing = params.test_records / static_cast<Index>(total + 1);
  if (spacing <= params.fault_duration + 2 * params.window) {
    throw UsageError("multimodal: test stream too short for the fault schedule");
  }
  for (std::size_t i = 0; i < total; ++i) {
    data::MultimodalFault fault;
    fault.archetype = kArchetypes[i % kArchetypes.size()];
    fault.start = static_cast<Index>(i + 1) * spacing;
    fault.duration = params.fault_duration;
    fault.target_type = i % test.types.size();
    fault.seed = derive_seed(params.seed, 100 + i);
    generator.inject(test, fault);
  }
  return test;
}

EventDetection detect_events(const TrainedModels& models, const MultimodalParams& params) {
  EventDetection out;
  out.test = make_test_stream(params);

  std::vector<EventSpan> spans;
  for (const auto& e : out.test.events) spans.push_back({e.start, e.duration});
  EventWindowConfig window;
  window.window = params.window;

  const Index bins = out.test.records();
  const Dataset merged = out.test.merged();
  Vector mae_scores(bins);
  for (Index t = 0; t < bins; ++t) mae_scores[t] = wmse_of(models.mae, out.test, t);
  const std::vector<std::pair<std::string, Vector>> scored{
      {"MAE", mae_scores}, {"AE", models.merged.score_batch(merged)}, {"PCA", models.pca.score_batch(merged)}};

  for (const auto& [name, scores] : scored) {
    DetectionResult r;
    r.model = name;
    r.scores = scores;
    const std::span<const double> s(scores.data(), static_cast<std::size_t>(scores.size()));
    r.threshold = threshold_for_fpr(normal_bin_scores(s, spans, window), params.target_fpr);
    r.rates = event_tpr_fpr(s, r.threshold, spans, window);
    for (const auto a : kArchetypes) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < out.test.events.size(); ++i) {
        if (out.test.events[i].archetype != a) continue;
        const EventSpan one[] = {spans[i]};
        hits += event_tpr_fpr(s, r.threshold, one, window).detected;
      }
      r.detected_by_archetype.emplace_back(data::to_string(a), hits);
    }
    out.models.push_back(std::move(r));
  }
  return out;
}

std::vector<SensitivityTrial> run_sensitivity(const MultimodalParams& params) {
  std::vector<SensitivityTrial> trials;
  for (std::size_t i = 0; i < params.sensitivity_trials; ++i) {
    MultimodalParams p = params;
    p.seed = derive_seed(params.seed, 0x5e45 + i);
    const auto generator = make_generator(p, p.generator.records, 1);
    const auto train = generator.generate();
    const auto sizes = generator.type_sizes();
    multimodal::MaeTrainConfig mae = p.mae;
    mae.seed = derive_seed(p.seed, 2);
    const auto det = multimodal::train_multimodal(train.types, multimodal_schema(p, sizes), mae);
    const auto merged = train_merged(train.merged(), p, derive_seed(p.seed, 20));

    SensitivityTrial trial;
    trial.seed = p.seed;
    Index k = 0;
    det.nu().minCoeff(&k);
    trial.target_type = det.schema().types[static_cast<std::size_t>(k)].name;

    const auto test_gen = make_generator(p, 1, 3);
    auto test = test_gen.generate();
    const auto& norm = det.normalizers()[static_cast<std::size_t>(k)];
    std::vector<Index> candidates;
    for (Index d = 0; d < sizes[static_cast<std::size_t>(k)]; ++d) {
      if (norm.max()[d] > norm.min()[d]) candidates.push_back(d);
    }
    Rng rng(derive_seed(p.seed, 4));
    rng.shuffle(std::span<Index>(candidates));
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(p.sensitivity_width)));
    std::sort(candidates.begin(), candidates.end());
    for (Index d : candidates) {
      test.types[static_cast<std::size_t>(k)](d, 0) += p.sensitivity_shift * (norm.max()[d] - norm.min()[d]);
    }
    trial.dims = candidates;

    trial.wmse = wmse_of(det, test, 0);
    trial.wmse_threshold = det.threshold();
    trial.mae_flagged = trial.wmse > trial.wmse_threshold;
    const auto decision = merged.evaluate(test.merged().col(0));
    trial.merged_mse = decision.score;
    trial.merged_threshold = merged.threshold();
    trial.merged_flagged = decision.anomalous;
    trials.push_back(std::move(trial));
  }
  return trials;
}

MultimodalReport run_multimodal(const MultimodalParams& params) {
  const TrainedModels models = train_models(params);
  MultimodalReport report;
  for (const auto& t : models.mae.schema().types) report.type_names.push_back(t.name);
  report.nu = models.mae.nu();
  report.weights = models.mae.weights();
  report.table = models.table;
  report.detection = detect_events(models, params).models;
  report.sensitivity = run_sensitivity(params);
  return report;
}

void write_multimodal(const MultimodalReport& report, const std::filesystem::path& dir,
                      bool plotdata) {
  std::filesystem::create_directories(dir);
  using data::format_double;
  {
    std::ofstream out(dir / "table3.csv");
    out << "model";
    for (const auto& name : report.type_names) out << ',' << name;
    out << '\n';
    for (const auto& row : report.table) {
      out << row.model;
      for (double v : row.per_type) out << ',' << format_double(v);
      out << '\n';
    }
    out << "nu";
    for (Index k = 0; k < report.nu.size(); ++k) out << ',' << format_double(report.nu[k]);
    out << "\nweight";
    for (Index k = 0; k < report.weights.size(); ++k) out << ',' << format_double(report.weights[k]);
    out << '\n';
  }
  {
    std::ofstream out(dir / "detection.csv");
    out << "model,threshold,tpr,fpr,events,detected,normal_bins,false_alarms,zero_events";
    if (!report.detection.empty()) {
      for (const auto& [name, hits] : report.detection.front().detected_by_archetype) {
        out << ",detected_" << name;
      }
    }
    out << '\n';
    for (const auto& r : report.detection) {
      out << r.model << ',' << format_double(r.threshold) << ',' << format_double(r.rates.tpr)
          << ',' << format_double(r.rates.fpr) << ',' << r.rates.events << ','
          << r.rates.detected << ',' << r.rates.normal_bins << ',' << r.rates.false_alarms << ','
          << r.rates.zero_events;
      for (const auto& [name, hits] : r.detected_by_archetype) out << ',' << hits;
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "sensitivity.csv");
    out << "trial,seed,target_type,wmse,wmse_threshold,mae_flagged,merged_mse,merged_threshold,"
           "merged_flagged\n";
    for (std::size_t i = 0; i < report.sensitivity.size(); ++i) {
      const auto& s = report.sensitivity[i];
      out << i << ',' << s.seed << ',' << s.target_type << ',' << format_double(s.wmse) << ','
          << format_double(s.wmse_threshold) << ',' << s.mae_flagged << ','
          << format_double(s.merged_mse) << ',' << format_double(s.merged_threshold) << ','
          << s.merged_flagged << '\n';
    }
  }
  if (plotdata) {
    std::ofstream out(dir / "scores_long.csv");
    out << "model,bin,score,threshold\n";
    for (const auto& r : report.detection) {
      for (Index t = 0; t < r.scores.size(); ++t) {
        out << r.model << ',' << t << ',' << format_double(r.scores[t]) << ','
            << format_double(r.threshold) << '\n';
      }
    }
  }
}

}  // namespace anomalens::eval
