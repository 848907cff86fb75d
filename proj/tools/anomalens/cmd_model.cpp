#include <algorithm>
#include <iostream>

#include "anomalens/contribution/attribution_metrics.hpp"
#include "anomalens/contribution/contribution.hpp"
#include "anomalens/detection/autoencoder_detector.hpp"
#include "anomalens/detection/pca.hpp"
#include "anomalens/error.hpp"
#include "anomalens/io/model_io.hpp"
#include "anomalens/multimodal/multimodal_detector.hpp"
#include "common.hpp"

namespace anomalens::cli {
namespace {

using data::format_double;

struct ModelOptions {
  CommonOptions common;
  std::vector<std::string> data;
  std::string model;
  std::string out;
};

std::vector<Index> to_sizes(const std::vector<double>& values, const std::string& key) {
  std::vector<Index> out;
  for (double v : values) {
    if (v < 1 || v != static_cast<double>(static_cast<Index>(v))) {
      throw UsageError(key + ": expected positive integers");
    }
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

std::vector<data::NumericTable> load_tables(const std::vector<std::string>& paths) {
  std::vector<data::NumericTable> out;
  for (const auto& p : paths) out.push_back(load_table(p));
  return out;
}

void train_ae(const ModelOptions& o, const io::Config& cfg, std::uint64_t seed) {
  if (o.data.size() != 1) throw UsageError("train --kind ae takes exactly one --data file");
  const auto table = load_table(o.data.front());
  const auto hidden = to_sizes(cfg.get_doubles("ae.hidden", {10}), "ae.hidden");
  auto plan = detection::ActivationPlan::uniform(
      hidden.size(), nn::parse_activation(cfg.get_string("ae.hidden_activation", "sigmoid")),
      nn::parse_activation(cfg.get_string("ae.output_activation", "sigmoid")));
  if (cfg.get_bool("ae.active_relu", true)) {
    plan.relu_bias = detection::ActivationPlan::ReluBias::kActive;
  }
  const auto bias = cfg.get_string("ae.output_bias", "zero");
  if (bias == "mean") {
    plan.output_bias = detection::ActivationPlan::OutputBias::kTrainingMean;
  } else if (bias != "zero") {
    throw UsageError("ae.output_bias must be 'zero' or 'mean'");
  }
  auto train = io::train_config(cfg, "train", {});
  train.seed = seed;
  warn_unused(cfg);
  const auto det = detection::train_detector(table.records, hidden, plan, train);
  io::write_text(o.out, io::detector_to_json(det));
  std::cout << "kind=ae dims=" << det.input_dim() << " records=" << table.records.cols()
            << " mse_mean=" << format_double(det.stats().mse_mean)
            << " threshold=" << format_double(det.threshold()) << '\n';
}

void train_pca(const ModelOptions& o, const io::Config& cfg) {
  if (o.data.size() != 1) throw UsageError("train --kind pca takes exactly one --data file");
  const auto table = load_table(o.data.front());
  const auto components = cfg.get_int("pca.components", 10);
  warn_unused(cfg);
  if (components < 0) throw UsageError("pca.components must be non-negative");
  const auto pca = detection::PcaBaseline::fit(table.records, static_cast<Index>(components));
  io::write_text(o.out, io::pca_to_json(pca));
  std::cout << "kind=pca dims=" << pca.dim() << " components=" << pca.component_count() << '\n';
}

void train_mae(const ModelOptions& o, const io::Config& cfg, std::uint64_t seed) {
  if (o.data.size() < 2) throw UsageError("train --kind mae needs one --data file per type");
  const auto tables = load_tables(o.data);
  multimodal::ModalitySchema schema;
  schema.shared_size = cfg.get_int("mae.shared_size", 8);
  std::vector<double> default_codes;
  for (const auto& t : tables) {
    default_codes.push_back(static_cast<double>(std::clamp<Index>(t.records.rows() / 4, 1, 10)));
  }
  const auto codes = to_sizes(cfg.get_doubles("mae.code_sizes", default_codes), "mae.code_sizes");
  if (codes.size() != tables.size()) throw UsageError("mae.code_sizes needs one entry per type");
  std::vector<Dataset> raw;
  for (std::size_t k = 0; k < tables.size(); ++k) {
    multimodal::ModalitySpec spec;
    spec.name = std::filesystem::path(o.data[k]).stem().string();
    spec.input_size = tables[k].records.rows();
    spec.code_size = codes[k];
    schema.types.push_back(spec);
    raw.push_back(tables[k].records);
  }
  multimodal::MaeTrainConfig train;
  train.pretrain = io::train_config(cfg, "mae.pretrain", train.pretrain);
  train.finetune = io::train_config(cfg, "mae.finetune", train.finetune);
  if (cfg.contains("mae.inner.learning_rate") || cfg.contains("mae.inner.epochs") ||
      cfg.contains("mae.inner.batch_size") || cfg.contains("mae.inner.weight_decay")) {
    train.inner = io::train_config(cfg, "mae.inner", train.pretrain);
  }
  train.active_relu = cfg.get_bool("mae.active_relu", true);
  train.use_pretraining = cfg.get_bool("mae.pretraining", true);
  train.seed = seed;
  warn_unused(cfg);
  const auto det = multimodal::train_multimodal(raw, schema, train);
  io::write_text(o.out, io::multimodal_to_json(det));
  std::cout << "kind=mae types=" << det.type_count() << " threshold=" << format_double(det.threshold());
  for (std::size_t k = 0; k < det.type_count(); ++k) {
    std::cout << ' ' << schema.types[k].name << "_nu=" << format_double(det.nu()[k]);
  }
  std::cout << '\n';
}

void run_train(const ModelOptions& o, const std::string& kind) {
  const auto cfg = o.common.load_config();
  const auto seed = o.common.resolve_seed(cfg);
  if (kind == "ae") {
    train_ae(o, cfg, seed);
  } else if (kind == "pca") {
    train_pca(o, cfg);
  } else {
    train_mae(o, cfg, seed);
  }
}

void check_counts(const std::vector<data::NumericTable>& tables) {
  for (const auto& t : tables) {
    if (t.records.cols() != tables.front().records.cols()) {
      throw DataError("per-type files must hold the same number of records");
    }
  }
}

std::vector<FeatureVector> record_parts(const std::vector<data::NumericTable>& tables, Index t) {
  std::vector<FeatureVector> parts;
  for (const auto& table : tables) parts.push_back(table.records.col(t));
  return parts;
}

void run_score(const ModelOptions& o, bool multimodal_flag) {
  const auto cfg = o.common.load_config();
  warn_unused(cfg);
  const auto text = io::read_text(o.model);
  const auto kind = io::model_kind(text);
  if (multimodal_flag != (kind == "mae")) {
    throw UsageError(multimodal_flag ? "--multimodal needs a multimodal model"
                                     : "multimodal models are scored with --multimodal");
  }
  const auto tables = load_tables(o.data);
  if (kind != "mae" && tables.size() != 1) throw UsageError("score takes one --data file");
  Output out(o.out);
  auto& os = out.stream();
  if (kind == "ae") {
    const auto det = io::detector_from_json(text);
    const auto& x = tables.front().records;
    os << "record,score,anomalous\n";
    for (Index t = 0; t < x.cols(); ++t) {
      const auto d = det.evaluate(x.col(t));
      os << t << ',' << format_double(d.score) << ',' << d.anomalous << '\n';
    }
  } else if (kind == "pca") {
    const auto pca = io::pca_from_json(text);
    const Vector scores = pca.score_batch(tables.front().records);
    os << "record,score\n";
    for (Index t = 0; t < scores.size(); ++t) os << t << ',' << format_double(scores[t]) << '\n';
  } else {
    const auto det = io::multimodal_from_json(text);
    if (tables.size() != det.type_count()) throw UsageError("give one --data file per type");
    check_counts(tables);
    os << "record,wmse";
    for (const auto& spec : det.schema().types) os << ',' << spec.name << "_mse";
    os << ",anomalous\n";
    for (Index t = 0; t < tables.front().records.cols(); ++t) {
      const auto parts = record_parts(tables, t);
      const auto s = det.score(parts);
      os << t << ',' << format_double(s.wmse);
      for (double m : s.per_type_mse) os << ',' << format_double(m);
      os << ',' << (s.wmse > det.threshold()) << '\n';
    }
  }
}

struct ExplainRow {
  std::string name;
  double eta = 0.0;
  double displacement = 0.0;
};

void print_explanation(std::ostream& os, const contribution::ContributionResult& result,
                       const std::vector<ExplainRow>& rows) {
  os << "lambda_used,iterations,final_mse,converged\n"
     << format_double(result.lambda_used) << ',' << result.iterations << ','
     << format_double(result.final_mse) << ',' << result.converged << '\n';
  Vector eta(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) eta[static_cast<Index>(i)] = rows[i].eta;
  const auto ranked = contribution::top_k_dimensions(eta, rows.size());
  std::vector<std::size_t> rank(rows.size());
  for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
    rank[static_cast<std::size_t>(ranked.entries[r].index)] = r + 1;
  }
  os << "dimension_index,feature_name,eta,abs_rank,displacement\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << i << ',' << rows[i].name << ',' << format_double(rows[i].eta) << ',' << rank[i] << ','
       << format_double(rows[i].displacement) << '\n';
  }
}

void run_explain(const ModelOptions& o, Index record) {
  const auto cfg = o.common.load_config();
  const auto config = io::contribution_config(cfg);
  warn_unused(cfg);
  const auto text = io::read_text(o.model);
  const auto kind = io::model_kind(text);
  const auto tables = load_tables(o.data);
  for (const auto& t : tables) {
    if (record >= t.records.cols()) throw UsageError("--record is past the end of the data");
  }
  Output out(o.out);
  std::vector<ExplainRow> rows;
  if (kind == "ae") {
    if (tables.size() != 1) throw UsageError("explain takes one --data file for this model");
    const auto det = io::detector_from_json(text);
    const auto result = contribution::estimate_contribution(det, tables.front().records.col(record), config);
    const Vector shift = det.normalizer().scale_displacement(result.eta);
    for (Index i = 0; i < result.eta.size(); ++i) {
      rows.push_back({tables.front().header[static_cast<std::size_t>(i)], result.eta[i], shift[i]});
    }
    print_explanation(out.stream(), result, rows);
  } else if (kind == "mae") {
    const auto det = io::multimodal_from_json(text);
    if (tables.size() != det.type_count()) throw UsageError("give one --data file per type");
    const auto parts = record_parts(tables, record);
    const auto result = multimodal::mae_estimate_contribution(det, parts, config);
    for (std::size_t k = 0; k < tables.size(); ++k) {
      const Vector& eta = result.per_type[k].eta;
      const Vector shift = det.normalizers()[k].scale_displacement(eta);
      for (Index i = 0; i < eta.size(); ++i) {
        rows.push_back({det.schema().types[k].name + ':' + tables[k].header[static_cast<std::size_t>(i)],
                        eta[i], shift[i]});
      }
    }
    print_explanation(out.stream(), result.combined, rows);
  } else {
    throw UsageError("explain needs an autoencoder or multimodal model");
  }
}

}  // namespace

void register_model_commands(CLI::App& app) {
  auto train = std::make_shared<ModelOptions>();
  auto kind = std::make_shared<std::string>("ae");
  auto* t = app.add_subcommand("train", "Train a detector on normal records");
  train->common.attach(*t);
  t->add_option("--kind", *kind, "ae, pca or mae")->check(CLI::IsMember({"ae", "pca", "mae"}));
  t->add_option("--data", train->data, "Training CSV (repeat once per type for mae)")->required();
  t->add_option("--out", train->out, "Model file to write")->required();
  t->callback([train, kind] { run_train(*train, *kind); });

  auto score = std::make_shared<ModelOptions>();
  auto multimodal_flag = std::make_shared<bool>(false);
  auto* s = app.add_subcommand("score", "Score records with a saved model");
  score->common.attach(*s);
  s->add_option("--model", score->model, "Model file")->required();
  s->add_option("--data", score->data, "Records CSV (one per type with --multimodal)")->required();
  s->add_option("--out", score->out, "Output CSV (default stdout)");
  s->add_flag("--multimodal", *multimodal_flag, "Score with a multimodal model (wMSE)");
  s->callback([score, multimodal_flag] { run_score(*score, *multimodal_flag); });

  auto explain = std::make_shared<ModelOptions>();
  auto record = std::make_shared<Index>(0);
  auto* e = app.add_subcommand("explain", "Contribution degree of one record");
  explain->common.attach(*e);
  e->add_option("--model", explain->model, "Model file")->required();
  e->add_option("--data", explain->data, "Records CSV (one per type for mae)")->required();
  e->add_option("--record", *record, "Zero-based record index")->check(CLI::NonNegativeNumber);
  e->add_option("--out", explain->out, "Output CSV (default stdout)");
  e->callback([explain, record] { run_explain(*explain, *record); });
}

}  // namespace anomalens::cli
