#include <cstdio>
#include <iostream>

#include "anomalens/error.hpp"
#include "anomalens/eval/manifest.hpp"
#include "common.hpp"
#include "settings.hpp"

namespace anomalens::cli {
namespace {

using data::format_double;
namespace fs = std::filesystem;

struct ExperimentOptions {
  CommonOptions common;
  std::string out;
  double scale = 1.0;
  std::size_t subsample = 0;
  std::string train;
  std::string test;
  bool plotdata = false;
};

std::string interval(const eval::MeanInterval& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f [%.3f, %.3f]", m.mean, m.lo, m.hi);
  return buf;
}

void run_sim61(const ExperimentOptions& o) {
  const auto cfg = o.common.load_config();
  eval::Sim61Params params = sim61_params(cfg, {});
  params.scale = o.scale;
  params.seed = o.common.resolve_seed(cfg);
  warn_unused(cfg);
  std::cout << "sim61 scale=" << format_double(o.scale) << " seed=" << params.seed << '\n';
  const auto report = eval::run_sim61(params, [](const eval::Sim61Run& r) {
    std::cerr << "  n_f=" << r.n_f << " beta=" << format_double(r.beta) << " run=" << r.run
              << ' ' << data::to_string(r.direction) << " r=" << format_double(r.r)
              << " mse=" << format_double(r.mse) << " threshold=" << format_double(r.threshold)
              << (r.exceeded ? "" : " (below threshold)") << '\n';
  });
  const fs::path dir(o.out);
  eval::write_sim61(report, dir, o.plotdata);
  for (const auto& cell : report.cells) {
    std::cout << "n_f=" << cell.n_f << " beta=" << format_double(cell.beta)
              << " gamma=" << format_double(cell.gamma) << " exceeded " << cell.exceeded << '/'
              << cell.runs << '\n';
    for (std::size_t m = 0; m < eval::kSim61MetricCount; ++m) {
      std::cout << "  " << eval::to_string(static_cast<eval::Sim61Metric>(m))
                << ": recall " << interval(cell.recall[m]) << ", precision "
                << interval(cell.precision[m]) << '\n';
    }
  }
  eval::Manifest manifest{"sim61",
                          {{"scale", format_double(o.scale)},
                           {"runs", std::to_string(params.runs)},
                           {"epochs", std::to_string(params.train.epochs)},
                           {"learning_rate", format_double(params.train.learning_rate)}},
                          {{"seed", params.seed}}};
  for (const auto& r : report.runs) {
    manifest.seeds.emplace_back("run_n" + std::to_string(r.n_f) + "_b" + format_double(r.beta) +
                                    "_" + std::to_string(r.run),
                                r.seed);
  }
  eval::write_manifest(dir / "manifest.json", manifest);
}

void run_nslkdd(const ExperimentOptions& o) {
  const auto cfg = o.common.load_config();
  eval::NslKddParams params = nslkdd_params(cfg, {});
  params.train_file = o.train.empty() ? cfg.get_string("nslkdd.train", "") : o.train;
  params.test_file = o.test.empty() ? cfg.get_string("nslkdd.test", "") : o.test;
  if (params.train_file.empty() || params.test_file.empty()) {
    throw UsageError("experiment nslkdd needs --train and --test (or nslkdd.train/nslkdd.test)");
  }
  params.subsample = o.subsample;
  params.seed = o.common.resolve_seed(cfg);
  warn_unused(cfg);
  const auto report = eval::run_nslkdd(params);
  const fs::path dir(o.out);
  eval::write_nslkdd(report, dir, o.plotdata);
  std::cout << "nslkdd seed=" << params.seed << " train_normals=" << report.train_normals
            << " test_records=" << report.test_records << '\n'
            << "AE AUROC (max over " << report.seeds.size()
            << " seeds): " << format_double(report.ae_auroc_max) << '\n'
            << "PCA AUROC: " << format_double(report.pca_auroc_max) << '\n';
  for (const auto& [category, freq] : report.frequencies) {
    std::cout << category << " top features (" << freq.detected << '/' << freq.records
              << " detected):";
    for (const auto& f : report.top_features(category, params.top_k)) std::cout << ' ' << f;
    std::cout << '\n';
  }
  eval::Manifest manifest{"nslkdd",
                          {{"train", params.train_file.string()},
                           {"test", params.test_file.string()},
                           {"subsample", std::to_string(params.subsample)},
                           {"seeds", std::to_string(params.seed_count)}},
                          {{"seed", params.seed}}};
  eval::write_manifest(dir / "manifest.json", manifest);
}

void run_multimodal(const ExperimentOptions& o) {
  const auto cfg = o.common.load_config();
  auto params = multimodal_params(cfg);
  params.seed = o.common.resolve_seed(cfg);
  warn_unused(cfg);
  const auto report = eval::run_multimodal(params);
  const fs::path dir(o.out);
  eval::write_multimodal(report, dir, o.plotdata);
  std::cout << "multimodal seed=" << params.seed << "\nper-type training MSE:\n";
  for (const auto& row : report.table) {
    std::cout << "  " << row.model << ':';
    for (std::size_t k = 0; k < row.per_type.size(); ++k) {
      std::cout << ' ' << report.type_names[k] << '=' << format_double(row.per_type[k]);
    }
    std::cout << '\n';
  }
  for (const auto& d : report.detection) {
    std::cout << d.model << ": tpr=" << format_double(d.rates.tpr)
              << " fpr=" << format_double(d.rates.fpr) << '\n';
  }
  std::size_t wins = 0;
  for (const auto& s : report.sensitivity) wins += s.mae_flagged && !s.merged_flagged;
  std::cout << "subtle fault caught by wMSE only: " << wins << '/' << report.sensitivity.size()
            << '\n';
  eval::Manifest manifest{"multimodal",
                          {{"train_records", std::to_string(params.generator.records)},
                           {"test_records", std::to_string(params.test_records)},
                           {"coupling", format_double(params.generator.coupling)}},
                          {{"seed", params.seed}}};
  eval::write_manifest(dir / "manifest.json", manifest);
}

}  // namespace

void register_experiment_commands(CLI::App& app) {
  auto* exp = app.add_subcommand("experiment", "Run an evaluation experiment");
  exp->require_subcommand(1);

  auto add = [exp](const std::string& name, const std::string& help, auto run) {
    auto o = std::make_shared<ExperimentOptions>();
    o->out = "results/" + name;
    auto* cmd = exp->add_subcommand(name, help);
    o->common.attach(*cmd);
    cmd->add_option("--out", o->out, "Output directory");
    cmd->add_flag("--emit-plotdata", o->plotdata, "Also write long-format tables for plotting");
    cmd->callback([o, run] { run(*o); });
    return std::pair{cmd, o};
  };

  auto [sim, sim_opts] = add("sim61", "Contribution degree on the correlated simulator", run_sim61);
  sim->add_option("--scale", sim_opts->scale, "Size factor (0.1 = 100 dims, 1,000 records)")
      ->check(CLI::PositiveNumber);

  auto [kdd, kdd_opts] = add("nslkdd", "AE vs PCA on NSL-KDD plus top features", run_nslkdd);
  kdd->add_option("--train", kdd_opts->train, "KDDTrain+ file");
  kdd->add_option("--test", kdd_opts->test, "KDDTest+ file");
  kdd->add_option("--subsample", kdd_opts->subsample, "Use at most this many training normals");

  add("multimodal", "MAE vs baselines on the synthetic cross-domain stream", run_multimodal);
}

}  // namespace anomalens::cli
