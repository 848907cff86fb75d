#include <fstream>
#include <iostream>

#include "anomalens/data/nslkdd.hpp"
#include "anomalens/data/simulator.hpp"
#include "anomalens/error.hpp"
#include "anomalens/eval/experiment_multimodal.hpp"
#include "anomalens/eval/experiment_sim61.hpp"
#include "anomalens/eval/manifest.hpp"
#include "anomalens/rng.hpp"
#include "common.hpp"
#include "settings.hpp"

namespace anomalens::cli {
namespace {

using data::format_double;
namespace fs = std::filesystem;

struct DataOptions {
  CommonOptions common;
  std::string mode = "sim61";
  std::string out;
  double scale = 1.0;
  std::string train;
  std::string test;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string join_dims(const std::vector<Index>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i > 0) s += ';';
    s += std::to_string(dims[i]);
  }
  return s;
}

void simulate_sim61(const DataOptions& o, const io::Config& cfg, std::uint64_t seed) {
  data::SimConfig sim = sim_config(cfg, eval::scaled_sim_config(o.scale));
  sim.seed = derive_seed(seed, 1);
  data::FaultSpec spec;
  spec.n_f = cfg.get_int("fault.n_f", std::max<Index>(1, sim.dims_per_component / 10));
  const auto direction = cfg.get_string("fault.direction", "random");
  if (direction == "random") {
    Rng coin(derive_seed(seed, 5));
    spec.direction =
        coin.bernoulli(0.5) ? data::FaultDirection::kIncrease : data::FaultDirection::kDecrease;
  } else {
    spec.direction = data::parse_fault_direction(direction);
  }
  warn_unused(cfg);
  sim.validate();

  const fs::path dir(o.out);
  fs::create_directories(dir);
  const auto names = data::default_feature_names(sim.dim());
  data::write_numeric_csv(dir / "train.csv", names, data::gen_simulated(sim));

  data::SimConfig test_cfg = sim;
  test_cfg.seed = derive_seed(seed, 2);
  const FeatureVector clean = data::gen_simulated_record(test_cfg, 0);
  auto fault = data::inject_fault(clean, sim, spec, derive_seed(seed, 3));
  fault.label.record = 1;
  Dataset test(sim.dim(), 2);
  test.col(0) = clean;
  test.col(1) = fault.record;
  data::write_numeric_csv(dir / "test.csv", names, test);
  {
    auto out = open_out(dir / "test_labels.csv");
    out << "label\n0\n1\n";
  }
  {
    auto out = open_out(dir / "fault.csv");
    out << "record,direction,component,r,dims\n"
        << fault.label.record << ',' << data::to_string(spec.direction) << ',' << fault.component
        << ',' << format_double(fault.r) << ',' << join_dims(fault.label.dims) << '\n';
  }
  eval::Manifest manifest{"simulate-sim61",
                          {{"scale", format_double(o.scale)},
                           {"dims", std::to_string(sim.dim())},
                           {"records", std::to_string(sim.records)},
                           {"beta", format_double(sim.beta)},
                           {"gamma", format_double(sim.gamma)},
                           {"n_f", std::to_string(spec.n_f)}},
                          {{"seed", seed}}};
  eval::write_manifest(dir / "manifest.json", manifest);
  std::cout << "wrote " << sim.records << " training records of " << sim.dim() << " dims to "
            << dir.string() << " (seed " << seed << ")\n";
}

void write_stream(const fs::path& dir, const std::string& prefix, const data::MultimodalStream& s) {
  for (std::size_t k = 0; k < s.types.size(); ++k) {
    data::write_numeric_csv(dir / (prefix + s.type_names[k] + ".csv"), s.feature_names[k], s.types[k]);
  }
}

void simulate_multimodal(const DataOptions& o, const io::Config& cfg, std::uint64_t seed) {
  auto params = multimodal_params(cfg);
  params.seed = seed;
  warn_unused(cfg);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_stream(dir, "train_", eval::make_training_stream(params));
  const auto test = eval::make_test_stream(params);
  write_stream(dir, "test_", test);
  std::vector<bool> inside(static_cast<std::size_t>(test.records()), false);
  {
    auto out = open_out(dir / "events.csv");
    out << "start,duration,archetype,type,dims\n";
    for (const auto& e : test.events) {
      for (Index t = e.start; t < std::min(e.start + e.duration, test.records()); ++t) {
        inside[static_cast<std::size_t>(t)] = true;
      }
      for (const auto& a : e.affected) {
        out << e.start << ',' << e.duration << ',' << data::to_string(e.archetype) << ','
            << test.type_names[a.type] << ',' << join_dims(a.dims) << '\n';
      }
    }
  }
  {
    auto out = open_out(dir / "test_labels.csv");
    out << "label\n";
    for (bool b : inside) out << b << '\n';
  }
  eval::Manifest manifest{"simulate-multimodal",
                          {{"train_records", std::to_string(params.generator.records)},
                           {"test_records", std::to_string(params.test_records)},
                           {"coupling", format_double(params.generator.coupling)}},
                          {{"seed", seed}}};
  eval::write_manifest(dir / "manifest.json", manifest);
  std::cout << "wrote " << test.type_names.size() << " data types, " << test.events.size()
            << " events to " << dir.string() << " (seed " << seed << ")\n";
}

void run_simulate(const DataOptions& o) {
  const auto cfg = o.common.load_config();
  const auto seed = o.common.resolve_seed(cfg);
  if (o.mode == "sim61") {
    simulate_sim61(o, cfg, seed);
  } else {
    simulate_multimodal(o, cfg, seed);
  }
}

void write_split(const fs::path& dir, const std::string& name, const data::NslKddData& d) {
  data::write_numeric_csv(dir / (name + ".csv"), d.feature_names, d.features);
  auto labels = open_out(dir / (name + "_labels.csv"));
  labels << "label\n";
  auto classes = open_out(dir / (name + "_classes.txt"));
  for (const auto& c : d.classes) {
    labels << (c != "normal") << '\n';
    classes << c << '\n';
  }
}

void run_ingest(const DataOptions& o) {
  warn_unused(o.common.load_config());
  const auto split = data::load_nslkdd(o.train, o.test);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_split(dir, "train", split.train);
  write_split(dir, "test", split.test);
  data::write_numeric_csv(dir / "train_normal.csv", split.train.feature_names,
                          data::select_class(split.train, "normal"));
  std::cout << "encoded " << split.train.features.cols() << " training and "
            << split.test.features.cols() << " test records into "
            << split.train.feature_names.size() << " features\n";
}

}  // namespace

void register_data_commands(CLI::App& app) {
  auto sim = std::make_shared<DataOptions>();
  auto* s = app.add_subcommand("simulate", "Generate synthetic datasets");
  sim->common.attach(*s);
  s->add_option("--mode", sim->mode, "sim61 or multimodal")->check(CLI::IsMember({"sim61", "multimodal"}));
  s->add_option("--out", sim->out, "Output directory")->required();
  s->add_option("--scale", sim->scale, "sim61 size factor (1 = 1000 dims, 10,000 records)")
      ->check(CLI::PositiveNumber);
  s->callback([sim] { run_simulate(*sim); });

  auto ingest = std::make_shared<DataOptions>();
  auto* i = app.add_subcommand("ingest-nslkdd", "One-hot encode the NSL-KDD train/test files");
  ingest->common.attach(*i);
  i->add_option("--train", ingest->train, "KDDTrain+ file")->required();
  i->add_option("--test", ingest->test, "KDDTest+ file")->required();
  i->add_option("--out", ingest->out, "Output directory")->required();
  i->callback([ingest] { run_ingest(*ingest); });
}

}  // namespace anomalens::cli
