#include <fstream>
#include <iostream>

#include "anomalens/error.hpp"
#include "anomalens/eval/events.hpp"
#include "anomalens/eval/roc.hpp"
#include "common.hpp"

namespace anomalens::cli {
namespace {

using data::format_double;

struct EvalOptions {
  CommonOptions common;
  std::string scores;
  std::string score_column = "score";
  std::string labels;
  std::string label_column = "label";
  std::string events;
  std::string out;
  double threshold = 0.0;
  CLI::Option* threshold_option = nullptr;
  double target_fpr = 0.01;
  Index window = 5;
};

std::vector<double> read_column(const std::string& path, const std::string& column) {
  const auto table = load_table(path);
  const Index row = column_index(table, column, path);
  const auto values = table.records.row(row);
  return {values.begin(), values.end()};
}

void run_roc(const EvalOptions& o) {
  warn_unused(o.common.load_config());
  const auto scores = read_column(o.scores, o.score_column);
  const auto raw_labels = read_column(o.labels.empty() ? o.scores : o.labels, o.label_column);
  if (raw_labels.size() != scores.size()) throw DataError("scores and labels differ in length");
  const std::unique_ptr<bool[]> labels(new bool[scores.size()]);
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = raw_labels[i] != 0.0;
  const auto curve = eval::roc_auc(scores, std::span<const bool>(labels.get(), scores.size()));
  std::cout << "auroc=" << format_double(curve.auroc) << '\n';
  if (!o.out.empty()) {
    Output out(o.out);
    out.stream() << "fpr,tpr,threshold\n";
    for (const auto& p : curve.points) {
      out.stream() << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
                   << format_double(p.threshold) << '\n';
    }
  }
}

std::vector<eval::EventSpan> read_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty events file");
  const auto header = data::split_csv_line(line);
  std::size_t start_col = header.size(), duration_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "start") start_col = i;
    if (header[i] == "duration") duration_col = i;
  }
  if (start_col == header.size()) throw DataError(path + ": no 'start' column");
  std::vector<eval::EventSpan> spans;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = data::split_csv_line(line);
    double start = 0.0, duration = 1.0;
    const bool ok = start_col < fields.size() && data::parse_double(fields[start_col], start) &&
                    (duration_col == header.size() ||
                     (duration_col < fields.size() && data::parse_double(fields[duration_col], duration)));
    if (!ok || start < 0 || duration < 1) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad event row");
    }
    spans.push_back({static_cast<Index>(start), static_cast<Index>(duration)});
  }
  return spans;
}

void run_events(const EvalOptions& o) {
  warn_unused(o.common.load_config());
  const auto scores = read_column(o.scores, o.score_column);
  const auto spans = read_events(o.events);
  eval::EventWindowConfig window;
  window.window = o.window;
  double threshold = o.threshold;
  if (o.threshold_option->count() == 0) {
    threshold = eval::threshold_for_fpr(eval::normal_bin_scores(scores, spans, window), o.target_fpr);
  }
  const auto r = eval::event_tpr_fpr(scores, threshold, spans, window);
  Output out(o.out);
  out.stream() << "threshold,tpr,fpr,events,detected,normal_bins,false_alarms,zero_events\n"
               << format_double(threshold) << ',' << format_double(r.tpr) << ','
               << format_double(r.fpr) << ',' << r.events << ',' << r.detected << ','
               << r.normal_bins << ',' << r.false_alarms << ',' << r.zero_events << '\n';
}

}  // namespace

void register_eval_commands(CLI::App& app) {
  auto roc = std::make_shared<EvalOptions>();
  auto* r = app.add_subcommand("eval-roc", "ROC curve and AUROC of scored records");
  roc->common.attach(*r);
  r->add_option("--scores", roc->scores, "CSV with a score column")->required();
  r->add_option("--score-column", roc->score_column, "Score column name");
  r->add_option("--labels", roc->labels, "CSV with a 0/1 label column (default: the scores file)");
  r->add_option("--label-column", roc->label_column, "Label column name");
  r->add_option("--out", roc->out, "Write the ROC points here");
  r->callback([roc] { run_roc(*roc); });

  auto ev = std::make_shared<EvalOptions>();
  auto* e = app.add_subcommand("eval-events", "Event-window TPR and per-bin FPR");
  ev->common.attach(*e);
  e->add_option("--scores", ev->scores, "CSV with one score per time bin")->required();
  e->add_option("--score-column", ev->score_column, "Score column name");
  e->add_option("--events", ev->events, "CSV with start and duration columns")->required();
  ev->threshold_option = e->add_option("--threshold", ev->threshold, "Alarm threshold");
  e->add_option("--target-fpr", ev->target_fpr, "Pick the threshold for this FPR on normal bins")
      ->excludes(ev->threshold_option)
      ->check(CLI::Range(0.0, 1.0));
  e->add_option("--window", ev->window, "Bins on either side of an event")->check(CLI::NonNegativeNumber);
  e->add_option("--out", ev->out, "Output CSV (default stdout)");
  e->callback([ev] { run_events(*ev); });
}

}  // namespace anomalens::cli
