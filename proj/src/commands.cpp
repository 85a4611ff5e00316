#include "emgtcn/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>

#include "emgtcn/stats.hpp"

namespace emgtcn {
namespace {

std::string optional_cell(const std::optional<double>& v) {
  if (!v.has_value()) {
    return "nan";
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

std::string metric_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fixed4(const std::optional<double>& v) {
  if (!v.has_value()) {
    return "-";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

// trace.csv -> trace-2-knn.csv for checkpoint 2 of kind knn.
std::string indexed_path(const std::string& path, std::size_t index,
                         const std::string& kind) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  const std::string tag = "-" + std::to_string(index) + "-" + kind;
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + tag;
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

double replicate_accuracy(const ExperimentConfig& config, std::uint64_t seed,
                          const std::string& kind) {
  ExperimentConfig rep = config;
  rep.seed = seed;
  const SynthSession synth = synth_session(synth_config(rep));
  Session session{synth.emg, synth.joints};
  const ModelCheckpoint cp = train_checkpoint(session, rep, kind);
  return evaluate_checkpoint(session, rep, cp).report.accuracy;
}

}  // namespace

void write_report_csv(const std::string& path,
                      const std::vector<ReportRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("report: cannot open '" + path +
                             "' for writing");
  }
  out << "model,feature_mode,accuracy,accuracy_steady,accuracy_transient,"
         "stability,stability_steady,stability_transient,switches_pred,"
         "switches_truth,n\n";
  for (const ReportRow& row : rows) {
    const EvalReport& r = row.report;
    out << row.model << "," << row.feature_mode << ","
        << metric_cell(r.accuracy) << "," << optional_cell(r.accuracy_steady)
        << "," << optional_cell(r.accuracy_transient) << ","
        << metric_cell(r.stability) << ","
        << optional_cell(r.stability_steady) << ","
        << optional_cell(r.stability_transient) << "," << r.switches_pred
        << "," << r.switches_truth << "," << r.n << "\n";
  }
  out.flush();
  if (!out) {
    throw std::runtime_error("report: write to '" + path + "' failed");
  }
}

void print_report_table(const std::vector<ReportRow>& rows,
                        std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %-5s %8s %8s %8s %8s %8s %8s %6s\n",
                "model", "feat", "acc", "acc(S)", "acc(T)", "stab", "stab(S)",
                "stab(T)", "steps");
  out << line;
  for (const ReportRow& row : rows) {
    const EvalReport& r = row.report;
    std::snprintf(line, sizeof(line),
                  "%-6s %-5s %8.4f %8s %8s %8.4f %8s %8s %6lld\n",
                  row.model.c_str(), row.feature_mode.c_str(), r.accuracy,
                  fixed4(r.accuracy_steady).c_str(),
                  fixed4(r.accuracy_transient).c_str(), r.stability,
                  fixed4(r.stability_steady).c_str(),
                  fixed4(r.stability_transient).c_str(),
                  static_cast<long long>(r.n));
    out << line;
  }
}

void cmd_synth(const ExperimentConfig& config, std::ostream& out) {
  const SynthSession session = synth_session(synth_config(config));
  write_session_csv(config.session_path, session.emg, session.joints);
  write_script_csv(config.script_path, session.script);

  std::set<int> classes;
  for (const MovementSegment& seg : session.script) {
    classes.insert(pack_class(seg.target));
  }
  out << "synth: wrote " << session.emg.size() << " samples ("
      << (static_cast<double>(session.emg.size()) / config.sample_rate)
      << " s) to " << config.session_path << "\n";
  out << "synth: " << session.script.size() << " segments visiting "
      << classes.size() << " distinct classes; script in "
      << config.script_path << "\n";
}

void cmd_features(const ExperimentConfig& config, const std::string& kind,
                  std::ostream& out) {
  const Session session = read_session_csv(config.session_path);
  const FeatureMode mode = model_feature_mode(config, kind);
  const PreparedData data = prepare_data(session, config, mode);
  write_feature_csv(config.feature_path, data.features);
  write_label_csv(config.label_path, data.labels, data.states);
  out << "features: " << data.features.size() << " steps of "
      << feature_mode_name(mode) << " features to " << config.feature_path
      << "\n";
  out << "features: labels/states to " << config.label_path << " (train "
      << data.split.train_end << " steps, test from step "
      << data.split.test_begin << ")\n";
}

void cmd_train(const ExperimentConfig& config, const std::string& kind,
               std::ostream& out) {
  const Session session = read_session_csv(config.session_path);
  const ModelCheckpoint cp = train_checkpoint(session, config, kind);
  save_checkpoint(cp, config.model_path);
  out << "train: " << kind << " (" << feature_mode_name(cp.feature_mode)
      << " features) on the first " << config.train_fraction * 100.0
      << "% of the session -> " << config.model_path << "\n";
}

void cmd_eval(const ExperimentConfig& config,
              const std::vector<std::string>& checkpoint_paths,
              std::ostream& out) {
  if (checkpoint_paths.empty()) {
    throw std::invalid_argument("eval: no checkpoints given");
  }
  const Session session = read_session_csv(config.session_path);
  std::vector<ReportRow> rows;
  std::vector<std::string> kinds;
  for (std::size_t i = 0; i < checkpoint_paths.size(); ++i) {
    const ModelCheckpoint cp = load_checkpoint(checkpoint_paths[i]);
    const ModelEval eval = evaluate_checkpoint(session, config, cp);
    rows.push_back(
        {eval.kind, feature_mode_name(eval.feature_mode), eval.report});
    if (std::find(kinds.begin(), kinds.end(), eval.kind) == kinds.end()) {
      kinds.push_back(eval.kind);
    }
    if (!config.trace_path.empty()) {
      const std::string path =
          checkpoint_paths.size() == 1
              ? config.trace_path
              : indexed_path(config.trace_path, i, eval.kind);
      write_trace_csv(path, eval.trace);
      out << "eval: trace for " << eval.kind << " -> " << path << "\n";
    }
  }
  print_report_table(rows, out);
  write_report_csv(config.report_path, rows);
  out << "eval: report -> " << config.report_path << "\n";

  if (config.seeds.size() >= 2 && kinds.size() >= 2) {
    out << "eval: cross-seed comparison over " << config.seeds.size()
        << " replicate seeds\n";
    std::vector<std::vector<double>> samples(kinds.size());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      for (std::uint64_t seed : config.seeds) {
        samples[k].push_back(replicate_accuracy(config, seed, kinds[k]));
      }
      out << "  " << kinds[k] << " accuracy:";
      for (double a : samples[k]) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %.4f", a);
        out << buf;
      }
      out << "\n";
    }
    for (std::size_t a = 0; a < kinds.size(); ++a) {
      for (std::size_t b = a + 1; b < kinds.size(); ++b) {
        try {
          const AnovaResult r = anova_oneway({samples[a], samples[b]});
          char buf[96];
          std::snprintf(buf, sizeof(buf),
                        "  %s vs %s: F(%d,%d) = %.4f, p = %.6g\n",
                        kinds[a].c_str(), kinds[b].c_str(), r.df_between,
                        r.df_within, r.f, r.p_value);
          out << buf;
        } catch (const std::exception& e) {
          out << "  " << kinds[a] << " vs " << kinds[b]
              << ": ANOVA degenerate (" << e.what() << ")\n";
        }
      }
    }
  }
}

void cmd_report(const ExperimentConfig& config, const std::string& trace_path,
                std::ostream& out) {
  const std::vector<TraceRow> trace = read_trace_csv(trace_path);
  if (trace.empty()) {
    throw std::runtime_error("report: trace '" + trace_path + "' is empty");
  }
  std::vector<int> pred;
  std::vector<int> truth;
  std::vector<StateTag> states;
  for (const TraceRow& row : trace) {
    if (row.correct != (row.pred == row.truth)) {
      throw std::runtime_error("report: trace row at t=" +
                               std::to_string(row.t) +
                               " has an inconsistent correct flag");
    }
    pred.push_back(row.pred);
    truth.push_back(row.truth);
    states.push_back(row.state);
  }
  std::vector<ReportRow> rows;
  rows.push_back({"trace", "-", segment_report(pred, truth, states)});
  print_report_table(rows, out);
  write_report_csv(config.report_path, rows);
  out << "report: recomputed metrics -> " << config.report_path << "\n";
}

void cmd_sweep(const ExperimentConfig& config, std::ostream& out) {
  if (config.sweep_windows.empty() || config.sweep_seq_lens.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  const SynthSession synth = synth_session(synth_config(config));
  const Session session{synth.emg, synth.joints};
  std::vector<SweepRow> rows;
  for (int window : config.sweep_windows) {
    for (int seq_len : config.sweep_seq_lens) {
      ExperimentConfig cell = config;
      cell.window_len = window;
      cell.sequence_len = seq_len;
      cell.epochs = config.sweep_epochs;
      SweepRow row{window, seq_len,
                   std::numeric_limits<double>::quiet_NaN()};
      try {
        const ModelCheckpoint cp = train_checkpoint(session, cell, "tcn");
        row.accuracy = evaluate_checkpoint(session, cell, cp).report.accuracy;
      } catch (const std::exception& e) {
        out << "sweep: cell W=" << window << " T=" << seq_len
            << " failed: " << e.what() << "\n";
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "sweep: W=%-3d T=%-3d accuracy=%.4f\n",
                    window, seq_len, row.accuracy);
      out << buf;
      rows.push_back(row);
    }
  }
  write_sweep_csv(config.sweep_path, rows);
  out << "sweep: " << rows.size() << " cells -> " << config.sweep_path
      << "\n";
}

}  // namespace emgtcn
