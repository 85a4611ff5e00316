#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "emgtcn/experiment.hpp"

namespace emgtcn {

// Subcommand bodies behind the CLI. Each reads/writes the files named in
// the config, prints human-readable progress to `out`, and throws on
// failure (the CLI maps exceptions to a one-line diagnostic and a nonzero
// exit).

// Generate a synthetic session; writes the session CSV and script sidecar.
void cmd_synth(const ExperimentConfig& config, std::ostream& out);

// Extract features and ground-truth labels for one model kind's feature
// mode; writes the feature and label CSVs.
void cmd_features(const ExperimentConfig& config, const std::string& kind,
                  std::ostream& out);

// Train one model ("tcn", "knn", "mlp") on the train half; writes a
// checkpoint.
void cmd_train(const ExperimentConfig& config, const std::string& kind,
               std::ostream& out);

// Evaluate checkpoints on the test half: prints an aligned comparison
// table, writes the report CSV (row per model) and optional per-model
// trace CSVs. With two or more checkpoints and two or more replicate
// seeds, also reruns the synth+train+eval protocol per seed and reports
// pairwise one-way ANOVA between the models' accuracy samples.
void cmd_eval(const ExperimentConfig& config,
              const std::vector<std::string>& checkpoint_paths,
              std::ostream& out);

// Recompute metrics from a per-step trace CSV and print/write them; the
// independent check that reports match their traces.
void cmd_report(const ExperimentConfig& config, const std::string& trace_path,
                std::ostream& out);

// Train/evaluate the TCN over the window x sequence-length grid at the
// reduced epoch budget; writes the contour CSV. Failed cells are recorded
// as nan and the sweep continues.
void cmd_sweep(const ExperimentConfig& config, std::ostream& out);

// Report CSV row layout shared by cmd_eval, cmd_report, and their tests.
struct ReportRow {
  std::string model;
  std::string feature_mode;
  EvalReport report;
};

void write_report_csv(const std::string& path,
                      const std::vector<ReportRow>& rows);
void print_report_table(const std::vector<ReportRow>& rows,
                        std::ostream& out);

}  // namespace emgtcn
