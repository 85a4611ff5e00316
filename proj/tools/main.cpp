#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emgtcn/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"EMG movement-intent classification experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string model_kind = "tcn";
  std::string out_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "experiment config file");
  auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
  app.add_option("--model", model_kind, "model kind: tcn, knn, or mlp");
  auto* out_opt = app.add_option(
      "--out", out_path, "override the subcommand's primary output path");

  auto* synth =
      app.add_subcommand("synth", "generate a synthetic 3-DOF session");
  auto* features =
      app.add_subcommand("features", "extract features and labels to CSV");
  auto* train = app.add_subcommand("train", "train a model on the train half");
  auto* eval =
      app.add_subcommand("eval", "evaluate checkpoints on the test half");
  std::vector<std::string> checkpoints;
  eval->add_option("checkpoints", checkpoints,
                   "checkpoint files (default: the configured model path)");
  auto* report = app.add_subcommand(
      "report", "recompute metrics from a per-step trace CSV");
  std::string trace_arg;
  report->add_option("trace", trace_arg,
                     "trace CSV (default: the configured trace path)");
  auto* sweep = app.add_subcommand(
      "sweep", "train/evaluate over the window x sequence-length grid");
  for (CLI::App* sub : {synth, features, train, eval, report, sweep}) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);

  try {
    emgtcn::ExperimentConfig config;
    if (!config_path.empty()) {
      config = emgtcn::load_config(config_path);
    }
    if (seed_opt->count() > 0) {
      config.seed = seed;
    }
    const bool has_out = out_opt->count() > 0;

    if (synth->parsed()) {
      if (has_out) {
        config.session_path = out_path;
      }
      emgtcn::cmd_synth(config, std::cout);
    } else if (features->parsed()) {
      if (has_out) {
        config.feature_path = out_path;
      }
      emgtcn::cmd_features(config, model_kind, std::cout);
    } else if (train->parsed()) {
      if (has_out) {
        config.model_path = out_path;
      }
      emgtcn::cmd_train(config, model_kind, std::cout);
    } else if (eval->parsed()) {
      if (has_out) {
        config.report_path = out_path;
      }
      if (checkpoints.empty()) {
        checkpoints.push_back(config.model_path);
      }
      emgtcn::cmd_eval(config, checkpoints, std::cout);
    } else if (report->parsed()) {
      if (has_out) {
        config.report_path = out_path;
      }
      const std::string trace =
          trace_arg.empty() ? config.trace_path : trace_arg;
      if (trace.empty()) {
        throw std::invalid_argument(
            "report: no trace file given (argument or trace_path)");
      }
      emgtcn::cmd_report(config, trace, std::cout);
    } else if (sweep->parsed()) {
      if (has_out) {
        config.sweep_path = out_path;
      }
      emgtcn::cmd_sweep(config, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
