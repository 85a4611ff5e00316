#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

// End-to-end checks of the command-line driver. The binary under test comes
// from the EMGTCN_CLI environment variable (set by the test harness).

namespace {

namespace fs = std::filesystem;

const std::string kDir = "/tmp/emgtcn_cli";

std::string cli() {
  const char* env = std::getenv("EMGTCN_CLI");
  REQUIRE_MESSAGE(env != nullptr, "EMGTCN_CLI must point at the binary");
  return env;
}

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
  const std::string capture = kDir + "/capture.txt";
  const std::string command = cli() + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

// Every path below kDir; seed 3 gives a session covering the full range of
// motion at this duration.
void write_config(const std::string& path) {
  std::ofstream out(path);
  out << "# reduced protocol for driver tests\n"
      << "session_path = " << kDir << "/session.csv\n"
      << "script_path = " << kDir << "/script.csv\n"
      << "feature_path = " << kDir << "/features.csv\n"
      << "label_path = " << kDir << "/labels.csv\n"
      << "model_path = " << kDir << "/model.ckpt\n"
      << "report_path = " << kDir << "/report.csv\n"
      << "trace_path = " << kDir << "/trace.csv\n"
      << "sweep_path = " << kDir << "/sweep.csv\n"
      << "duration_s = 60\n"
      << "sequence_len = 10\n"
      << "filters = 8\n"
      << "taps = 5\n"
      << "epochs = 2\n"
      << "batch_size = 16\n"
      << "seed = 3\n"
      << "sweep_windows = 20\n"
      << "sweep_seq_lens = 1, 8\n"
      << "sweep_epochs = 1\n";
}

std::string config_arg() {
  fs::create_directories(kDir);
  const std::string path = kDir + "/experiment.cfg";
  write_config(path);
  return "--config " + path;
}

}  // namespace

TEST_CASE("cli: a subcommand is required") {
  fs::create_directories(kDir);
  CHECK(run("").exit_code != 0);
  CHECK(run("dance").exit_code != 0);
}

TEST_CASE("cli: synth -> features -> train -> eval -> report -> sweep") {
  fs::remove_all(kDir);
  const std::string cfg = config_arg();

  const RunResult synth = run(cfg + " synth");
  CHECK(synth.exit_code == 0);
  CHECK(synth.output.find("synth: wrote 12000 samples") != std::string::npos);
  REQUIRE(fs::exists(kDir + "/session.csv"));
  REQUIRE(fs::exists(kDir + "/script.csv"));

  const RunResult features = run(cfg + " features");
  CHECK(features.exit_code == 0);
  REQUIRE(fs::exists(kDir + "/features.csv"));
  REQUIRE(fs::exists(kDir + "/labels.csv"));
  // (12000 - 40) / 5 + 1 steps plus the header line.
  CHECK(read_lines(kDir + "/labels.csv").size() == 2394);
  CHECK(read_lines(kDir + "/features.csv").size() == 2394);

  const RunResult train = run(cfg + " train --model tcn");
  CHECK(train.exit_code == 0);
  REQUIRE(fs::exists(kDir + "/model.ckpt"));
  CHECK(read_file(kDir + "/model.ckpt").find("kind tcn") != std::string::npos);

  const RunResult train_knn =
      run(cfg + " train --model knn --out " + kDir + "/knn.ckpt");
  CHECK(train_knn.exit_code == 0);
  REQUIRE(fs::exists(kDir + "/knn.ckpt"));

  const RunResult eval =
      run(cfg + " eval " + kDir + "/model.ckpt " + kDir + "/knn.ckpt");
  CHECK(eval.exit_code == 0);
  CHECK(eval.output.find("model") != std::string::npos);
  CHECK(eval.output.find("tcn") != std::string::npos);
  CHECK(eval.output.find("knn") != std::string::npos);
  REQUIRE(fs::exists(kDir + "/report.csv"));
  // Two checkpoints: traces carry an index and kind tag.
  REQUIRE(fs::exists(kDir + "/trace-0-tcn.csv"));
  REQUIRE(fs::exists(kDir + "/trace-1-knn.csv"));
  const std::vector<std::string> report_lines = read_lines(kDir + "/report.csv");
  REQUIRE(report_lines.size() == 3);
  CHECK(split_csv(report_lines[0]).size() == 11);
  CHECK(split_csv(report_lines[1])[0] == "tcn");
  CHECK(split_csv(report_lines[2])[0] == "knn");
  // Test half of 2393 steps starts at step 1200.
  CHECK(split_csv(report_lines[1])[10] == "1193");
  const std::vector<std::string> trace_lines =
      read_lines(kDir + "/trace-0-tcn.csv");
  REQUIRE(trace_lines.size() == 1194);
  CHECK(split_csv(trace_lines[1])[0] == "1200");

  // Single-checkpoint eval writes the plain trace path; recomputing the
  // metrics from that trace must reproduce the evaluation row exactly.
  const RunResult eval_one = run(cfg + " eval");
  CHECK(eval_one.exit_code == 0);
  REQUIRE(fs::exists(kDir + "/trace.csv"));
  const std::vector<std::string> eval_report = read_lines(kDir + "/report.csv");
  REQUIRE(eval_report.size() == 2);
  const RunResult report =
      run(cfg + " report --out " + kDir + "/report2.csv");
  CHECK(report.exit_code == 0);
  const std::vector<std::string> rereport = read_lines(kDir + "/report2.csv");
  REQUIRE(rereport.size() == 2);
  const std::vector<std::string> eval_row = split_csv(eval_report[1]);
  const std::vector<std::string> trace_row = split_csv(rereport[1]);
  REQUIRE(eval_row.size() == 11);
  REQUIRE(trace_row.size() == 11);
  CHECK(trace_row[0] == "trace");
  for (std::size_t i = 2; i < 11; ++i) {
    CHECK(trace_row[i] == eval_row[i]);
  }

  const RunResult sweep = run(cfg + " sweep");
  CHECK(sweep.exit_code == 0);
  CHECK(sweep.output.find("sweep: 2 cells") != std::string::npos);
  const std::vector<std::string> sweep_lines = read_lines(kDir + "/sweep.csv");
  REQUIRE(sweep_lines.size() == 3);
  CHECK(sweep_lines[0] == "window,T,accuracy");
  CHECK(split_csv(sweep_lines[1])[0] == "20");
  CHECK(split_csv(sweep_lines[1])[1] == "1");
  CHECK(split_csv(sweep_lines[2])[1] == "8");
}

TEST_CASE("cli: training is deterministic; --seed changes the session") {
  const std::string cfg = config_arg();
  if (!fs::exists(kDir + "/session.csv")) {
    REQUIRE(run(cfg + " synth").exit_code == 0);
  }
  REQUIRE(run(cfg + " train --model mlp --out " + kDir + "/m1.ckpt")
              .exit_code == 0);
  REQUIRE(run(cfg + " train --model mlp --out " + kDir + "/m2.ckpt")
              .exit_code == 0);
  CHECK(read_file(kDir + "/m1.ckpt") == read_file(kDir + "/m2.ckpt"));

  REQUIRE(run(cfg + " synth --seed 4 --out " + kDir + "/session4.csv")
              .exit_code == 0);
  CHECK(read_file(kDir + "/session4.csv") != read_file(kDir + "/session.csv"));
}

TEST_CASE("cli: failures exit nonzero with a diagnostic") {
  const std::string cfg = config_arg();
  const RunResult missing_config = run("--config /tmp/emgtcn_cli/nope.cfg synth");
  CHECK(missing_config.exit_code == 1);
  CHECK(missing_config.output.find("error:") != std::string::npos);

  const RunResult bad_kind = run(cfg + " train --model tree");
  CHECK(bad_kind.exit_code == 1);
  CHECK(bad_kind.output.find("error:") != std::string::npos);

  std::ofstream bad(kDir + "/bad.cfg");
  bad << "session_path = " << kDir << "/does_not_exist.csv\n";
  bad.close();
  const RunResult missing_session =
      run("--config " + kDir + "/bad.cfg features");
  CHECK(missing_session.exit_code == 1);
  CHECK(missing_session.output.find("error:") != std::string::npos);

  const RunResult no_trace = run(cfg + " report " + kDir + "/no_trace.csv");
  CHECK(no_trace.exit_code == 1);
  CHECK(no_trace.output.find("error:") != std::string::npos);
}
