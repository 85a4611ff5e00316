#include "emgtcn/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace emgtcn {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("csv: cannot open '" + path + "' for writing");
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("csv: cannot open '" + path + "'");
  }
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("csv: write to '" + path + "' failed");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

// Rows of a CSV body, each split into cells and checked against the header's
// column count. Trailing blank lines are ignored; a \r from CRLF input is
// stripped.
class CsvReader {
 public:
  CsvReader(const std::string& path, std::size_t min_columns)
      : path_(path), in_(open_in(path)) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw std::runtime_error("csv: '" + path + "' is empty");
    }
    strip_cr(line);
    header_ = split_row(line);
    if (header_.size() < min_columns) {
      throw std::runtime_error("csv: '" + path + "' has too few columns");
    }
  }

  const std::vector<std::string>& header() const { return header_; }

  void require_first_column(const std::string& name) const {
    if (header_.empty() || header_.front() != name) {
      throw std::runtime_error("csv: '" + path_ + "' is not a " + name +
                               "-indexed table");
    }
  }

  bool next(std::vector<std::string>& cells) {
    std::string line;
    while (std::getline(in_, line)) {
      strip_cr(line);
      if (line.empty()) {
        continue;
      }
      cells = split_row(line);
      ++row_;
      if (cells.size() != header_.size()) {
        throw std::runtime_error("csv: '" + path_ + "' row " +
                                 std::to_string(row_) +
                                 " has wrong column count");
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("csv: '" + path_ + "' row " +
                             std::to_string(row_) + ": " + what);
  }

  double to_double(const std::string& cell) const {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      fail("bad number '" + cell + "'");
    }
    return v;
  }

  long to_long(const std::string& cell) const {
    char* end = nullptr;
    const long v = std::strtol(cell.c_str(), &end, 10);
    if (end == cell.c_str() || *end != '\0') {
      fail("bad integer '" + cell + "'");
    }
    return v;
  }

  StateTag to_state(const std::string& cell) const {
    if (cell == "S") {
      return StateTag::kSteady;
    }
    if (cell == "T") {
      return StateTag::kTransient;
    }
    fail("bad state '" + cell + "'");
  }

 private:
  static void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
  }

  std::string path_;
  std::ifstream in_;
  std::vector<std::string> header_;
  long row_ = 0;
};

char state_char(StateTag tag) {
  return tag == StateTag::kTransient ? 'T' : 'S';
}

}  // namespace

void write_session_csv(const std::string& path,
                       const std::vector<EmgRecord>& emg,
                       const std::vector<JointState>& joints) {
  if (emg.size() != joints.size()) {
    throw std::invalid_argument("csv: EMG and joint streams differ in length");
  }
  const Eigen::Index channels = emg.empty() ? 0 : emg.front().channels.size();
  std::ofstream out = open_out(path);
  out << "t";
  for (Eigen::Index j = 0; j < channels; ++j) {
    out << ",ch" << (j + 1);
  }
  out << ",theta1,theta2,theta3\n";
  for (std::size_t i = 0; i < emg.size(); ++i) {
    if (emg[i].t != joints[i].t) {
      throw std::invalid_argument("csv: EMG and joint timestamps diverge");
    }
    if (emg[i].channels.size() != channels) {
      throw std::invalid_argument("csv: ragged channel count");
    }
    out << emg[i].t;
    for (Eigen::Index j = 0; j < channels; ++j) {
      out << "," << format_double(emg[i].channels[j]);
    }
    for (int d = 0; d < kNumDofs; ++d) {
      out << "," << format_double(joints[i].theta[d]);
    }
    out << "\n";
  }
  finish_out(out, path);
}

Session read_session_csv(const std::string& path) {
  CsvReader reader(path, 1 + 1 + kNumDofs);
  reader.require_first_column("t");
  const int channels =
      static_cast<int>(reader.header().size()) - 1 - kNumDofs;
  if (channels < 1) {
    throw std::runtime_error("csv: '" + path + "' has no channel columns");
  }
  Session session;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    EmgRecord rec;
    rec.t = reader.to_long(cells[0]);
    rec.channels.resize(channels);
    for (int j = 0; j < channels; ++j) {
      rec.channels[j] = reader.to_double(cells[1 + j]);
    }
    JointState js;
    js.t = rec.t;
    for (int d = 0; d < kNumDofs; ++d) {
      js.theta[d] = reader.to_double(cells[1 + channels + d]);
    }
    session.emg.push_back(std::move(rec));
    session.joints.push_back(js);
  }
  return session;
}

void write_script_csv(const std::string& path, const MovementScript& script) {
  std::ofstream out = open_out(path);
  out << "segment,class,e1,e2,e3,ramp_s,hold_s\n";
  for (std::size_t i = 0; i < script.size(); ++i) {
    const MovementSegment& seg = script[i];
    out << i << "," << pack_class(seg.target);
    for (int d = 0; d < kNumDofs; ++d) {
      out << "," << seg.target.e[d];
    }
    out << "," << format_double(seg.ramp_s) << ","
        << format_double(seg.hold_s) << "\n";
  }
  finish_out(out, path);
}

MovementScript read_script_csv(const std::string& path) {
  CsvReader reader(path, 7);
  reader.require_first_column("segment");
  MovementScript script;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    MovementSegment seg;
    seg.target = unpack_class(static_cast<int>(reader.to_long(cells[1])));
    for (int d = 0; d < kNumDofs; ++d) {
      if (seg.target.e[d] != static_cast<int>(reader.to_long(cells[2 + d]))) {
        reader.fail("encoding does not match class");
      }
    }
    seg.ramp_s = reader.to_double(cells[5]);
    seg.hold_s = reader.to_double(cells[6]);
    script.push_back(seg);
  }
  return script;
}

void write_feature_csv(const std::string& path,
                       const std::vector<FeatureVector>& features) {
  const Eigen::Index dim =
      features.empty() ? 0 : features.front().values.size();
  std::ofstream out = open_out(path);
  out << "t";
  for (Eigen::Index j = 0; j < dim; ++j) {
    out << ",f" << (j + 1);
  }
  out << "\n";
  for (const FeatureVector& fv : features) {
    if (fv.values.size() != dim) {
      throw std::invalid_argument("csv: ragged feature dimension");
    }
    out << fv.t;
    for (Eigen::Index j = 0; j < dim; ++j) {
      out << "," << format_double(fv.values[j]);
    }
    out << "\n";
  }
  finish_out(out, path);
}

std::vector<FeatureVector> read_feature_csv(const std::string& path) {
  CsvReader reader(path, 2);
  reader.require_first_column("t");
  const int dim = static_cast<int>(reader.header().size()) - 1;
  std::vector<FeatureVector> features;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    FeatureVector fv;
    fv.t = reader.to_long(cells[0]);
    fv.values.resize(dim);
    for (int j = 0; j < dim; ++j) {
      fv.values[j] = reader.to_double(cells[1 + j]);
    }
    features.push_back(std::move(fv));
  }
  return features;
}

void write_label_csv(const std::string& path, const std::vector<int>& labels,
                     const std::vector<StateTag>& states) {
  if (labels.size() != states.size()) {
    throw std::invalid_argument("csv: label and state streams differ");
  }
  std::ofstream out = open_out(path);
  out << "t,class,e1,e2,e3,state\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const TernaryEncoding enc = unpack_class(labels[i]);
    out << i << "," << labels[i];
    for (int d = 0; d < kNumDofs; ++d) {
      out << "," << enc.e[d];
    }
    out << "," << state_char(states[i]) << "\n";
  }
  finish_out(out, path);
}

std::vector<LabelRow> read_label_csv(const std::string& path) {
  CsvReader reader(path, 6);
  reader.require_first_column("t");
  std::vector<LabelRow> rows;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    LabelRow row;
    row.t = reader.to_long(cells[0]);
    row.label = static_cast<int>(reader.to_long(cells[1]));
    row.enc = unpack_class(row.label);
    for (int d = 0; d < kNumDofs; ++d) {
      if (row.enc.e[d] != static_cast<int>(reader.to_long(cells[2 + d]))) {
        reader.fail("encoding does not match class");
      }
    }
    row.state = reader.to_state(cells[5]);
    rows.push_back(row);
  }
  return rows;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows) {
  std::ofstream out = open_out(path);
  out << "t,truth,pred,state,correct\n";
  for (const TraceRow& row : rows) {
    out << row.t << "," << row.truth << "," << row.pred << ","
        << state_char(row.state) << "," << (row.correct ? 1 : 0) << "\n";
  }
  finish_out(out, path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  CsvReader reader(path, 5);
  reader.require_first_column("t");
  std::vector<TraceRow> rows;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    TraceRow row;
    row.t = reader.to_long(cells[0]);
    row.truth = static_cast<int>(reader.to_long(cells[1]));
    row.pred = static_cast<int>(reader.to_long(cells[2]));
    row.state = reader.to_state(cells[3]);
    row.correct = reader.to_long(cells[4]) != 0;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out = open_out(path);
  out << "window,T,accuracy\n";
  for (const SweepRow& row : rows) {
    out << row.window_len << "," << row.sequence_len << ","
        << format_double(row.accuracy) << "\n";
  }
  finish_out(out, path);
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  CsvReader reader(path, 3);
  reader.require_first_column("window");
  std::vector<SweepRow> rows;
  std::vector<std::string> cells;
  while (reader.next(cells)) {
    SweepRow row;
    row.window_len = static_cast<int>(reader.to_long(cells[0]));
    row.sequence_len = static_cast<int>(reader.to_long(cells[1]));
    row.accuracy = reader.to_double(cells[2]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace emgtcn
