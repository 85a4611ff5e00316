#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emgtcn/labeling.hpp"
#include "emgtcn/signal.hpp"
#include "emgtcn/synth.hpp"
#include "emgtcn/types.hpp"

namespace emgtcn {

// Plain CSV readers/writers for the artifact's file formats. Doubles are
// written with %.17g so a write/read round trip reproduces values exactly.

// Session: header `t,ch1..chN,theta1,theta2,theta3`, one row per raw sample.
struct Session {
  std::vector<EmgRecord> emg;
  std::vector<JointState> joints;
};

void write_session_csv(const std::string& path,
                       const std::vector<EmgRecord>& emg,
                       const std::vector<JointState>& joints);
Session read_session_csv(const std::string& path);

// Movement-script sidecar for ground-truth auditing:
// `segment,class,e1,e2,e3,ramp_s,hold_s`.
void write_script_csv(const std::string& path, const MovementScript& script);
MovementScript read_script_csv(const std::string& path);

// Features: header `t,f1..fK`, one row per feature time-step.
void write_feature_csv(const std::string& path,
                       const std::vector<FeatureVector>& features);
std::vector<FeatureVector> read_feature_csv(const std::string& path);

// Labels: header `t,class,e1,e2,e3,state`, state S (steady) or T (transient).
struct LabelRow {
  std::int64_t t = 0;
  int label = 0;
  TernaryEncoding enc;
  StateTag state = StateTag::kSteady;
};

void write_label_csv(const std::string& path, const std::vector<int>& labels,
                     const std::vector<StateTag>& states);
std::vector<LabelRow> read_label_csv(const std::string& path);

// Per-step evaluation trace: header `t,truth,pred,state,correct`.
struct TraceRow {
  std::int64_t t = 0;
  int truth = 0;
  int pred = 0;
  StateTag state = StateTag::kSteady;
  bool correct = false;
};

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// Sweep contour table: header `window,T,accuracy`; failed cells carry nan.
struct SweepRow {
  int window_len = 0;
  int sequence_len = 0;
  double accuracy = 0.0;
};

void write_sweep_csv(const std::string& path,
                     const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

}  // namespace emgtcn
