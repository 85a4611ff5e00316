#include "emgtcn/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace emgtcn {

namespace {

void require_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": misaligned stream lengths");
}

}  // namespace

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  require_aligned(pred.size(), truth.size(), "accuracy");
  if (pred.empty()) throw std::invalid_argument("accuracy: empty streams");
  std::int64_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double masked_accuracy(const std::vector<int>& pred,
                       const std::vector<int>& truth,
                       const std::vector<StateTag>& tags, StateTag state) {
  require_aligned(pred.size(), truth.size(), "masked_accuracy");
  require_aligned(pred.size(), tags.size(), "masked_accuracy");
  std::int64_t correct = 0;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (tags[i] != state) continue;
    ++total;
    if (pred[i] == truth[i]) ++correct;
  }
  if (total == 0) throw std::invalid_argument("masked_accuracy: empty mask selection");
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::int64_t switch_count(const std::vector<int>& stream) {
  if (stream.size() < 2) throw std::invalid_argument("switch_count: need N >= 2");
  std::int64_t switches = 0;
  for (std::size_t i = 1; i < stream.size(); ++i)
    if (stream[i] != stream[i - 1]) ++switches;
  return switches;
}

double stability(const std::vector<int>& pred, const std::vector<int>& truth) {
  require_aligned(pred.size(), truth.size(), "stability");
  if (pred.size() < 2) throw std::invalid_argument("stability: need N >= 2");
  const auto cp = switch_count(pred);
  const auto ct = switch_count(truth);
  const auto n = static_cast<std::int64_t>(pred.size());
  return 1.0 - static_cast<double>(std::llabs(cp - ct)) / static_cast<double>(n - 1);
}

EvalReport segment_report(const std::vector<int>& pred,
                          const std::vector<int>& truth,
                          const std::vector<StateTag>& tags) {
  require_aligned(pred.size(), truth.size(), "segment_report");
  require_aligned(pred.size(), tags.size(), "segment_report");
  if (pred.size() < 2) throw std::invalid_argument("segment_report: need N >= 2");

  EvalReport r;
  r.n = static_cast<std::int64_t>(pred.size());
  r.accuracy = accuracy(pred, truth);
  r.switches_pred = switch_count(pred);
  r.switches_truth = switch_count(truth);
  r.stability = stability(pred, truth);

  for (StateTag state : {StateTag::kSteady, StateTag::kTransient}) {
    bool present = false;
    for (auto t : tags) present = present || (t == state);
    auto& acc_field = state == StateTag::kSteady ? r.accuracy_steady : r.accuracy_transient;
    auto& stab_field = state == StateTag::kSteady ? r.stability_steady : r.stability_transient;
    if (!present) continue;
    acc_field = masked_accuracy(pred, truth, tags, state);

    // Length-weighted mean stability over maximal contiguous runs of this
    // state with at least two steps.
    double weighted = 0.0;
    double weight = 0.0;
    std::size_t i = 0;
    while (i < tags.size()) {
      if (tags[i] != state) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < tags.size() && tags[j] == state) ++j;
      const std::size_t len = j - i;
      if (len >= 2) {
        std::vector<int> run_pred(pred.begin() + i, pred.begin() + j);
        std::vector<int> run_truth(truth.begin() + i, truth.begin() + j);
        weighted += static_cast<double>(len) * stability(run_pred, run_truth);
        weight += static_cast<double>(len);
      }
      i = j;
    }
    if (weight > 0.0) stab_field = weighted / weight;
  }
  return r;
}

}  // namespace emgtcn
