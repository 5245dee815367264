#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "llmsketch/classifier.hpp"
#include "llmsketch/flow_key.hpp"

namespace llms {

struct AnalysisInputs {
  double accuracy_A = 1.0;  // classifier accuracy on large flows
  double w_light = 1;
  double d_light = 1;
  double n_light = 1;        // flows that end up in the light part
  double n_large = 0;        // true large flows
  double total_packets = 0;  // ||f||_1
  double threshold_T = 64;

  // Throws ConfigError.
  void validate() const;
};

// Probability a flow is exact in a w x d Count-Min sketch holding N flows,
// Poisson approximation: 1 - (1 - e^{-(N-1)/w})^d.
double p_cms(double w, double d, double n);

// A + (1 - A) * p_cms(w_light, d_light, n_light).
double p_llms(const AnalysisInputs& in);

struct ErrorBound {
  double epsilon;           // e / w_light
  double delta;             // (1 - A) e^{-d_light}
  double light_mass_bound;  // ||f||_1 - A * N_large * T, floored at 0
};

// With probability >= 1 - delta, estimate <= truth + epsilon * ||f_light||_1.
ErrorBound error_bound(const AnalysisInputs& in);

struct MetricReport {
  double are = 0;
  double aae = 0;
  double f1 = 0;
  double precision = 0;
  double recall = 0;
  size_t universe = 0;
};

// ARE and AAE over every key of `truth` (estimates default to 0), plus
// precision/recall/F1 of `reported` against `expected`. An empty reported
// set has precision 1, an empty expected set recall 1. Results do not depend
// on iteration order. Throws InputError on empty truth or a zero count.
MetricReport compute_metrics(const FlowSizeMap& truth, const FlowSizeMap& estimates,
                             std::span<const FlowKey> expected, std::span<const FlowKey> reported);

// Same, with estimates supplied by a callable (e.g. a sketch query).
template <typename Estimate>
MetricReport compute_metrics_with(const FlowSizeMap& truth, Estimate&& estimate,
                                  std::span<const FlowKey> expected,
                                  std::span<const FlowKey> reported) {
  FlowSizeMap est;
  est.reserve(truth.size());
  for (const auto& [k, n] : truth) est.emplace(k, estimate(k));
  return compute_metrics(truth, est, expected, reported);
}

// Precision, recall and F1 only; ARE/AAE left at 0 over an empty universe.
MetricReport classification_metrics(std::span<const FlowKey> expected,
                                    std::span<const FlowKey> reported);

// f1 = 2 PR RR / (PR + RR), or 0 when PR + RR == 0.
double f1_score(double precision, double recall);

}  // namespace llms
