#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "llmsketch/config.hpp"
#include "llmsketch/trace.hpp"

namespace llms {

// Every kernel below has a serial reference path and an OpenMP path. Work is
// cut into fixed blocks, each with its own generator seeded from
// (seed, block), and partial results are integers, so both paths return
// identical values for any thread count.
enum class Exec { serial, parallel };

// Mean of the final lock flag after feeding `labels` (0/1) through the lock
// update rule starting from an empty cell, over `trials` runs.
double lock_flag_mc(std::span<const uint8_t> labels, uint64_t trials, uint64_t seed,
                    Exec exec = Exec::parallel);

struct CmsCalibration {
  double mean_fraction = 0;  // fraction of flows whose estimate is exact
  std::vector<double> per_seed;
};

// Inserts `n_flows` distinct random flows, one packet each, into a w x d
// Count-Min sketch per seed and measures the exact fraction.
CmsCalibration cms_exact_fraction(size_t width, size_t depth, size_t n_flows, size_t seeds,
                                  uint64_t seed, Exec exec = Exec::parallel);

struct OneSidedResult {
  uint64_t streams = 0;
  uint64_t flows_checked = 0;
  uint64_t violations = 0;  // estimate < exact count
};

// Random streams (random shape, flow count and skew, 32-bit counters) of
// `packets` packets each; every flow's estimate is checked against an exact
// hash-table count.
OneSidedResult cms_one_sided(size_t streams, size_t packets, uint64_t seed,
                             Exec exec = Exec::parallel);

struct CocoPairResult {
  uint64_t truth[2] = {0, 0};
  double mean_estimate[2] = {0, 0};  // E[query(k)]
};

// One-slot CocoLight fed the key-id sequence (ids 0/1, delta 1 each).
CocoPairResult coco_pair_mc(std::span<const uint8_t> key_sequence, uint64_t trials, uint64_t seed,
                            Exec exec = Exec::parallel);

// End-to-end run of the two-tier sketch with a noisy oracle classifier.
struct NoisyOracleSetup {
  ZipfParams trace;
  double accuracy_A = 1.0;
  SketchConfig cfg;  // w_h, w_light etc. already sized
};

struct NoisyOracleTrial {
  uint64_t seed = 0;
  size_t large_flows = 0;
  size_t exact_large = 0;
  // Large flows whose first packet found its bucket full, i.e. met the
  // classifier on arrival instead of taking a free cell unclassified.
  size_t classified_large = 0;
  size_t exact_classified_large = 0;
  size_t n_light = 0;           // distinct flows that reached the light part
  uint64_t light_packets = 0;   // ||f_light||_1
  size_t bound_violations = 0;  // large flows with est > truth + eps * ||f_light||_1
  double predicted = 0;         // p_llms(A, measured n_light)
  double delta = 0;

  double exact_fraction() const {
    return large_flows ? static_cast<double>(exact_large) / static_cast<double>(large_flows) : 1.0;
  }
  double classified_exact_fraction() const {
    return classified_large ? static_cast<double>(exact_classified_large) /
                                  static_cast<double>(classified_large)
                            : 1.0;
  }
  double violation_fraction() const {
    return large_flows ? static_cast<double>(bound_violations) / static_cast<double>(large_flows)
                       : 0.0;
  }
};

NoisyOracleTrial noisy_oracle_trial(const NoisyOracleSetup& setup, uint64_t seed);
// Trials for seeds base_seed, base_seed + 1, ...
std::vector<NoisyOracleTrial> noisy_oracle_trials(const NoisyOracleSetup& setup, size_t seeds,
                                                  uint64_t base_seed, Exec exec = Exec::parallel);

}  // namespace llms
