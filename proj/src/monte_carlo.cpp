#include "llmsketch/monte_carlo.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <unordered_set>

#include "llmsketch/analysis.hpp"
#include "llmsketch/classifier.hpp"
#include "llmsketch/coco_light.hpp"
#include "llmsketch/count_min.hpp"
#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"
#include "llmsketch/heavy_part.hpp"
#include "llmsketch/llm_sketch.hpp"

namespace llms {

namespace {

constexpr uint64_t kBlock = 1024;

uint64_t block_seed(uint64_t seed, uint64_t block) { return mix64(seed ^ mix64(block + 1)); }

// Sums kernel(b) over blocks [0, blocks) serially or with OpenMP.
template <typename Kernel>
uint64_t sum_blocks(uint64_t blocks, Exec exec, Kernel&& kernel) {
  uint64_t total = 0;
  if (exec == Exec::serial) {
    for (uint64_t b = 0; b < blocks; ++b) total += kernel(b);
    return total;
  }
  const auto n = static_cast<int64_t>(blocks);
#pragma omp parallel for schedule(dynamic) reduction(+ : total)
  for (int64_t b = 0; b < n; ++b) total += kernel(static_cast<uint64_t>(b));
  return total;
}

template <typename Kernel>
void for_each_index(size_t n, Exec exec, Kernel&& kernel) {
  if (exec == Exec::serial) {
    for (size_t i = 0; i < n; ++i) kernel(i);
    return;
  }
  const auto m = static_cast<int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < m; ++i) kernel(static_cast<size_t>(i));
}

FlowKey random_key(std::mt19937_64& rng) {
  const uint64_t a = rng();
  const uint64_t b = rng();
  return FlowKey::from_tuple(static_cast<uint32_t>(a), static_cast<uint32_t>(a >> 32),
                             static_cast<uint16_t>(b), static_cast<uint16_t>(b >> 16),
                             static_cast<uint8_t>(b >> 32));
}

std::vector<FlowKey> distinct_keys(size_t n, std::mt19937_64& rng) {
  std::unordered_set<FlowKey, FlowKeyHash> seen;
  std::vector<FlowKey> keys;
  keys.reserve(n);
  while (keys.size() < n) {
    FlowKey k = random_key(rng);
    if (seen.insert(k).second) keys.push_back(k);
  }
  return keys;
}

}  // namespace

double lock_flag_mc(std::span<const uint8_t> labels, uint64_t trials, uint64_t seed, Exec exec) {
  if (trials < 1) throw ConfigError("need at least one trial");
  for (uint8_t y : labels)
    if (y > 1) throw ConfigError("labels must be 0 or 1");
  if (labels.empty()) return 0.0;
  const uint64_t blocks = (trials + kBlock - 1) / kBlock;
  const uint64_t locked = sum_blocks(blocks, exec, [&](uint64_t b) {
    Rng rng(block_seed(seed, b));
    const uint64_t begin = b * kBlock;
    const uint64_t end = std::min(trials, begin + kBlock);
    uint64_t ones = 0;
    for (uint64_t t = begin; t < end; ++t) {
      bool lock = false;
      for (size_t i = 0; i < labels.size(); ++i) lock = lock_update(lock, i, labels[i] != 0, rng);
      ones += lock ? 1 : 0;
    }
    return ones;
  });
  return static_cast<double>(locked) / static_cast<double>(trials);
}

CmsCalibration cms_exact_fraction(size_t width, size_t depth, size_t n_flows, size_t seeds,
                                  uint64_t seed, Exec exec) {
  if (seeds < 1 || n_flows < 1) throw ConfigError("need at least one seed and one flow");
  CmsCalibration out;
  out.per_seed.assign(seeds, 0.0);
  for_each_index(seeds, exec, [&](size_t s) {
    std::mt19937_64 rng(block_seed(seed, s));
    const auto keys = distinct_keys(n_flows, rng);
    CountMinSketch cms(depth, width, 32, rng());
    for (const auto& k : keys) cms.insert(k, 1);
    size_t exact = 0;
    for (const auto& k : keys) exact += cms.query(k) == 1 ? 1 : 0;
    out.per_seed[s] = static_cast<double>(exact) / static_cast<double>(n_flows);
  });
  double sum = 0;
  for (double f : out.per_seed) sum += f;
  out.mean_fraction = sum / static_cast<double>(seeds);
  return out;
}

OneSidedResult cms_one_sided(size_t streams, size_t packets, uint64_t seed, Exec exec) {
  std::vector<OneSidedResult> parts(streams);
  for_each_index(streams, exec, [&](size_t s) {
    std::mt19937_64 rng(block_seed(seed, s));
    const size_t depth = 1 + rng() % 4;
    const size_t width = 8 + rng() % 2048;
    const size_t flows = 1 + rng() % 3000;
    const double alpha = 0.5 + static_cast<double>(rng() % 1000) / 1000.0;
    const auto keys = distinct_keys(flows, rng);
    std::vector<double> weights(flows);
    for (size_t i = 0; i < flows; ++i) weights[i] = std::pow(static_cast<double>(i + 1), -alpha);
    std::discrete_distribution<size_t> pick(weights.begin(), weights.end());

    CountMinSketch cms(depth, width, 32, rng());
    FlowSizeMap exact;
    for (size_t p = 0; p < packets; ++p) {
      const FlowKey& k = keys[pick(rng)];
      cms.insert(k, 1);
      ++exact[k];
    }
    OneSidedResult r;
    r.streams = 1;
    for (const auto& [k, n] : exact) {
      ++r.flows_checked;
      if (cms.query(k) < n) ++r.violations;
    }
    parts[s] = r;
  });
  OneSidedResult total;
  for (const auto& p : parts) {
    total.streams += p.streams;
    total.flows_checked += p.flows_checked;
    total.violations += p.violations;
  }
  return total;
}

CocoPairResult coco_pair_mc(std::span<const uint8_t> key_sequence, uint64_t trials, uint64_t seed,
                            Exec exec) {
  if (trials < 1) throw ConfigError("need at least one trial");
  const FlowKey keys[2] = {FlowKey::from_tuple(0x0a000001, 0x0a000002, 1, 2, 6),
                           FlowKey::from_tuple(0x0a000003, 0x0a000004, 3, 4, 17)};
  CocoPairResult out;
  for (uint8_t id : key_sequence) {
    if (id > 1) throw ConfigError("coco pair workload uses key ids 0 and 1");
    ++out.truth[id];
  }
  const uint64_t blocks = (trials + kBlock - 1) / kBlock;
  for (int which = 0; which < 2; ++which) {
    const uint64_t sum = sum_blocks(blocks, exec, [&](uint64_t b) {
      const uint64_t begin = b * kBlock;
      const uint64_t end = std::min(trials, begin + kBlock);
      uint64_t acc = 0;
      for (uint64_t t = begin; t < end; ++t) {
        CocoLight coco(1, 1, block_seed(seed, t));
        for (uint8_t id : key_sequence) coco.insert(keys[id], 1);
        acc += coco.query(keys[which]);
      }
      return acc;
    });
    out.mean_estimate[which] = static_cast<double>(sum) / static_cast<double>(trials);
  }
  return out;
}

NoisyOracleTrial noisy_oracle_trial(const NoisyOracleSetup& setup, uint64_t seed) {
  ZipfParams zp = setup.trace;
  zp.seed = mix64(zp.seed ^ seed);
  zp.with_headers = false;
  const auto packets = to_packets(generate_zipf(zp));
  auto truth = std::make_shared<const FlowSizeMap>(exact_counts(packets));

  SketchConfig cfg = setup.cfg;
  cfg.seed = mix64(cfg.seed ^ seed);
  auto oracle = std::make_shared<const OracleBackend>(truth, cfg.threshold_T, cfg.scale_a);
  auto noisy = std::make_shared<const NoisyOracle>(oracle, setup.accuracy_A, mix64(seed ^ 0xa11));
  LlmSketch sketch(cfg, QueryMode::size, noisy);
  std::unordered_set<FlowKey, FlowKeyHash> light_flows;
  sketch.set_light_observer([&](const FlowKey& k, uint64_t) { light_flows.insert(k); });
  std::unordered_set<FlowKey, FlowKeyHash> seen, classified_on_arrival;
  for (const auto& p : packets) {
    if (seen.insert(p.key).second) {
      const FlowKey k = sketch.stored_key(p.key);
      if (sketch.heavy().bucket_full(sketch.heavy().bucket_of(k))) classified_on_arrival.insert(p.key);
    }
    sketch.insert(p);
  }

  NoisyOracleTrial r;
  r.seed = seed;
  r.n_light = light_flows.size();
  r.light_packets = sketch.stats().light_packets;
  AnalysisInputs in;
  in.accuracy_A = setup.accuracy_A;
  in.w_light = static_cast<double>(cfg.w_light);
  in.d_light = static_cast<double>(cfg.d_light);
  in.n_light = static_cast<double>(std::max<size_t>(r.n_light, 1));
  r.predicted = p_llms(in);
  const ErrorBound eb = error_bound(in);
  r.delta = eb.delta;
  const double slack = eb.epsilon * static_cast<double>(r.light_packets);
  for (const auto& [k, n] : *truth) {
    if (n < cfg.threshold_T) continue;
    ++r.large_flows;
    const uint64_t est = sketch.query_size(k);
    if (est == n) ++r.exact_large;
    if (classified_on_arrival.count(k)) {
      ++r.classified_large;
      if (est == n) ++r.exact_classified_large;
    }
    if (static_cast<double>(est) > static_cast<double>(n) + slack) ++r.bound_violations;
  }
  return r;
}

std::vector<NoisyOracleTrial> noisy_oracle_trials(const NoisyOracleSetup& setup, size_t seeds,
                                                  uint64_t base_seed, Exec exec) {
  std::vector<NoisyOracleTrial> out(seeds);
  for_each_index(seeds, exec, [&](size_t i) { out[i] = noisy_oracle_trial(setup, base_seed + i); });
  return out;
}

}  // namespace llms
