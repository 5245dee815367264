#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "llmsketch/classifier.hpp"
#include "llmsketch/coco_light.hpp"
#include "llmsketch/config.hpp"
#include "llmsketch/count_min.hpp"
#include "llmsketch/heavy_part.hpp"

namespace llms {

struct SketchStats {
  uint64_t packets = 0;
  uint64_t case1 = 0;
  uint64_t case2 = 0;
  uint64_t case3 = 0;
  uint64_t case3_large = 0;
  uint64_t evictions = 0;
  uint64_t classifier_errors = 0;
  // Packets handed to the light part, counting evicted sizes.
  uint64_t light_packets = 0;
  // Packets discarded because there is no light part (heavy-only hh mode).
  uint64_t dropped = 0;
};

struct HeavyHitter {
  FlowKey key;
  uint64_t size;
};

// Heavy part + light part + classifier. In size and hh mode the light part
// is a Count-Min sketch (omitted in hh mode when w_light == 0); in hhh mode
// it is a CocoLight.
//
// Single writer. The classifier is shared and must outlive nothing in
// particular; it is held by shared_ptr.
class LlmSketch {
 public:
  LlmSketch(const SketchConfig& cfg, QueryMode mode, std::shared_ptr<const Classifier> classifier);

  void insert(const PacketRecord& pkt);

  // Heavy value if resident, otherwise the light estimate.
  uint64_t query_size(const FlowKey& key) const;

  // Resident flows with size > threshold, largest first (ties by key).
  std::vector<HeavyHitter> query_heavy_hitters(uint64_t threshold) const;
  // hh_threshold_fraction x packets seen, rounded down.
  uint64_t hh_threshold() const noexcept;

  // Heavy cells and occupied coco slots merged into one table, keeping the
  // max on duplicate keys. hhh mode only.
  KeyCountTable merged_table() const;
  std::vector<HhhEntry> query_hhh(const Hierarchy& hier, uint64_t threshold) const;

  void reset();

  const SketchConfig& config() const noexcept { return cfg_; }
  QueryMode mode() const noexcept { return mode_; }
  const SketchStats& stats() const noexcept { return stats_; }
  const HeavyTable& heavy() const noexcept { return heavy_; }
  const CountMinSketch* cms() const noexcept { return std::get_if<CountMinSketch>(&light_); }
  const CocoLight* coco() const noexcept { return std::get_if<CocoLight>(&light_); }
  bool has_light() const noexcept { return !std::holds_alternative<std::monostate>(light_); }
  size_t memory_bytes() const noexcept;

  // Called for every light-part insertion (key as stored, delta). For
  // instrumentation only.
  using LightObserver = std::function<void(const FlowKey&, uint64_t)>;
  void set_light_observer(LightObserver obs) { observer_ = std::move(obs); }

  // Key as stored: the packet key, or its fingerprint when enabled.
  FlowKey stored_key(const FlowKey& key) const;

 private:
  bool classify(const PacketRecord& pkt);
  void light_insert(const FlowKey& key, uint64_t delta);

  SketchConfig cfg_;
  QueryMode mode_;
  std::shared_ptr<const Classifier> classifier_;
  HeavyTable heavy_;
  std::variant<std::monostate, CountMinSketch, CocoLight> light_;
  SketchStats stats_;
  uint64_t fp_seed_;
  LightObserver observer_;
};

}  // namespace llms
