#include "llmsketch/llm_sketch.hpp"

#include <algorithm>
#include <map>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

namespace {

std::variant<std::monostate, CountMinSketch, CocoLight> make_light(const SketchConfig& cfg,
                                                                   QueryMode mode) {
  const uint64_t seed = mix64(cfg.seed ^ 0x6c696768ULL);
  if (cfg.w_light == 0) {
    if (mode != QueryMode::hh) throw ConfigError("a light part is required outside hh mode");
    return std::monostate{};
  }
  if (mode == QueryMode::hhh) return CocoLight(cfg.coco_rows, cfg.w_light, seed);
  return CountMinSketch(cfg.d_light, cfg.w_light, cfg.light_counter_bits, seed);
}

}  // namespace

LlmSketch::LlmSketch(const SketchConfig& cfg, QueryMode mode,
                     std::shared_ptr<const Classifier> classifier)
    : cfg_(cfg),
      mode_(mode),
      classifier_(std::move(classifier)),
      heavy_((cfg.validate(), cfg.w_h), cfg.d_h, mix64(cfg.seed ^ 0x68656176ULL)),
      light_(make_light(cfg, mode)),
      fp_seed_(mix64(cfg.seed ^ 0x66696e67ULL)) {
  if (!classifier_) throw ConfigError("sketch needs a classifier");
  if (mode == QueryMode::hhh && cfg.fingerprint_bits != 0)
    throw ConfigError("hhh mode needs full flow keys; disable fingerprints");
}

FlowKey LlmSketch::stored_key(const FlowKey& key) const {
  if (cfg_.fingerprint_bits == 0 || key.is_fingerprint()) return key;
  return make_fingerprint(key, cfg_.fingerprint_bits, fp_seed_);
}

bool LlmSketch::classify(const PacketRecord& pkt) {
  try {
    return binarize(classifier_->classify(pkt));
  } catch (const ClassifierError&) {
    ++stats_.classifier_errors;
    return false;
  }
}

void LlmSketch::light_insert(const FlowKey& key, uint64_t delta) {
  if (auto* cms = std::get_if<CountMinSketch>(&light_)) {
    cms->insert(key, delta);
  } else if (auto* coco = std::get_if<CocoLight>(&light_)) {
    coco->insert(key, delta);
  } else {
    stats_.dropped += delta;
    return;
  }
  stats_.light_packets += delta;
  if (observer_) observer_(key, delta);
}

void LlmSketch::insert(const PacketRecord& pkt) {
  ++stats_.packets;
  const FlowKey key = stored_key(pkt.key);

  if (cfg_.classify_resident) {
    if (auto resident = heavy_.lookup(key)) {
      heavy_.relock(key, classify(pkt));
      heavy_.increment(key);
      ++stats_.case1;
      return;
    }
  } else if (heavy_.increment(key)) {
    ++stats_.case1;
    return;
  }

  if (heavy_.try_insert_empty(key)) {
    ++stats_.case2;
    return;
  }

  ++stats_.case3;
  if (classify(pkt)) {
    ++stats_.case3_large;
    const size_t b = heavy_.bucket_of(key);
    const size_t victim = heavy_.evict_candidate(b);
    const Evicted ev = heavy_.replace(b, victim, key, true);
    ++stats_.evictions;
    light_insert(ev.key, ev.size_hat);
  } else {
    light_insert(key, 1);
  }
}

uint64_t LlmSketch::query_size(const FlowKey& raw) const {
  const FlowKey key = stored_key(raw);
  if (auto hit = heavy_.lookup(key)) return hit->size_hat;
  if (const auto* cms = std::get_if<CountMinSketch>(&light_)) return cms->query(key);
  if (const auto* coco = std::get_if<CocoLight>(&light_)) return coco->query(key);
  return 0;
}

std::vector<HeavyHitter> LlmSketch::query_heavy_hitters(uint64_t threshold) const {
  std::vector<HeavyHitter> out;
  for (const auto& c : heavy_.cells())
    if (c.occupied() && c.size_hat > threshold) out.push_back({c.key, c.size_hat});
  std::sort(out.begin(), out.end(), [](const HeavyHitter& a, const HeavyHitter& b) {
    return a.size != b.size ? a.size > b.size : a.key < b.key;
  });
  return out;
}

uint64_t LlmSketch::hh_threshold() const noexcept {
  return static_cast<uint64_t>(cfg_.hh_threshold_fraction * static_cast<double>(stats_.packets));
}

KeyCountTable LlmSketch::merged_table() const {
  if (mode_ != QueryMode::hhh) throw ConfigError("merged table is only defined in hhh mode");
  std::map<FlowKey, uint64_t> merged;
  for (const auto& c : heavy_.cells())
    if (c.occupied()) merged[c.key] = std::max(merged[c.key], c.size_hat);
  if (const auto* coco = std::get_if<CocoLight>(&light_)) {
    for (const auto& s : coco->slots())
      if (s.key && s.count > 0) merged[*s.key] = std::max(merged[*s.key], s.count);
  }
  return KeyCountTable(merged.begin(), merged.end());
}

std::vector<HhhEntry> LlmSketch::query_hhh(const Hierarchy& hier, uint64_t threshold) const {
  return hhh_from_table(merged_table(), hier, threshold);
}

void LlmSketch::reset() {
  heavy_.clear();
  if (auto* cms = std::get_if<CountMinSketch>(&light_)) cms->clear();
  if (auto* coco = std::get_if<CocoLight>(&light_)) coco->clear();
  stats_ = SketchStats{};
}

size_t LlmSketch::memory_bytes() const noexcept {
  size_t bytes = heavy_.memory_bytes(heavy_cell_bytes(cfg_));
  if (const auto* cms = std::get_if<CountMinSketch>(&light_)) bytes += cms->memory_bytes();
  if (const auto* coco = std::get_if<CocoLight>(&light_))
    bytes += coco->rows() * coco->width() * coco_slot_bytes(cfg_);
  return bytes;
}

}  // namespace llms
