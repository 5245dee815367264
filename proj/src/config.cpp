#include "llmsketch/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "llmsketch/errors.hpp"
#include "llmsketch/flow_key.hpp"

namespace llms {

std::string_view to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::size: return "size";
    case QueryMode::hh: return "hh";
    case QueryMode::hhh: return "hhh";
  }
  return "?";
}

QueryMode parse_mode(std::string_view s) {
  if (s == "size") return QueryMode::size;
  if (s == "hh") return QueryMode::hh;
  if (s == "hhh") return QueryMode::hhh;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected size, hh or hhh)");
}

void SketchConfig::validate() const {
  if (w_h < 1 || d_h < 1) throw ConfigError("heavy part needs w_h >= 1 and d_h >= 1");
  if (d_light < 1) throw ConfigError("light part needs d_light >= 1");
  if (light_counter_bits != 8 && light_counter_bits != 16 && light_counter_bits != 32)
    throw ConfigError("light counter width must be 8, 16 or 32 bits");
  if (threshold_T < 1) throw ConfigError("threshold_T must be >= 1");
  if (!(scale_a > 0)) throw ConfigError("scale_a must be positive");
  if (!(heavy_ratio > 0 && heavy_ratio <= 1)) throw ConfigError("heavy_ratio must be in (0, 1]");
  if (!(hh_threshold_fraction >= 0 && hh_threshold_fraction <= 1))
    throw ConfigError("hh_threshold_fraction must be in [0, 1]");
  if (fingerprint_bits != 0 && fingerprint_bits != 16 && fingerprint_bits != 32)
    throw ConfigError("fingerprint_bits must be 0, 16 or 32");
  if (coco_rows < 1) throw ConfigError("coco_rows must be >= 1");
}

size_t heavy_cell_bytes(const SketchConfig& cfg) {
  const size_t key = cfg.fingerprint_bits == 0 ? FlowKey::kTupleBytes : cfg.fingerprint_bits / 8;
  return key + 4;
}

size_t light_counter_bytes(const SketchConfig& cfg) { return cfg.light_counter_bits / 8; }

size_t coco_slot_bytes(const SketchConfig& cfg) { return heavy_cell_bytes(cfg); }

BudgetSplit memory_budget_split(size_t total_bytes, SketchConfig& cfg, QueryMode mode) {
  if (!(cfg.heavy_ratio > 0 && cfg.heavy_ratio <= 1))
    throw ConfigError("heavy_ratio must be in (0, 1]");
  BudgetSplit split;
  split.heavy_bytes =
      static_cast<size_t>(std::llround(cfg.heavy_ratio * static_cast<double>(total_bytes)));
  if (split.heavy_bytes > total_bytes) split.heavy_bytes = total_bytes;
  split.light_bytes = total_bytes - split.heavy_bytes;

  const size_t bucket_bytes = cfg.d_h * heavy_cell_bytes(cfg);
  const size_t w_h = split.heavy_bytes / bucket_bytes;
  if (w_h < 1)
    throw ConfigError("memory budget of " + std::to_string(total_bytes) +
                      " bytes cannot hold one heavy bucket (" + std::to_string(bucket_bytes) +
                      " bytes)");

  size_t w_light = 0;
  if (split.light_bytes == 0) {
    if (mode != QueryMode::hh)
      throw ConfigError("a heavy-only sketch (heavy_ratio = 1) is supported in hh mode only");
  } else {
    const size_t row_cost = mode == QueryMode::hhh ? cfg.coco_rows * coco_slot_bytes(cfg)
                                                   : cfg.d_light * light_counter_bytes(cfg);
    w_light = split.light_bytes / row_cost;
    if (w_light < 1)
      throw ConfigError("memory budget of " + std::to_string(total_bytes) +
                        " bytes leaves no room for one light counter per row");
  }
  cfg.w_h = w_h;
  cfg.w_light = w_light;
  return split;
}

size_t parse_memory(std::string_view s) {
  double value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || p == s.data() || value <= 0)
    throw ConfigError("invalid memory size '" + std::string(s) + "'");
  std::string unit(p, s.data() + s.size());
  for (auto& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  double mult = 1;
  if (unit.empty() || unit == "B") mult = 1;
  else if (unit == "KB" || unit == "K") mult = 1e3;
  else if (unit == "MB" || unit == "M") mult = 1e6;
  else throw ConfigError("invalid memory unit in '" + std::string(s) + "'");
  return static_cast<size_t>(std::llround(value * mult));
}

}  // namespace llms
