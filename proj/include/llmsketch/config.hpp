#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace llms {

enum class QueryMode { size, hh, hhh };

std::string_view to_string(QueryMode mode);
// Throws ConfigError for anything other than "size", "hh", "hhh".
QueryMode parse_mode(std::string_view s);

// Structural parameters of the two-tier sketch. Defaults follow the tuned
// settings: 8 cells per bucket, 20% of memory to the heavy part, 3 light rows,
// soft label steepness 2.298 around T = 64, heavy hitter threshold 0.01%.
struct SketchConfig {
  size_t w_h = 1;
  size_t d_h = 8;
  size_t w_light = 1;
  size_t d_light = 3;
  unsigned light_counter_bits = 8;
  uint64_t threshold_T = 64;
  double scale_a = 2.298;
  double heavy_ratio = 0.20;
  double hh_threshold_fraction = 0.0001;
  uint64_t seed = 0x5eed;
  unsigned fingerprint_bits = 0;  // 0 = full 5-tuple keys
  bool classify_resident = false;
  size_t coco_rows = 2;           // light part rows in HHH mode

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

// Byte cost of one heavy cell: key + 4-byte size counter. The lock flag
// lives in a spare bit of the size counter.
size_t heavy_cell_bytes(const SketchConfig& cfg);
size_t light_counter_bytes(const SketchConfig& cfg);
// Key + 4-byte count for one CocoSketch slot.
size_t coco_slot_bytes(const SketchConfig& cfg);

struct BudgetSplit {
  size_t heavy_bytes = 0;
  size_t light_bytes = 0;
};

// Splits `total_bytes` by cfg.heavy_ratio and writes the derived w_h and
// w_light back into `cfg`. A heavy ratio of 1.0 (no light part) is allowed
// only in heavy hitter mode, where w_light is set to 0. Throws ConfigError
// when the budget cannot fit one bucket and one light row.
BudgetSplit memory_budget_split(size_t total_bytes, SketchConfig& cfg,
                                QueryMode mode = QueryMode::size);

// Accepts "100000", "100KB", "1.5MB" (KB = 1000 bytes). Throws ConfigError.
size_t parse_memory(std::string_view s);

}  // namespace llms
