#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "llmsketch/flow_key.hpp"

namespace llms {

// d x w Count-Min sketch with saturating counters of 8, 16 or 32 bits.
// Counters are held in 32-bit cells and clamped at 2^bits - 1; memory
// accounting uses the nominal width.
//
// Single writer. Readers may run concurrently only once the writer has
// stopped; the object can be moved between threads.
class CountMinSketch {
 public:
  CountMinSketch(size_t depth, size_t width, unsigned counter_bits, uint64_t seed);

  void insert(const FlowKey& key, uint64_t delta = 1);
  uint64_t query(const FlowKey& key) const;

  size_t depth() const noexcept { return depth_; }
  size_t width() const noexcept { return width_; }
  unsigned counter_bits() const noexcept { return counter_bits_; }
  uint64_t seed() const noexcept { return seed_; }
  uint32_t counter_max() const noexcept { return max_; }
  size_t memory_bytes() const noexcept { return depth_ * width_ * (counter_bits_ / 8); }

  // Index of `key` in row `row`.
  size_t index(const FlowKey& key, size_t row) const noexcept;
  uint32_t counter(size_t row, size_t col) const noexcept { return cells_[row * width_ + col]; }
  std::span<const uint32_t> counters() const noexcept { return cells_; }

  // Number of per-row updates that hit the saturation clamp.
  uint64_t saturation_events() const noexcept { return saturations_; }
  // Sum of all inserted deltas.
  uint64_t total_inserted() const noexcept { return inserted_; }

  void clear();

  // Little-endian dump: u16 magic 'CM', u8 depth, u8 counter_bits, u32 width,
  // then depth*width counters row-major, counter_bits/8 bytes each.
  std::vector<uint8_t> serialize() const;
  // Counters only; statistics and seed are not part of the dump. Throws
  // InputError on a malformed buffer.
  static CountMinSketch deserialize(std::span<const uint8_t> data, uint64_t seed);

  static constexpr uint16_t kMagic = 0x4d43;

 private:
  size_t depth_;
  size_t width_;
  unsigned counter_bits_;
  uint32_t max_;
  uint64_t seed_;
  std::vector<uint64_t> row_seeds_;
  std::vector<uint32_t> cells_;
  uint64_t saturations_ = 0;
  uint64_t inserted_ = 0;
};

}  // namespace llms
