#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "llmsketch/flow_key.hpp"

namespace llms {

// Unbiased key-value light part (CocoSketch style): d rows of w slots. An
// insert adds delta to the key's slot in every row and then takes the slot
// over with probability delta / new_count.
class CocoLight {
 public:
  struct Slot {
    std::optional<FlowKey> key;
    uint64_t count = 0;
  };

  CocoLight(size_t rows, size_t width, uint64_t seed);

  void insert(const FlowKey& key, uint64_t delta = 1);
  // Max count over rows whose slot holds `key`; 0 if none does.
  uint64_t query(const FlowKey& key) const;

  size_t rows() const noexcept { return rows_; }
  size_t width() const noexcept { return width_; }
  size_t index(const FlowKey& key, size_t row) const noexcept;
  const Slot& slot(size_t row, size_t col) const noexcept { return slots_[row * width_ + col]; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }

  // Sum of counts in one row.
  uint64_t row_total(size_t row) const noexcept;
  uint64_t total_inserted() const noexcept { return inserted_; }

  void clear();

 private:
  size_t rows_;
  size_t width_;
  uint64_t seed_;
  std::vector<uint64_t> row_seeds_;
  std::vector<Slot> slots_;
  std::mt19937_64 rng_;
  uint64_t inserted_ = 0;
};

// Source-IP prefix levels, e.g. /8 /16 /24 /32.
class Hierarchy {
 public:
  Hierarchy() : levels_{8, 16, 24, 32} {}
  // Throws ConfigError unless strictly increasing within [1, 32] and ending at 32.
  explicit Hierarchy(std::vector<int> levels);
  const std::vector<int>& levels() const noexcept { return levels_; }

 private:
  std::vector<int> levels_;
};

uint32_t prefix_of(uint32_t ip, int len) noexcept;
// "10.1.0.0/16"
std::string prefix_cidr(uint32_t prefix, int len);

struct HhhEntry {
  uint32_t prefix;
  int level;
  uint64_t count;  // conditioned count

  friend bool operator==(const HhhEntry&, const HhhEntry&) = default;
};

using KeyCountTable = std::vector<std::pair<FlowKey, uint64_t>>;

// Discounted one-dimensional HHH over a key->count table: walking levels from
// the longest prefix up, a prefix is reported when its count minus the counts
// of its reported descendants exceeds `threshold` (strictly). Output is
// ordered by level (longest first), then prefix.
std::vector<HhhEntry> hhh_from_table(const KeyCountTable& table, const Hierarchy& hier,
                                     uint64_t threshold);

}  // namespace llms
