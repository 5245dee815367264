#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "llmsketch/flow_key.hpp"

namespace llms {

using Rng = std::mt19937_64;

// One heavy-part slot. size_hat == 0 marks an empty cell.
struct HeavyCell {
  FlowKey key;
  uint64_t size_hat = 0;
  bool lock = false;

  bool occupied() const noexcept { return size_hat != 0; }
};

struct HeavyEntry {
  uint64_t size_hat;
  bool lock;
};

struct Evicted {
  FlowKey key;
  uint64_t size_hat;
};

// Lock flag update: the new flag is 1 with probability
// (lock * n_hat + y_hat) / (n_hat + 1), where n_hat is the recorded size
// before the current packet is counted. The draw is an exact integer draw.
bool lock_update(bool lock, uint64_t n_hat, bool y_hat, Rng& rng);
HeavyCell lock_update(HeavyCell cell, bool y_hat, Rng& rng);

// w_h buckets of d_h cells; a key lives only in bucket h(key).
class HeavyTable {
 public:
  HeavyTable(size_t buckets, size_t cells_per_bucket, uint64_t seed);

  size_t buckets() const noexcept { return w_; }
  size_t cells_per_bucket() const noexcept { return d_; }
  size_t bucket_of(const FlowKey& key) const noexcept;

  std::optional<HeavyEntry> lookup(const FlowKey& key) const;
  // Case 1: bumps size_hat if present.
  bool increment(const FlowKey& key);
  // Case 2: writes (key, 1, lock 0) into an empty cell of the key's bucket.
  // Precondition: key not already present.
  bool try_insert_empty(const FlowKey& key);
  // Precondition: bucket full. Smallest unlocked cell, else smallest overall;
  // ties go to the lowest index.
  size_t evict_candidate(size_t bucket) const;
  // Case 3 large: replaces the cell with (new_key, 1) and sets the new lock
  // via lock_update at n_hat = 0. Returns the evicted flow.
  Evicted replace(size_t bucket, size_t cell, const FlowKey& new_key, bool y_hat);
  // Applies lock_update to a resident flow at its current size.
  void relock(const FlowKey& key, bool y_hat);

  bool bucket_full(size_t bucket) const;
  std::span<const HeavyCell> bucket(size_t b) const noexcept {
    return {cells_.data() + b * d_, d_};
  }
  std::span<const HeavyCell> cells() const noexcept { return cells_; }
  HeavyCell& cell_at(size_t bucket, size_t cell) { return cells_[bucket * d_ + cell]; }

  uint64_t total_size() const noexcept;
  size_t occupied() const noexcept;
  size_t memory_bytes(size_t cell_bytes) const noexcept { return w_ * d_ * cell_bytes; }

  // Empties every cell and reseeds the rng from the original seed.
  void clear();

  // Per-bucket listing "bucket <i>: <hex> <size> <lock> ..." in cell order.
  void dump(std::ostream& os) const;

  // True when no key occupies two cells and every key sits in its own bucket.
  bool check_invariants() const;

  Rng& rng() noexcept { return rng_; }

 private:
  HeavyCell* find(size_t bucket, const FlowKey& key);
  const HeavyCell* find(size_t bucket, const FlowKey& key) const;

  size_t w_;
  size_t d_;
  uint64_t seed_;
  uint64_t hash_seed_;
  Rng rng_;
  std::vector<HeavyCell> cells_;
};

}  // namespace llms
