#include "llmsketch/heavy_part.hpp"

#include <cassert>
#include <ostream>
#include <set>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

bool lock_update(bool lock, uint64_t n_hat, bool y_hat, Rng& rng) {
  const uint64_t numerator = (lock ? n_hat : 0) + (y_hat ? 1 : 0);
  if (numerator == 0) return false;
  if (numerator > n_hat) return true;
  std::uniform_int_distribution<uint64_t> draw(0, n_hat);
  return draw(rng) < numerator;
}

HeavyCell lock_update(HeavyCell cell, bool y_hat, Rng& rng) {
  cell.lock = lock_update(cell.lock, cell.size_hat, y_hat, rng);
  return cell;
}

HeavyTable::HeavyTable(size_t buckets, size_t cells_per_bucket, uint64_t seed)
    : w_(buckets),
      d_(cells_per_bucket),
      seed_(seed),
      hash_seed_(mix64(seed ^ 0x68656176ULL)),
      rng_(mix64(seed ^ 0x6c6f636bULL)) {
  if (buckets < 1 || cells_per_bucket < 1)
    throw ConfigError("heavy part needs at least one bucket of one cell");
  cells_.resize(w_ * d_);
}

size_t HeavyTable::bucket_of(const FlowKey& key) const noexcept {
  return reduce(key.hash(hash_seed_), w_);
}

HeavyCell* HeavyTable::find(size_t bucket, const FlowKey& key) {
  for (size_t i = 0; i < d_; ++i) {
    HeavyCell& c = cells_[bucket * d_ + i];
    if (c.occupied() && c.key == key) return &c;
  }
  return nullptr;
}

const HeavyCell* HeavyTable::find(size_t bucket, const FlowKey& key) const {
  return const_cast<HeavyTable*>(this)->find(bucket, key);
}

std::optional<HeavyEntry> HeavyTable::lookup(const FlowKey& key) const {
  if (const HeavyCell* c = find(bucket_of(key), key)) return HeavyEntry{c->size_hat, c->lock};
  return std::nullopt;
}

bool HeavyTable::increment(const FlowKey& key) {
  if (HeavyCell* c = find(bucket_of(key), key)) {
    ++c->size_hat;
    return true;
  }
  return false;
}

bool HeavyTable::try_insert_empty(const FlowKey& key) {
  const size_t b = bucket_of(key);
  assert(find(b, key) == nullptr);
  for (size_t i = 0; i < d_; ++i) {
    HeavyCell& c = cells_[b * d_ + i];
    if (!c.occupied()) {
      c = HeavyCell{key, 1, false};
      return true;
    }
  }
  return false;
}

bool HeavyTable::bucket_full(size_t bucket) const {
  for (size_t i = 0; i < d_; ++i)
    if (!cells_[bucket * d_ + i].occupied()) return false;
  return true;
}

size_t HeavyTable::evict_candidate(size_t bucket) const {
  const HeavyCell* base = cells_.data() + bucket * d_;
  size_t best_unlocked = d_;
  size_t best_any = 0;
  for (size_t i = 0; i < d_; ++i) {
    if (base[i].size_hat < base[best_any].size_hat) best_any = i;
    if (!base[i].lock &&
        (best_unlocked == d_ || base[i].size_hat < base[best_unlocked].size_hat))
      best_unlocked = i;
  }
  return best_unlocked != d_ ? best_unlocked : best_any;
}

Evicted HeavyTable::replace(size_t bucket, size_t cell, const FlowKey& new_key, bool y_hat) {
  HeavyCell& c = cells_[bucket * d_ + cell];
  assert(c.occupied());
  Evicted out{c.key, c.size_hat};
  const bool lock = lock_update(false, 0, y_hat, rng_);
  c = HeavyCell{new_key, 1, lock};
  assert(check_invariants());
  return out;
}

void HeavyTable::relock(const FlowKey& key, bool y_hat) {
  if (HeavyCell* c = find(bucket_of(key), key)) *c = lock_update(*c, y_hat, rng_);
}

uint64_t HeavyTable::total_size() const noexcept {
  uint64_t sum = 0;
  for (const auto& c : cells_) sum += c.size_hat;
  return sum;
}

size_t HeavyTable::occupied() const noexcept {
  size_t n = 0;
  for (const auto& c : cells_) n += c.occupied() ? 1 : 0;
  return n;
}

void HeavyTable::clear() {
  std::fill(cells_.begin(), cells_.end(), HeavyCell{});
  rng_.seed(mix64(seed_ ^ 0x6c6f636bULL));
}

void HeavyTable::dump(std::ostream& os) const {
  for (size_t b = 0; b < w_; ++b) {
    os << "bucket " << b << ':';
    for (const auto& c : bucket(b)) {
      if (c.occupied())
        os << ' ' << c.key.hex() << ' ' << c.size_hat << ' ' << (c.lock ? 1 : 0);
      else
        os << " -";
    }
    os << '\n';
  }
}

bool HeavyTable::check_invariants() const {
  std::set<FlowKey> seen;
  for (size_t b = 0; b < w_; ++b) {
    for (const auto& c : bucket(b)) {
      if (!c.occupied()) continue;
      if (bucket_of(c.key) != b) return false;
      if (!seen.insert(c.key).second) return false;
    }
  }
  return true;
}

}  // namespace llms
