#include "llmsketch/coco_light.hpp"

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

CocoLight::CocoLight(size_t rows, size_t width, uint64_t seed)
    : rows_(rows), width_(width), seed_(seed), rng_(mix64(seed ^ 0x636f636fULL)) {
  if (rows < 1 || width < 1) throw ConfigError("coco light part needs rows >= 1 and width >= 1");
  for (size_t i = 0; i < rows; ++i) row_seeds_.push_back(row_seed(seed, i));
  slots_.resize(rows * width);
}

size_t CocoLight::index(const FlowKey& key, size_t row) const noexcept {
  return reduce(key.hash(row_seeds_[row]), width_);
}

void CocoLight::insert(const FlowKey& key, uint64_t delta) {
  if (delta == 0) return;
  inserted_ += delta;
  for (size_t i = 0; i < rows_; ++i) {
    Slot& s = slots_[i * width_ + index(key, i)];
    if (!s.key) s.count = 0;
    s.count += delta;
    if (s.key == key) continue;
    std::uniform_int_distribution<uint64_t> draw(0, s.count - 1);
    if (draw(rng_) < delta) s.key = key;
  }
}

uint64_t CocoLight::query(const FlowKey& key) const {
  uint64_t best = 0;
  for (size_t i = 0; i < rows_; ++i) {
    const Slot& s = slots_[i * width_ + index(key, i)];
    if (s.key == key && s.count > best) best = s.count;
  }
  return best;
}

uint64_t CocoLight::row_total(size_t row) const noexcept {
  uint64_t sum = 0;
  for (size_t j = 0; j < width_; ++j) {
    const Slot& s = slots_[row * width_ + j];
    if (s.key) sum += s.count;
  }
  return sum;
}

void CocoLight::clear() {
  std::fill(slots_.begin(), slots_.end(), Slot{});
  rng_.seed(mix64(seed_ ^ 0x636f636fULL));
  inserted_ = 0;
}

}  // namespace llms
