#include "llmsketch/count_min.hpp"

#include <algorithm>
#include <limits>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

CountMinSketch::CountMinSketch(size_t depth, size_t width, unsigned counter_bits, uint64_t seed)
    : depth_(depth), width_(width), counter_bits_(counter_bits), seed_(seed) {
  if (depth < 1 || width < 1) throw ConfigError("count-min sketch needs depth >= 1 and width >= 1");
  if (depth > 255) throw ConfigError("count-min sketch depth must be <= 255");
  if (counter_bits != 8 && counter_bits != 16 && counter_bits != 32)
    throw ConfigError("count-min counter width must be 8, 16 or 32 bits");
  max_ = counter_bits == 32 ? std::numeric_limits<uint32_t>::max()
                            : static_cast<uint32_t>((1ULL << counter_bits) - 1);
  row_seeds_.reserve(depth);
  for (size_t i = 0; i < depth; ++i) row_seeds_.push_back(row_seed(seed, i));
  cells_.assign(depth * width, 0);
}

size_t CountMinSketch::index(const FlowKey& key, size_t row) const noexcept {
  return reduce(key.hash(row_seeds_[row]), width_);
}

void CountMinSketch::insert(const FlowKey& key, uint64_t delta) {
  inserted_ += delta;
  for (size_t i = 0; i < depth_; ++i) {
    uint32_t& c = cells_[i * width_ + index(key, i)];
    const uint64_t room = max_ - c;
    if (delta > room) {
      c = max_;
      ++saturations_;
    } else {
      c += static_cast<uint32_t>(delta);
    }
  }
}

uint64_t CountMinSketch::query(const FlowKey& key) const {
  uint32_t best = max_;
  for (size_t i = 0; i < depth_; ++i) best = std::min(best, cells_[i * width_ + index(key, i)]);
  return best;
}

void CountMinSketch::clear() {
  std::fill(cells_.begin(), cells_.end(), 0);
  saturations_ = 0;
  inserted_ = 0;
}

std::vector<uint8_t> CountMinSketch::serialize() const {
  const size_t cb = counter_bits_ / 8;
  std::vector<uint8_t> out;
  out.reserve(8 + cells_.size() * cb);
  out.push_back(static_cast<uint8_t>(kMagic));
  out.push_back(static_cast<uint8_t>(kMagic >> 8));
  out.push_back(static_cast<uint8_t>(depth_));
  out.push_back(static_cast<uint8_t>(counter_bits_));
  const auto w = static_cast<uint32_t>(width_);
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<uint8_t>(w >> s));
  for (uint32_t c : cells_)
    for (size_t b = 0; b < cb; ++b) out.push_back(static_cast<uint8_t>(c >> (8 * b)));
  return out;
}

CountMinSketch CountMinSketch::deserialize(std::span<const uint8_t> data, uint64_t seed) {
  if (data.size() < 8) throw InputError("count-min dump shorter than its 8-byte header");
  const uint16_t magic = static_cast<uint16_t>(data[0] | (data[1] << 8));
  if (magic != kMagic) throw InputError("count-min dump has wrong magic");
  const size_t depth = data[2];
  const unsigned bits = data[3];
  const size_t width = uint32_t{data[4]} | (uint32_t{data[5]} << 8) | (uint32_t{data[6]} << 16) |
                       (uint32_t{data[7]} << 24);
  CountMinSketch sk(depth, width, bits, seed);
  const size_t cb = bits / 8;
  if (data.size() != 8 + depth * width * cb)
    throw InputError("count-min dump size does not match its header");
  for (size_t i = 0; i < sk.cells_.size(); ++i) {
    uint32_t v = 0;
    for (size_t b = 0; b < cb; ++b) v |= uint32_t{data[8 + i * cb + b]} << (8 * b);
    sk.cells_[i] = v;
  }
  return sk;
}

}  // namespace llms
