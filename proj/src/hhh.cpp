#include <algorithm>
#include <map>

#include "llmsketch/coco_light.hpp"
#include "llmsketch/errors.hpp"

namespace llms {

Hierarchy::Hierarchy(std::vector<int> levels) : levels_(std::move(levels)) {
  if (levels_.empty() || levels_.back() != 32)
    throw ConfigError("hierarchy must end at the /32 level");
  for (size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] < 1 || levels_[i] > 32) throw ConfigError("prefix lengths must be in [1, 32]");
    if (i > 0 && levels_[i] <= levels_[i - 1])
      throw ConfigError("prefix lengths must be strictly increasing");
  }
}

uint32_t prefix_of(uint32_t ip, int len) noexcept {
  if (len <= 0) return 0;
  if (len >= 32) return ip;
  return ip & ~((uint32_t{1} << (32 - len)) - 1);
}

std::string prefix_cidr(uint32_t prefix, int len) {
  return ipv4_to_string(prefix) + "/" + std::to_string(len);
}

std::vector<HhhEntry> hhh_from_table(const KeyCountTable& table, const Hierarchy& hier,
                                     uint64_t threshold) {
  const auto& levels = hier.levels();
  std::vector<HhhEntry> out;

  // Residual mass per prefix at the current level: counts not yet claimed by
  // a reported descendant.
  std::map<uint32_t, uint64_t> residual;
  for (const auto& [key, count] : table) residual[key.src_ip()] += count;

  for (size_t li = levels.size(); li-- > 0;) {
    const int len = levels[li];
    std::map<uint32_t, uint64_t> next;
    const int parent_len = li > 0 ? levels[li - 1] : 0;
    for (const auto& [prefix, count] : residual) {
      if (count > threshold) {
        out.push_back(HhhEntry{prefix, len, count});
      } else if (li > 0 && count > 0) {
        next[prefix_of(prefix, parent_len)] += count;
      }
    }
    residual = std::move(next);
  }
  return out;
}

}  // namespace llms
