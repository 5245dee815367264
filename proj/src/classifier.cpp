#include "llmsketch/classifier.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"

namespace llms {

ClassifierScore::ClassifierScore(double v) : v_(v) {
  if (!(v >= 0.0 && v <= 1.0))
    throw ConfigError("classifier score must lie in [0, 1], got " + std::to_string(v));
}

double soft_label(double n, double T, double a) {
  const double x = a * (std::log2(n) - std::log2(T));
  return 1.0 / (1.0 + std::exp(-x));
}

bool binarize(ClassifierScore score) { return score.value() >= 0.5; }

Tokens tokenize_header(std::span<const uint8_t> header) {
  constexpr size_t kIpv4Min = 20;
  constexpr size_t kSrcOffset = 12;
  constexpr size_t kAddrBytes = 8;

  Tokens out;
  std::vector<uint8_t> kept;
  if (header.size() < kIpv4Min || (header[0] >> 4) != 4) {
    out.flagged = true;
    kept.assign(header.begin(), header.end());
  } else {
    kept.reserve(header.size() - kAddrBytes);
    kept.insert(kept.end(), header.begin(), header.begin() + kSrcOffset);
    kept.insert(kept.end(), header.begin() + kSrcOffset + kAddrBytes, header.end());
  }
  pad_header(kept);
  out.ids.reserve(kept.size() / 2);
  for (size_t i = 0; i < kept.size(); i += 2)
    out.ids.push_back(static_cast<uint16_t>((kept[i] << 8) | kept[i + 1]));
  return out;
}

OracleBackend::OracleBackend(std::shared_ptr<const FlowSizeMap> truth, uint64_t threshold_T,
                             double scale_a)
    : truth_(std::move(truth)), T_(threshold_T), a_(scale_a) {
  if (!truth_) throw ConfigError("oracle backend needs a truth map");
}

uint64_t OracleBackend::final_size(const FlowKey& key) const {
  auto it = truth_->find(key);
  return it == truth_->end() ? 0 : it->second;
}

ClassifierScore OracleBackend::classify(const PacketRecord& pkt) const {
  const uint64_t n = final_size(pkt.key);
  if (n == 0) return ClassifierScore(0.0);
  return ClassifierScore(soft_label(static_cast<double>(n), static_cast<double>(T_), a_));
}

NoisyOracle::NoisyOracle(std::shared_ptr<const OracleBackend> oracle, double accuracy_A,
                         uint64_t seed, double small_flip)
    : oracle_(std::move(oracle)), A_(accuracy_A), seed_(seed), small_flip_(small_flip) {
  if (!oracle_) throw ConfigError("noisy oracle needs an oracle");
  if (!(A_ >= 0 && A_ <= 1)) throw ConfigError("accuracy A must lie in [0, 1]");
  if (!(small_flip_ >= 0 && small_flip_ <= 1))
    throw ConfigError("small-flow flip rate must lie in [0, 1]");
}

bool NoisyOracle::flipped(const FlowKey& key) const {
  const double u = static_cast<double>(key.hash(seed_) >> 11) * 0x1.0p-53;
  const bool large = oracle_->final_size(key) >= oracle_->threshold();
  return large ? u >= A_ : u < small_flip_;
}

ClassifierScore NoisyOracle::classify(const PacketRecord& pkt) const {
  const ClassifierScore base = oracle_->classify(pkt);
  if (!flipped(pkt.key)) return base;
  const double inverted = 1.0 - base.value();
  if ((inverted >= 0.5) == binarize(base)) return ClassifierScore(0.0);
  return ClassifierScore(inverted);
}

PredictionFileBackend::PredictionFileBackend(
    std::unordered_map<FlowKey, double, FlowKeyHash> scores, double default_score)
    : scores_(std::move(scores)), default_score_(ClassifierScore(default_score).value()) {}

PredictionFileBackend PredictionFileBackend::load(const std::filesystem::path& path,
                                                  double default_score) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prediction file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "flow_key_hex,score")
    throw InputError(path.string() + ": header must be 'flow_key_hex,score'");
  std::unordered_map<FlowKey, double, FlowKeyHash> scores;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError(path.string() + ": row " + std::to_string(row) + ": expected 2 columns");
    double score = 0;
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto [p, ec] = std::from_chars(first, last, score);
    if (ec != std::errc{} || p != last || !(score >= 0 && score <= 1))
      throw InputError(path.string() + ": row " + std::to_string(row) +
                       ": score must be a number in [0, 1]");
    try {
      scores[FlowKey::from_hex(std::string_view(line).substr(0, comma))] = score;
    } catch (const InputError& e) {
      throw InputError(path.string() + ": row " + std::to_string(row) + ": " + e.what());
    }
  }
  return PredictionFileBackend(std::move(scores), default_score);
}

ClassifierScore PredictionFileBackend::classify(const PacketRecord& pkt) const {
  auto it = scores_.find(pkt.key);
  return ClassifierScore(it == scores_.end() ? default_score_ : it->second);
}

}  // namespace llms
