#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "llmsketch/flow_key.hpp"

namespace llms {

// Classifier output in [0, 1].
class ClassifierScore {
 public:
  ClassifierScore() = default;
  // Throws ConfigError outside [0, 1] or for NaN.
  explicit ClassifierScore(double v);
  double value() const noexcept { return v_; }

 private:
  double v_ = 0.0;
};

// sigma(a * (log2 n - log2 T)).
double soft_label(double n, double T, double a);

// 1 iff score >= 0.5.
bool binarize(ClassifierScore score);

struct Tokens {
  std::vector<uint16_t> ids;
  // Set when the header was too short (or not IPv4) to strip addresses; the
  // raw bytes were tokenized unmodified.
  bool flagged = false;
};

// Drops the IPv4 source/destination address fields (bytes 12..19) and splits
// the rest into big-endian 16-bit tokens, zero-padding an odd tail.
Tokens tokenize_header(std::span<const uint8_t> header);

using FlowSizeMap = std::unordered_map<FlowKey, uint64_t, FlowKeyHash>;

// Backends are immutable once constructed; classify() may be called from
// several threads at once.
class Classifier {
 public:
  virtual ~Classifier() = default;
  // Throws ClassifierError when no score can be produced.
  virtual ClassifierScore classify(const PacketRecord& pkt) const = 0;
  virtual std::string name() const = 0;
};

// Scores flows by their exact final size.
class OracleBackend : public Classifier {
 public:
  OracleBackend(std::shared_ptr<const FlowSizeMap> truth, uint64_t threshold_T, double scale_a);
  ClassifierScore classify(const PacketRecord& pkt) const override;
  std::string name() const override { return "oracle"; }
  uint64_t final_size(const FlowKey& key) const;
  uint64_t threshold() const noexcept { return T_; }

 private:
  std::shared_ptr<const FlowSizeMap> truth_;
  uint64_t T_;
  double a_;
};

// Oracle with a controllable accuracy. Each flow independently gets its
// binary decision flipped with a probability fixed per flow: 1 - A for true
// large flows (size >= T), `small_flip` for small flows. The per-flow draw is
// a hash of (key, seed), so decisions are consistent across a flow's packets.
class NoisyOracle : public Classifier {
 public:
  NoisyOracle(std::shared_ptr<const OracleBackend> oracle, double accuracy_A, uint64_t seed,
              double small_flip = 0.0);
  ClassifierScore classify(const PacketRecord& pkt) const override;
  std::string name() const override { return "noisy-oracle"; }
  // Whether the oracle's decision for `key` is flipped.
  bool flipped(const FlowKey& key) const;

 private:
  std::shared_ptr<const OracleBackend> oracle_;
  double A_;
  uint64_t seed_;
  double small_flip_;
};

class StaticBackend : public Classifier {
 public:
  explicit StaticBackend(double score) : score_(score) {}
  ClassifierScore classify(const PacketRecord&) const override { return score_; }
  std::string name() const override { return "static"; }

 private:
  ClassifierScore score_;
};

// Per-flow scores from a `flow_key_hex,score` CSV; unknown keys get the
// default score.
class PredictionFileBackend : public Classifier {
 public:
  explicit PredictionFileBackend(std::unordered_map<FlowKey, double, FlowKeyHash> scores,
                                 double default_score = 0.0);
  // Throws InputError on unreadable or malformed files.
  static PredictionFileBackend load(const std::filesystem::path& path, double default_score = 0.0);
  ClassifierScore classify(const PacketRecord& pkt) const override;
  std::string name() const override { return "file"; }
  size_t size() const noexcept { return scores_.size(); }

 private:
  std::unordered_map<FlowKey, double, FlowKeyHash> scores_;
  double default_score_;
};

// Newline-delimited request/response over TCP: the request line is the hex
// header, the response line is a decimal score (or "ERR"). One connection,
// serialized by a mutex; reconnects after a failure.
class RemoteBackend : public Classifier {
 public:
  // `address` is "host:port". The connection is opened lazily.
  explicit RemoteBackend(std::string address, int timeout_ms = 50);
  ~RemoteBackend() override;
  RemoteBackend(const RemoteBackend&) = delete;
  RemoteBackend& operator=(const RemoteBackend&) = delete;

  ClassifierScore classify(const PacketRecord& pkt) const override;
  std::string name() const override { return "remote"; }
  const std::string& address() const noexcept { return address_; }

 private:
  void connect_locked() const;
  void close_locked() const;
  std::string roundtrip_locked(const std::string& line) const;

  std::string address_;
  int timeout_ms_;
  mutable std::mutex mu_;
  mutable int fd_ = -1;
  mutable std::string pending_;
};

}  // namespace llms
