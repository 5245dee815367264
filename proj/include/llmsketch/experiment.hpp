#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmsketch/classifier.hpp"
#include "llmsketch/coco_light.hpp"
#include "llmsketch/config.hpp"
#include "llmsketch/trace.hpp"

namespace llms {

inline constexpr int kReportSchemaVersion = 1;

enum class BackendKind { oracle, noisy, static_score, file, remote };

BackendKind parse_backend(const std::string& s);
std::string to_string(BackendKind kind);

struct BackendSpec {
  BackendKind kind = BackendKind::oracle;
  double accuracy_A = 1.0;      // noisy
  double static_score = 0.0;    // static
  std::filesystem::path predictions;  // file
  std::string remote;           // remote, host:port
  int remote_timeout_ms = 50;
};

// Which flows the HH-mode ARE averages over.
enum class AreUniverse { true_hh, reported_hh };

struct ExperimentSpec {
  std::optional<std::filesystem::path> trace_path;
  ZipfParams zipf;  // used when no trace path is given
  std::vector<size_t> budgets;
  QueryMode mode = QueryMode::size;
  BackendSpec backend;
  SketchConfig cfg;
  // heavy_ratio to use when the caller did not override it: 1.0 in hh mode
  // (heavy part only), cfg.heavy_ratio otherwise.
  bool heavy_ratio_overridden = false;
  unsigned baseline_counter_bits = 32;
  AreUniverse hh_are_universe = AreUniverse::true_hh;
  Hierarchy hierarchy;
  size_t top_k = 10;

  // Throws ConfigError on inconsistent combinations.
  void validate() const;
};

std::shared_ptr<const Classifier> make_backend(const BackendSpec& spec,
                                               std::shared_ptr<const FlowSizeMap> truth,
                                               const SketchConfig& cfg);

// Replays the trace through the sketch and the Count-Min baseline once per
// budget and returns the report. Budgets run in parallel; the report does not
// depend on thread count. `generated_at` is the only non-deterministic field.
nlohmann::json run_experiment(const ExperimentSpec& spec);

// Same, on an already-loaded packet stream.
nlohmann::json run_experiment(const ExperimentSpec& spec, const std::vector<PacketRecord>& packets,
                              const std::string& source);

// HHH rows of one run as `prefix_cidr,level,count` CSV.
std::string hhh_csv(const nlohmann::json& run);

}  // namespace llms
