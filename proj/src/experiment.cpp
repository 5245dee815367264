#include "llmsketch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <map>
#include <set>
#include <sstream>

#include "llmsketch/analysis.hpp"
#include "llmsketch/count_min.hpp"
#include "llmsketch/errors.hpp"
#include "llmsketch/hash.hpp"
#include "llmsketch/llm_sketch.hpp"

namespace llms {

using nlohmann::json;

BackendKind parse_backend(const std::string& s) {
  if (s == "oracle") return BackendKind::oracle;
  if (s == "noisy") return BackendKind::noisy;
  if (s == "static") return BackendKind::static_score;
  if (s == "file") return BackendKind::file;
  if (s == "remote") return BackendKind::remote;
  throw ConfigError("unknown backend '" + s + "' (oracle, noisy, static, file, remote)");
}

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::oracle: return "oracle";
    case BackendKind::noisy: return "noisy";
    case BackendKind::static_score: return "static";
    case BackendKind::file: return "file";
    case BackendKind::remote: return "remote";
  }
  return "?";
}

void ExperimentSpec::validate() const {
  if (budgets.empty()) throw ConfigError("at least one memory budget is required");
  if (!trace_path) zipf.validate();
  cfg.validate();
  if (baseline_counter_bits != 8 && baseline_counter_bits != 16 && baseline_counter_bits != 32)
    throw ConfigError("baseline counter width must be 8, 16 or 32 bits");
  if (mode == QueryMode::hhh && cfg.fingerprint_bits != 0)
    throw ConfigError("hhh mode needs full flow keys; fingerprints are not supported");
  switch (backend.kind) {
    case BackendKind::noisy:
      if (!(backend.accuracy_A >= 0 && backend.accuracy_A <= 1))
        throw ConfigError("--accuracy-A must lie in [0, 1]");
      break;
    case BackendKind::static_score:
      if (!(backend.static_score >= 0 && backend.static_score <= 1))
        throw ConfigError("static score must lie in [0, 1]");
      break;
    case BackendKind::file:
      if (backend.predictions.empty()) throw ConfigError("file backend needs --predictions");
      break;
    case BackendKind::remote:
      if (backend.remote.empty()) throw ConfigError("remote backend needs --remote host:port");
      break;
    case BackendKind::oracle: break;
  }
}

std::shared_ptr<const Classifier> make_backend(const BackendSpec& spec,
                                               std::shared_ptr<const FlowSizeMap> truth,
                                               const SketchConfig& cfg) {
  switch (spec.kind) {
    case BackendKind::oracle:
      return std::make_shared<OracleBackend>(std::move(truth), cfg.threshold_T, cfg.scale_a);
    case BackendKind::noisy: {
      auto oracle = std::make_shared<const OracleBackend>(std::move(truth), cfg.threshold_T,
                                                          cfg.scale_a);
      return std::make_shared<NoisyOracle>(oracle, spec.accuracy_A, mix64(cfg.seed ^ 0xa11));
    }
    case BackendKind::static_score: return std::make_shared<StaticBackend>(spec.static_score);
    case BackendKind::file:
      return std::make_shared<PredictionFileBackend>(PredictionFileBackend::load(spec.predictions));
    case BackendKind::remote:
      return std::make_shared<RemoteBackend>(spec.remote, spec.remote_timeout_ms);
  }
  throw ConfigError("unknown backend");
}

namespace {

json metrics_json(const MetricReport& m) {
  return json{{"are", m.are},
              {"aae", m.aae},
              {"f1", m.f1},
              {"precision", m.precision},
              {"recall", m.recall},
              {"universe", m.universe}};
}

json config_json(const SketchConfig& c) {
  return json{{"w_h", c.w_h},
              {"d_h", c.d_h},
              {"w_light", c.w_light},
              {"d_light", c.d_light},
              {"light_counter_bits", c.light_counter_bits},
              {"threshold_T", c.threshold_T},
              {"scale_a", c.scale_a},
              {"heavy_ratio", c.heavy_ratio},
              {"hh_threshold_fraction", c.hh_threshold_fraction},
              {"seed", c.seed},
              {"fingerprint_bits", c.fingerprint_bits},
              {"classify_resident", c.classify_resident},
              {"coco_rows", c.coco_rows}};
}

json stats_json(const SketchStats& s) {
  return json{{"packets", s.packets},
              {"case1", s.case1},
              {"case2", s.case2},
              {"case3", s.case3},
              {"case3_large", s.case3_large},
              {"evictions", s.evictions},
              {"classifier_errors", s.classifier_errors},
              {"light_packets", s.light_packets},
              {"dropped", s.dropped}};
}

json hhh_json(const std::vector<HhhEntry>& rows) {
  json out = json::array();
  for (const auto& e : rows)
    out.push_back(json{{"prefix", prefix_cidr(e.prefix, e.level)}, {"level", e.level},
                       {"count", e.count}});
  return out;
}

// Sum of table counts under each (prefix, level) in `nodes`.
std::map<std::pair<uint32_t, int>, uint64_t> prefix_totals(
    const KeyCountTable& table, const std::vector<HhhEntry>& nodes) {
  std::map<std::pair<uint32_t, int>, uint64_t> totals;
  for (const auto& e : nodes) totals[{e.prefix, e.level}] = 0;
  std::set<int> levels;
  for (const auto& e : nodes) levels.insert(e.level);
  for (const auto& [key, count] : table) {
    for (int len : levels) {
      auto it = totals.find({prefix_of(key.src_ip(), len), len});
      if (it != totals.end()) it->second += count;
    }
  }
  return totals;
}

// F1 over HHH node sets; ARE/AAE of prefix totals over the true nodes.
MetricReport hhh_metrics(const KeyCountTable& truth_table, const std::vector<HhhEntry>& truth,
                         const KeyCountTable& est_table, const std::vector<HhhEntry>& reported) {
  MetricReport m;
  std::set<std::pair<uint32_t, int>> want, got;
  for (const auto& e : truth) want.insert({e.prefix, e.level});
  for (const auto& e : reported) got.insert({e.prefix, e.level});
  size_t tp = 0;
  for (const auto& n : got) tp += want.count(n);
  m.precision = got.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(got.size());
  m.recall = want.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(want.size());
  m.f1 = f1_score(m.precision, m.recall);
  m.universe = truth.size();
  if (truth.empty()) return m;
  const auto t = prefix_totals(truth_table, truth);
  const auto e = prefix_totals(est_table, truth);
  double rel = 0, abs = 0;
  for (const auto& [node, n] : t) {
    const double err = std::fabs(static_cast<double>(n) - static_cast<double>(e.at(node)));
    abs += err;
    rel += n ? err / static_cast<double>(n) : 0.0;
  }
  m.are = rel / static_cast<double>(t.size());
  m.aae = abs / static_cast<double>(t.size());
  return m;
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Shared {
  const ExperimentSpec& spec;
  const std::vector<PacketRecord>& packets;
  std::shared_ptr<const FlowSizeMap> truth;
  std::shared_ptr<const Classifier> backend;
  SketchConfig cfg;
  uint64_t hh_threshold;
  std::vector<FlowKey> true_hh;  // full keys, sorted
  KeyCountTable truth_table;     // hhh mode
  std::vector<HhhEntry> true_hhh;
};

json run_budget(const Shared& sh, size_t budget) {
  const ExperimentSpec& spec = sh.spec;
  SketchConfig cfg = sh.cfg;
  const BudgetSplit split = memory_budget_split(budget, cfg, spec.mode);
  LlmSketch sketch(cfg, spec.mode, sh.backend);
  for (const auto& p : sh.packets) sketch.insert(p);

  json run;
  run["memory_bytes"] = budget;
  run["heavy_bytes"] = split.heavy_bytes;
  run["light_bytes"] = split.light_bytes;
  run["config"] = config_json(cfg);
  run["stats"] = stats_json(sketch.stats());

  const auto hh = sketch.query_heavy_hitters(sh.hh_threshold);
  std::vector<FlowKey> reported;
  for (const auto& h : hh) reported.push_back(h.key);

  // Heavy hitter sets compared in stored-key space (fingerprints when enabled).
  FlowSizeMap stored_truth;
  for (const auto& [k, n] : *sh.truth) stored_truth[sketch.stored_key(k)] += n;
  std::vector<FlowKey> expected;
  for (const auto& [k, n] : stored_truth)
    if (n > sh.hh_threshold) expected.push_back(k);

  const auto query = [&](const FlowKey& k) { return sketch.query_size(k); };
  MetricReport m;
  switch (spec.mode) {
    case QueryMode::size: {
      m = compute_metrics_with(*sh.truth, query, expected, reported);
      break;
    }
    case QueryMode::hh: {
      FlowSizeMap universe;
      FlowSizeMap est;
      if (spec.hh_are_universe == AreUniverse::true_hh) {
        for (const auto& k : sh.true_hh) {
          universe[k] = sh.truth->at(k);
          est[k] = sketch.query_size(k);
        }
      } else {
        for (const auto& h : hh) {
          auto it = stored_truth.find(h.key);
          universe[h.key] = it == stored_truth.end() ? 1 : it->second;
          est[h.key] = h.size;
        }
      }
      m = universe.empty() ? classification_metrics(expected, reported)
                           : compute_metrics(universe, est, expected, reported);
      break;
    }
    case QueryMode::hhh: {
      const auto rows = sketch.query_hhh(spec.hierarchy, sh.hh_threshold);
      m = hhh_metrics(sh.truth_table, sh.true_hhh, sketch.merged_table(), rows);
      run["hhh"] = hhh_json(rows);
      break;
    }
  }
  run["metrics"] = metrics_json(m);

  json top = json::array();
  const auto all = sketch.query_heavy_hitters(0);
  for (size_t i = 0; i < all.size() && i < spec.top_k; ++i)
    top.push_back(json{{"flow", all[i].key.hex()}, {"size", all[i].size}});
  run["top_k"] = top;

  // Baseline at the full budget.
  json base;
  const uint64_t base_seed = mix64(cfg.seed ^ 0xba5e);
  if (spec.mode == QueryMode::hhh) {
    const size_t width = budget / (cfg.coco_rows * coco_slot_bytes(cfg));
    if (width < 1) throw ConfigError("budget too small for the baseline");
    CocoLight coco(cfg.coco_rows, width, base_seed);
    for (const auto& p : sh.packets) coco.insert(p.key, 1);
    std::map<FlowKey, uint64_t> merged;
    for (const auto& s : coco.slots())
      if (s.key && s.count > 0) merged[*s.key] = std::max(merged[*s.key], s.count);
    const KeyCountTable table(merged.begin(), merged.end());
    const auto rows = hhh_from_table(table, spec.hierarchy, sh.hh_threshold);
    base["kind"] = "coco";
    base["rows"] = cfg.coco_rows;
    base["width"] = width;
    base["metrics"] = metrics_json(hhh_metrics(sh.truth_table, sh.true_hhh, table, rows));
  } else {
    const size_t width = budget / (cfg.d_light * (spec.baseline_counter_bits / 8));
    if (width < 1) throw ConfigError("budget too small for the baseline");
    CountMinSketch cms(cfg.d_light, width, spec.baseline_counter_bits, base_seed);
    for (const auto& p : sh.packets) cms.insert(p.key, 1);
    std::vector<FlowKey> cms_reported;
    for (const auto& [k, n] : *sh.truth)
      if (cms.query(k) > sh.hh_threshold) cms_reported.push_back(k);
    const auto cms_query = [&](const FlowKey& k) { return cms.query(k); };
    MetricReport bm;
    if (spec.mode == QueryMode::size) {
      bm = compute_metrics_with(*sh.truth, cms_query, sh.true_hh, cms_reported);
    } else {
      FlowSizeMap universe;
      if (spec.hh_are_universe == AreUniverse::true_hh)
        for (const auto& k : sh.true_hh) universe[k] = sh.truth->at(k);
      else
        for (const auto& k : cms_reported) universe[k] = sh.truth->at(k);
      bm = universe.empty() ? classification_metrics(sh.true_hh, cms_reported)
                            : compute_metrics_with(universe, cms_query, sh.true_hh, cms_reported);
    }
    base["kind"] = "cms";
    base["depth"] = cfg.d_light;
    base["width"] = width;
    base["counter_bits"] = spec.baseline_counter_bits;
    base["metrics"] = metrics_json(bm);
  }
  run["baseline"] = base;
  return run;
}

}  // namespace

nlohmann::json run_experiment(const ExperimentSpec& spec, const std::vector<PacketRecord>& packets,
                              const std::string& source) {
  spec.validate();
  if (packets.empty()) throw InputError("trace contains no packets");

  SketchConfig cfg = spec.cfg;
  if (!spec.heavy_ratio_overridden && spec.mode == QueryMode::hh) cfg.heavy_ratio = 1.0;

  auto truth = std::make_shared<const FlowSizeMap>(exact_counts(packets));
  Shared sh{spec, packets, truth, make_backend(spec.backend, truth, cfg), cfg, 0, {}, {}, {}};
  sh.hh_threshold =
      static_cast<uint64_t>(cfg.hh_threshold_fraction * static_cast<double>(packets.size()));
  for (const auto& [k, n] : *truth)
    if (n > sh.hh_threshold) sh.true_hh.push_back(k);
  std::sort(sh.true_hh.begin(), sh.true_hh.end());
  if (spec.mode == QueryMode::hhh) {
    sh.truth_table.assign(truth->begin(), truth->end());
    std::sort(sh.truth_table.begin(), sh.truth_table.end());
    sh.true_hhh = hhh_from_table(sh.truth_table, spec.hierarchy, sh.hh_threshold);
  }

  std::vector<json> runs(spec.budgets.size());
  std::vector<std::exception_ptr> errors(spec.budgets.size());
  const auto n = static_cast<int64_t>(spec.budgets.size());
#pragma omp parallel for schedule(dynamic)
  for (int64_t i = 0; i < n; ++i) {
    try {
      runs[static_cast<size_t>(i)] = run_budget(sh, spec.budgets[static_cast<size_t>(i)]);
    } catch (...) {
      errors[static_cast<size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  json backend{{"kind", to_string(spec.backend.kind)}};
  switch (spec.backend.kind) {
    case BackendKind::noisy: backend["accuracy_A"] = spec.backend.accuracy_A; break;
    case BackendKind::static_score: backend["score"] = spec.backend.static_score; break;
    case BackendKind::file: backend["predictions"] = spec.backend.predictions.string(); break;
    case BackendKind::remote: backend["remote"] = spec.backend.remote; break;
    case BackendKind::oracle: break;
  }

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["generated_at"] = now_iso8601();
  report["mode"] = std::string(to_string(spec.mode));
  report["source"] = source;
  report["trace"] = json{{"packets", packets.size()}, {"flows", truth->size()}};
  report["backend"] = backend;
  report["hh_threshold"] = sh.hh_threshold;
  if (spec.mode == QueryMode::hhh) {
    json levels = json::array();
    for (int l : spec.hierarchy.levels()) levels.push_back(l);
    report["hierarchy"] = levels;
    report["true_hhh"] = sh.true_hhh.size();
  } else {
    report["true_hh"] = sh.true_hh.size();
  }
  report["runs"] = runs;
  return report;
}

nlohmann::json run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.trace_path) {
    const auto packets = to_packets(read_trace_csv(*spec.trace_path));
    return run_experiment(spec, packets, spec.trace_path->string());
  }
  ZipfParams zp = spec.zipf;
  zp.with_headers = spec.backend.kind == BackendKind::remote;
  const auto packets = to_packets(generate_zipf(zp));
  std::ostringstream src;
  src << "zipf(alpha=" << zp.alpha << ",flows=" << zp.num_flows << ",packets=" << zp.num_packets
      << ",seed=" << zp.seed << ")";
  return run_experiment(spec, packets, src.str());
}

std::string hhh_csv(const nlohmann::json& run) {
  std::ostringstream out;
  out << "prefix_cidr,level,count\n";
  if (run.contains("hhh"))
    for (const auto& row : run["hhh"])
      out << row["prefix"].get<std::string>() << ',' << row["level"].get<int>() << ','
          << row["count"].get<uint64_t>() << '\n';
  return out.str();
}

}  // namespace llms
