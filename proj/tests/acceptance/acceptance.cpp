// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
// below. The exit status is non-zero when a criterion fails that is not on
// the known-blocker list, or when a listed blocker starts passing (so the
// list gets pruned).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "llmsketch/analysis.hpp"
#include "llmsketch/experiment.hpp"
#include "llmsketch/llm_sketch.hpp"
#include "llmsketch/monte_carlo.hpp"
#include "llmsketch/trace.hpp"

using namespace llms;
namespace fs = std::filesystem;

namespace {

constexpr double kLockTol = 0.012;
constexpr double kLockSeconds = 30.0;
constexpr double kCmsCalibTol = 0.02;
constexpr double kEndToEndTol = 0.03;
constexpr double kBoundSlack = 0.01;
constexpr double kAreRatio = 0.5;
constexpr double kCocoRelTol = 0.02;

// Criteria that fail for a reason analysed in the README ("Known failing
// acceptance criteria"), not for a defect.
const std::set<std::string> kKnownBlockers = {"heavy hitter exactness (4x cells)"};

int failures = 0;
int unexpected = 0;

void line(bool ok, const std::string& name, const std::string& detail) {
  const bool known = kKnownBlockers.count(name) > 0;
  std::printf("%s  %-34s %s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              !ok && known ? "  [known blocker]" : ok && known ? "  [blocker cleared]" : "");
  std::fflush(stdout);
  failures += !ok;
  unexpected += ok == known;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("info  %-34s %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void lock_flag() {
  std::mt19937_64 rng(20240601);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (int s = 0; s < 20; ++s) {
    std::vector<uint8_t> labels(1 + rng() % 32);
    for (auto& y : labels) y = rng() & 1;
    double mean = 0;
    for (auto y : labels) mean += y;
    mean /= static_cast<double>(labels.size());
    const double got = lock_flag_mc(labels, 100000, 1000 + s);
    worst = std::max(worst, std::abs(got - mean));
  }
  const double secs = seconds_since(t0);
  line(worst <= kLockTol && secs < kLockSeconds, "lock flag unbiasedness",
       fmt("max |E[L]-mean(y)| = %.4f (tol %.3f), %.1f s (limit %.0f s)", worst, kLockTol, secs,
           kLockSeconds));
}

void cms_one_sided_check() {
  const auto r = cms_one_sided(1000, 10000, 77);
  line(r.violations == 0, "cms one-sided error",
       fmt("%llu streams, %llu flows checked, %llu violations",
           static_cast<unsigned long long>(r.streams),
           static_cast<unsigned long long>(r.flows_checked),
           static_cast<unsigned long long>(r.violations)));
}

void cms_calibration() {
  const auto r = cms_exact_fraction(2048, 3, 2000, 20, 31337);
  const double want = p_cms(2048, 3, 2000);
  line(std::abs(r.mean_fraction - want) <= kCmsCalibTol, "exact-fraction calibration (cms)",
       fmt("measured %.4f vs closed form %.4f (tol %.2f)", r.mean_fraction, want, kCmsCalibTol));
}

// Zipf(1.0), 2e5 packets over 2e4 flows; heavy part with four cells per true
// large flow, 32-bit light counters so saturation cannot mask exactness.
NoisyOracleSetup end_to_end_setup() {
  NoisyOracleSetup st;
  st.trace.alpha = 1.0;
  st.trace.num_flows = 20000;
  st.trace.num_packets = 200000;
  st.trace.seed = 1;
  const auto sizes = zipf_flow_sizes(st.trace.alpha, st.trace.num_flows, st.trace.num_packets);
  const size_t n_large = static_cast<size_t>(
      std::count_if(sizes.begin(), sizes.end(), [&](uint64_t n) { return n >= st.cfg.threshold_T; }));
  st.cfg.w_h = (4 * n_large + st.cfg.d_h - 1) / st.cfg.d_h;
  st.cfg.w_light = 8192;
  st.cfg.light_counter_bits = 32;
  return st;
}

void end_to_end_and_bound() {
  auto st = end_to_end_setup();
  info("end-to-end sizing", fmt("w_h = %zu buckets x %zu cells, light %zu x %zu (32-bit)",
                                st.cfg.w_h, st.cfg.d_h, st.cfg.d_light, st.cfg.w_light));
  for (double A : {1.0, 0.8, 0.5}) {
    st.accuracy_A = A;
    const auto trials = noisy_oracle_trials(st, 40, 100);
    size_t classified = 0, exact_classified = 0, large = 0, exact_large = 0;
    double predicted = 0;
    for (const auto& t : trials) {
      classified += t.classified_large;
      exact_classified += t.exact_classified_large;
      large += t.large_flows;
      exact_large += t.exact_large;
      predicted += t.predicted;
    }
    predicted /= static_cast<double>(trials.size());
    const double frac = static_cast<double>(exact_classified) / static_cast<double>(classified);
    const double all = static_cast<double>(exact_large) / static_cast<double>(large);
    line(std::abs(frac - predicted) <= kEndToEndTol, fmt("exact large flows, A=%.1f", A),
         fmt("classified on arrival: %.4f of %zu vs predicted %.4f (tol %.2f)", frac, classified,
             predicted, kEndToEndTol));
    // Flows that took a free cell skip the classifier, so over all large
    // flows the prediction can only be a floor.
    line(all >= predicted - kEndToEndTol, fmt("exact large flows floor, A=%.1f", A),
         fmt("all large flows: %.4f of %zu >= predicted %.4f - %.2f", all, large, predicted,
             kEndToEndTol));

    double worst = 0, delta = 0;
    for (size_t i = 0; i < 20; ++i) {
      worst = std::max(worst, trials[i].violation_fraction());
      delta = trials[i].delta;
    }
    line(worst <= delta + kBoundSlack, fmt("error bound, A=%.1f", A),
         fmt("max violating fraction over 20 seeds %.4f <= delta %.4f + %.2f", worst, delta,
             kBoundSlack));
  }
}

ExperimentSpec desk_spec(QueryMode mode) {
  ExperimentSpec s;
  s.zipf.alpha = 1.0;
  s.zipf.num_flows = 20000;
  s.zipf.num_packets = 200000;
  s.zipf.seed = 1;
  s.mode = mode;
  s.budgets = {50000, 100000, 200000};
  return s;
}

void directional() {
  auto spec = desk_spec(QueryMode::size);
  const auto r = run_experiment(spec);
  bool ok = true;
  std::string detail;
  for (const auto& run : r["runs"]) {
    const double ours = run["metrics"]["are"].get<double>();
    const double base = run["baseline"]["metrics"]["are"].get<double>();
    ok = ok && ours <= kAreRatio * base;
    detail += fmt("%zuKB %.4f/%.4f=%.2f  ", run["memory_bytes"].get<size_t>() / 1000, ours, base,
                  ours / base);
  }
  line(ok, "ARE vs count-min (32-bit baseline)", detail + fmt("(limit %.1f)", kAreRatio));

  spec.baseline_counter_bits = 8;
  const auto r8 = run_experiment(spec);
  detail.clear();
  for (const auto& run : r8["runs"])
    detail += fmt("%.2f ", run["metrics"]["are"].get<double>() /
                               run["baseline"]["metrics"]["are"].get<double>());
  info("ARE ratio vs 8-bit count-min", detail);
}

void hh_exactness() {
  ZipfParams zp;
  zp.alpha = 1.0;
  zp.num_flows = 100000;
  zp.num_packets = 1000000;
  zp.seed = 7;
  zp.with_headers = false;
  const auto packets = to_packets(generate_zipf(zp));
  const auto truth = exact_counts(packets);
  ExperimentSpec spec = desk_spec(QueryMode::hh);
  spec.zipf = zp;
  const uint64_t thr =
      static_cast<uint64_t>(spec.cfg.hh_threshold_fraction * static_cast<double>(packets.size()));
  size_t n_hh = 0;
  for (const auto& [k, n] : truth) n_hh += n > thr;

  auto f1_at = [&](size_t multiple) {
    const size_t buckets = (multiple * n_hh + spec.cfg.d_h - 1) / spec.cfg.d_h;
    spec.budgets = {buckets * spec.cfg.d_h * heavy_cell_bytes(spec.cfg)};
    const auto r = run_experiment(spec, packets, "zipf");
    return r["runs"][0]["metrics"]["f1"].get<double>();
  };
  const double f1 = f1_at(4);
  line(f1 == 1.0, "heavy hitter exactness (4x cells)",
       fmt("%zu true HH (> %llu pkts), F1 = %.6f", n_hh, static_cast<unsigned long long>(thr), f1));
  std::string more;
  for (size_t m : {6, 8, 16}) more += fmt("%zux: %.6f  ", m, f1_at(m));
  info("heavy hitter F1 at larger parts", more);
}

// Discounted HHH computed directly from the definition: a node's conditioned
// count is the mass under it not covered by any reported longer prefix.
std::vector<HhhEntry> brute_hhh(const KeyCountTable& table, const std::vector<int>& levels,
                                uint64_t thr) {
  std::vector<HhhEntry> reported;
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    std::map<uint32_t, uint64_t> cond;
    for (const auto& [k, c] : table) {
      const uint32_t ip = k.src_ip();
      bool covered = false;
      for (const auto& r : reported) covered = covered || prefix_of(ip, r.level) == r.prefix;
      if (!covered) cond[prefix_of(ip, *it)] += c;
    }
    for (const auto& [p, c] : cond)
      if (c > thr) reported.push_back({p, *it, c});
  }
  return reported;
}

void coco() {
  std::mt19937_64 rng(4242);
  std::vector<std::vector<uint8_t>> seqs = {{0, 0, 0, 0, 0, 0, 0, 0, 0, 1}};
  for (size_t len : {16u, 24u, 31u}) {
    std::vector<uint8_t> s(len);
    for (auto& x : s) x = rng() & 1;
    s[0] = 0;
    s[1] = 1;
    seqs.push_back(s);
  }
  double worst = 0;
  for (size_t i = 0; i < seqs.size(); ++i) {
    const auto r = coco_pair_mc(seqs[i], 100000, 900 + i);
    for (int k = 0; k < 2; ++k)
      worst = std::max(worst, std::abs(r.mean_estimate[k] - static_cast<double>(r.truth[k])) /
                                  static_cast<double>(r.truth[k]));
  }
  line(worst <= kCocoRelTol, "coco unbiasedness",
       fmt("%zu sequences, max relative error %.4f (tol %.2f)", seqs.size(), worst, kCocoRelTol));

  int mismatches = 0;
  const std::vector<int> levels{8, 16, 24, 32};
  for (int inst = 0; inst < 100; ++inst) {
    SketchConfig cfg;
    cfg.w_h = 1 + rng() % 3;
    cfg.d_h = 2 + rng() % 4;
    cfg.w_light = 2 + rng() % 6;
    cfg.seed = rng();
    LlmSketch sk(cfg, QueryMode::hhh, std::make_shared<StaticBackend>((rng() & 1) ? 0.9 : 0.1));
    const size_t flows = 1 + rng() % 50;
    std::vector<FlowKey> keys;
    for (size_t f = 0; f < flows; ++f) {
      const uint32_t ip = (10u + rng() % 2) << 24 | (rng() % 3) << 16 | (rng() % 2) << 8 | rng() % 4;
      keys.push_back(FlowKey::from_tuple(ip, 0x0a0000fe, static_cast<uint16_t>(f), 80, 6));
    }
    const size_t packets = 50 + rng() % 400;
    for (size_t p = 0; p < packets; ++p)
      sk.insert(make_packet(keys[std::min(rng() % flows, rng() % flows)], {}, p));
    const uint64_t thr = 3 + rng() % 40;
    auto got = sk.query_hhh(Hierarchy(levels), thr);
    auto want = brute_hhh(sk.merged_table(), levels, thr);
    auto order = [](const HhhEntry& a, const HhhEntry& b) {
      return a.level != b.level ? a.level > b.level : a.prefix < b.prefix;
    };
    std::sort(got.begin(), got.end(), order);
    std::sort(want.begin(), want.end(), order);
    mismatches += got != want;
  }
  line(mismatches == 0, "hhh vs brute force", fmt("100 instances, %d mismatches", mismatches));
}

std::string report_without_timestamp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  auto j = nlohmann::json::parse(ss.str());
  j.erase("generated_at");
  return j.dump(2);
}

void determinism() {
  const fs::path dir = fs::temp_directory_path() / ("llms_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  bool ok = true;
  int runs = 0;
  for (const std::string mode : {"size", "hh", "hhh"}) {
    std::string reports[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / (mode + std::to_string(rep) + ".json");
      const std::string cmd = std::string(LLMS_CLI) + " run --mode " + mode +
                              " --memory 50KB,100KB --seed 11 --flows 5000 --packets 50000 --out " +
                              out.string();
      const int rc = std::system(cmd.c_str());
      ok = ok && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
      reports[rep] = report_without_timestamp(out);
    }
    ok = ok && reports[0] == reports[1];
    ++runs;
  }
  fs::remove_all(dir);
  line(ok, "run determinism", fmt("%d modes, reports byte-identical without generated_at", runs));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  lock_flag();
  cms_one_sided_check();
  cms_calibration();
  end_to_end_and_bound();
  directional();
  hh_exactness();
  coco();
  determinism();
  std::printf("%d failing (%d unexpected), %.1f s\n", failures, unexpected, seconds_since(t0));
  return unexpected == 0 ? 0 : 1;
}
