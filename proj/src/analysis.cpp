#include "llmsketch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "llmsketch/errors.hpp"

namespace llms {

void AnalysisInputs::validate() const {
  if (!(accuracy_A >= 0 && accuracy_A <= 1)) throw ConfigError("A must lie in [0, 1]");
  if (!(w_light >= 1 && d_light >= 1)) throw ConfigError("light part needs w >= 1 and d >= 1");
  if (!(n_light >= 0 && n_large >= 0 && total_packets >= 0 && threshold_T >= 0))
    throw ConfigError("counts must be non-negative");
}

double p_cms(double w, double d, double n) {
  if (!(w >= 1 && d >= 1 && n >= 1)) throw ConfigError("p_cms needs w, d, N >= 1");
  return 1.0 - std::pow(1.0 - std::exp(-(n - 1.0) / w), d);
}

double p_llms(const AnalysisInputs& in) {
  in.validate();
  const double a = in.accuracy_A;
  return a + (1.0 - a) * p_cms(in.w_light, in.d_light, std::max(in.n_light, 1.0));
}

ErrorBound error_bound(const AnalysisInputs& in) {
  in.validate();
  ErrorBound b;
  b.epsilon = std::numbers::e / in.w_light;
  b.delta = (1.0 - in.accuracy_A) * std::exp(-in.d_light);
  b.light_mass_bound =
      std::max(0.0, in.total_packets - in.accuracy_A * in.n_large * in.threshold_T);
  return b;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

MetricReport compute_metrics(const FlowSizeMap& truth, const FlowSizeMap& estimates,
                             std::span<const FlowKey> expected, std::span<const FlowKey> reported) {
  if (truth.empty()) throw InputError("metrics need a non-empty ground truth");
  std::vector<std::pair<FlowKey, uint64_t>> sorted(truth.begin(), truth.end());
  std::sort(sorted.begin(), sorted.end());

  MetricReport r;
  r.universe = sorted.size();
  double rel = 0;
  double abs = 0;
  for (const auto& [key, n] : sorted) {
    if (n == 0) throw InputError("ground truth counts must be >= 1");
    auto it = estimates.find(key);
    const double est = it == estimates.end() ? 0.0 : static_cast<double>(it->second);
    const double err = std::fabs(static_cast<double>(n) - est);
    abs += err;
    rel += err / static_cast<double>(n);
  }
  r.are = rel / static_cast<double>(sorted.size());
  r.aae = abs / static_cast<double>(sorted.size());

  const MetricReport c = classification_metrics(expected, reported);
  r.precision = c.precision;
  r.recall = c.recall;
  r.f1 = c.f1;
  return r;
}

MetricReport classification_metrics(std::span<const FlowKey> expected,
                                    std::span<const FlowKey> reported) {
  const std::set<FlowKey> want(expected.begin(), expected.end());
  const std::set<FlowKey> got(reported.begin(), reported.end());
  size_t tp = 0;
  for (const auto& k : got) tp += want.count(k);
  MetricReport r;
  r.precision = got.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(got.size());
  r.recall = want.empty() ? 1.0 : static_cast<double>(tp) / static_cast<double>(want.size());
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

}  // namespace llms
