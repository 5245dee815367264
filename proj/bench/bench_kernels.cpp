// Serial reference vs OpenMP kernels: wall time and a result check.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "llmsketch/monte_carlo.hpp"

using namespace llms;

namespace {

double time_it(const std::function<double()>& fn, double& result) {
  const auto t0 = std::chrono::steady_clock::now();
  result = fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, const std::function<double(Exec)>& kernel) {
  double rs = 0, rp = 0;
  const double ts = time_it([&] { return kernel(Exec::serial); }, rs);
  const double tp = time_it([&] { return kernel(Exec::parallel); }, rp);
  std::printf("%-22s serial %8.3f s   parallel %8.3f s   speedup %5.2fx   %s\n", name, ts, tp,
              ts / tp, rs == rp ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const double scale = argc > 1 ? std::stod(argv[1]) : 1.0;
  const auto n = [&](double v) { return static_cast<uint64_t>(v * scale); };
  std::printf("threads: %d\n", omp_get_max_threads());

  const std::vector<uint8_t> labels{1, 0, 1, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1, 1, 1};
  row("lock flag", [&](Exec e) { return lock_flag_mc(labels, n(2e6), 1, e); });
  row("cms exact fraction", [&](Exec e) {
    return cms_exact_fraction(2048, 3, 2000, n(200), 2, e).mean_fraction;
  });
  row("cms one-sided", [&](Exec e) {
    return static_cast<double>(cms_one_sided(n(200), 10000, 3, e).flows_checked);
  });
  const std::vector<uint8_t> seq{0, 1, 0, 0, 1, 0, 1, 1, 0, 0};
  row("coco pair", [&](Exec e) { return coco_pair_mc(seq, n(1e6), 4, e).mean_estimate[0]; });

  NoisyOracleSetup st;
  st.accuracy_A = 0.8;
  st.cfg.w_h = 150;
  st.cfg.w_light = 8192;
  st.cfg.light_counter_bits = 32;
  row("noisy oracle trials", [&](Exec e) {
    double acc = 0;
    for (const auto& t : noisy_oracle_trials(st, n(8), 100, e)) acc += t.exact_fraction();
    return acc;
  });
  return 0;
}
