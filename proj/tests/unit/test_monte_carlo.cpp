#include <doctest.h>

#include "llmsketch/analysis.hpp"
#include "llmsketch/monte_carlo.hpp"

using namespace llms;

TEST_CASE("serial and parallel kernels agree exactly") {
  const std::vector<uint8_t> labels{1, 0, 1, 1, 0};
  CHECK(lock_flag_mc(labels, 5000, 3, Exec::serial) == lock_flag_mc(labels, 5000, 3, Exec::parallel));

  const auto a = cms_exact_fraction(256, 3, 200, 4, 9, Exec::serial);
  const auto b = cms_exact_fraction(256, 3, 200, 4, 9, Exec::parallel);
  CHECK(a.per_seed == b.per_seed);

  const auto c = cms_one_sided(6, 2000, 5, Exec::serial);
  const auto d = cms_one_sided(6, 2000, 5, Exec::parallel);
  CHECK(c.flows_checked == d.flows_checked);
  CHECK(c.violations == d.violations);

  const std::vector<uint8_t> seq{0, 0, 1, 0, 1};
  const auto e = coco_pair_mc(seq, 3000, 2, Exec::serial);
  const auto f = coco_pair_mc(seq, 3000, 2, Exec::parallel);
  CHECK(e.mean_estimate[0] == f.mean_estimate[0]);
  CHECK(e.mean_estimate[1] == f.mean_estimate[1]);
}

TEST_CASE("lock mean matches the label mean") {
  const std::vector<uint8_t> labels{1, 1, 0, 1};
  CHECK(lock_flag_mc(labels, 100000, 1) == doctest::Approx(0.75).epsilon(0.0134));
}

TEST_CASE("small cms calibration is near the closed form") {
  const auto r = cms_exact_fraction(512, 3, 500, 10, 4);
  CHECK(r.per_seed.size() == 10);
  CHECK(r.mean_fraction == doctest::Approx(p_cms(512, 3, 500)).epsilon(0.05));
}

TEST_CASE("coco pair estimates are unbiased") {
  std::vector<uint8_t> seq(9, 0);
  seq.push_back(1);
  const auto r = coco_pair_mc(seq, 100000, 6);
  CHECK(r.truth[0] == 9);
  CHECK(r.truth[1] == 1);
  CHECK(r.mean_estimate[0] == doctest::Approx(9).epsilon(0.02));
  CHECK(r.mean_estimate[1] == doctest::Approx(1).epsilon(0.05));
}

TEST_CASE("noisy oracle trial bookkeeping") {
  NoisyOracleSetup st;
  st.trace.num_flows = 2000;
  st.trace.num_packets = 20000;
  st.accuracy_A = 1.0;
  st.cfg.w_h = 100;
  st.cfg.w_light = 4096;
  st.cfg.light_counter_bits = 32;
  const auto t = noisy_oracle_trial(st, 1);
  CHECK(t.large_flows > 0);
  CHECK(t.exact_large <= t.large_flows);
  CHECK(t.classified_large <= t.large_flows);
  CHECK(t.predicted == 1.0);
  CHECK(t.delta == 0.0);
  const auto again = noisy_oracle_trial(st, 1);
  CHECK(again.exact_large == t.exact_large);
  CHECK(again.n_light == t.n_light);
}

TEST_CASE("perfect classifier and a roomy heavy part make every large flow exact") {
  NoisyOracleSetup st;
  st.trace.num_flows = 2000;
  st.trace.num_packets = 20000;
  st.accuracy_A = 1.0;
  st.cfg.w_h = 250;
  st.cfg.w_light = 1024;
  st.cfg.light_counter_bits = 32;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = noisy_oracle_trial(st, seed);
    CHECK(t.exact_large == t.large_flows);
    CHECK(t.bound_violations == 0);
  }
}
