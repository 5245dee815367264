#include <doctest.h>

#include <sstream>

#include "llmsketch/heavy_part.hpp"
#include "support.hpp"

using namespace llms;
using test::key_n;

TEST_CASE("lock update edge probabilities are exact") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    CHECK(lock_update(false, 0, true, rng));
    CHECK_FALSE(lock_update(false, 0, false, rng));
    CHECK(lock_update(true, 17, true, rng));
    CHECK_FALSE(lock_update(false, 17, false, rng));
  }
}

TEST_CASE("lock update matches its transition probability") {
  // From lock 1 at size 3 with label 0 the flag survives with 3/4.
  Rng rng(2);
  int kept = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) kept += lock_update(true, 3, false, rng);
  CHECK(kept / double(n) == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("lock flag mean tracks the label mean") {
  const std::vector<bool> labels{true, true, false, true};
  Rng rng(3);
  const int trials = 100000;
  int locked = 0;
  for (int t = 0; t < trials; ++t) {
    HeavyCell c;
    for (bool y : labels) {
      c = lock_update(c, y, rng);
      ++c.size_hat;
    }
    locked += c.lock;
  }
  CHECK(locked / double(trials) == doctest::Approx(0.75).epsilon(0.0134));
}

TEST_CASE("lookup, increment and empty insert") {
  HeavyTable t(4, 2, 9);
  const auto k = key_n(1);
  CHECK_FALSE(t.lookup(k));
  CHECK_FALSE(t.increment(k));
  CHECK(t.try_insert_empty(k));
  auto e = t.lookup(k);
  REQUIRE(e);
  CHECK(e->size_hat == 1);
  CHECK_FALSE(e->lock);
  CHECK(t.increment(k));
  CHECK(t.lookup(k)->size_hat == 2);
  CHECK(t.total_size() == 2);
  CHECK(t.occupied() == 1);
  CHECK(t.check_invariants());
}

TEST_CASE("a full bucket refuses empty inserts") {
  HeavyTable t(1, 3, 9);
  for (uint32_t i = 0; i < 3; ++i) CHECK(t.try_insert_empty(key_n(i)));
  CHECK(t.bucket_full(0));
  CHECK_FALSE(t.try_insert_empty(key_n(9)));
}

TEST_CASE("eviction prefers the smallest unlocked cell") {
  HeavyTable t(1, 4, 9);
  const size_t sizes[4] = {5, 2, 7, 2};
  const bool locks[4] = {false, true, false, false};
  for (size_t i = 0; i < 4; ++i) {
    auto& c = t.cell_at(0, i);
    c.key = key_n(static_cast<uint32_t>(i));
    c.size_hat = sizes[i];
    c.lock = locks[i];
  }
  CHECK(t.evict_candidate(0) == 3);
  t.cell_at(0, 3).lock = true;
  CHECK(t.evict_candidate(0) == 0);
  for (size_t i = 0; i < 4; ++i) t.cell_at(0, i).lock = true;
  CHECK(t.evict_candidate(0) == 1);  // all locked: smallest, lowest index
}

TEST_CASE("replace returns the victim and starts the newcomer at 1") {
  HeavyTable t(1, 2, 9);
  t.try_insert_empty(key_n(1));
  t.try_insert_empty(key_n(2));
  t.increment(key_n(2));
  const auto ev = t.replace(0, 0, key_n(3), true);
  CHECK(ev.key == key_n(1));
  CHECK(ev.size_hat == 1);
  const auto e = t.lookup(key_n(3));
  REQUIRE(e);
  CHECK(e->size_hat == 1);
  CHECK(e->lock);
  CHECK_FALSE(t.lookup(key_n(1)));
  t.replace(0, 1, key_n(4), false);
  CHECK_FALSE(t.lookup(key_n(4))->lock);
}

TEST_CASE("dump lists buckets in cell order") {
  HeavyTable t(2, 2, 9);
  t.try_insert_empty(key_n(1));
  std::ostringstream os;
  t.dump(os);
  const auto s = os.str();
  CHECK(s.find("bucket 0:") != std::string::npos);
  CHECK(s.find("bucket 1:") != std::string::npos);
  CHECK(s.find(key_n(1).hex() + " 1 0") != std::string::npos);
}

TEST_CASE("same seed, same state") {
  auto run = [] {
    HeavyTable t(8, 4, 5);
    const auto keys = test::random_keys(200, 4);
    for (size_t i = 0; i < 2000; ++i) {
      const auto& k = keys[(i * 7919) % keys.size()];
      if (!t.increment(k) && !t.try_insert_empty(k)) {
        const size_t b = t.bucket_of(k);
        t.replace(b, t.evict_candidate(b), k, i % 3 == 0);
      }
    }
    std::ostringstream os;
    t.dump(os);
    return os.str();
  };
  CHECK(run() == run());
}

TEST_CASE("clear empties and reseeds") {
  HeavyTable t(2, 2, 5);
  t.try_insert_empty(key_n(1));
  const auto first = t.rng()();
  t.clear();
  CHECK(t.occupied() == 0);
  CHECK(t.rng()() == first);
}
