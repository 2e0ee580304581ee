// sampler_test.cc

// Copyright 2026  The dsel Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "dsel/sampler.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"

#include "support/synth.h"

using namespace dsel;
using synth::MakeSegment;
using synth::SegId;

namespace {

SegmentPool UniformPool(std::size_t n, double dur) {
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < n; ++i) segs.push_back(MakeSegment(SegId(i), dur));
  return SegmentPool(std::move(segs));
}

SegmentPool PoolOf(const std::vector<std::pair<std::string, double>> &items) {
  std::vector<Segment> segs;
  for (const auto &[id, d] : items) segs.push_back(MakeSegment(id, d));
  return SegmentPool(std::move(segs));
}

// Generated by tests/oracles/shuffle_vectors.py.
struct ShuffleVector {
  std::uint64_t seed;
  const char *label;
  std::size_t first10[10];
  std::uint64_t draw0, draw1;
};

constexpr ShuffleVector kVectors[] = {
    {42ULL, "", {7, 1, 11, 13, 2, 19, 16, 14, 0, 15}, 13930160852258120406ULL, 11788048577503494824ULL},
    {43ULL, "", {13, 12, 3, 16, 0, 2, 1, 5, 9, 8}, 517903087452778646ULL, 5503290952634489979ULL},
    {0ULL, "", {15, 1, 17, 9, 5, 4, 3, 6, 16, 7}, 2947667278772165694ULL, 18301848765998365067ULL},
    {42ULL, "class:PER", {5, 7, 15, 9, 12, 11, 10, 19, 6, 13}, 11010883631808367368ULL, 8041555332709356741ULL},
    {42ULL, "svm-train", {14, 0, 8, 17, 12, 5, 9, 10, 2, 13}, 4150000999579622276ULL, 1988340470363630451ULL},
    {18446744073709551615ULL, "", {11, 17, 3, 13, 18, 15, 8, 16, 2, 19}, 478026398904862820ULL, 13243134898385798468ULL},
};

}  // namespace

TEST_CASE("budget rejects non-positive values") {
  CHECK_THROWS_AS(Budget::Hours(0), Error);
  CHECK_THROWS_AS(Budget::Hours(-1), Error);
  CHECK_THROWS_AS(Budget::Seconds(std::nan("")), Error);
  CHECK(Budget::Hours(100).seconds() == 360000.0);
}

TEST_CASE("engine is the standard mt19937_64") {
  Rng rng(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = rng.Next();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("published shuffle vectors match") {
  for (const auto &v : kVectors) {
    CAPTURE(v.seed);
    CAPTURE(v.label);
    Rng draws(v.seed, v.label);
    CHECK(draws.Next() == v.draw0);
    CHECK(draws.Next() == v.draw1);
    Rng rng(v.seed, v.label);
    auto idx = ShuffledIndices(20, rng);
    for (int i = 0; i < 10; ++i) CHECK(idx[i] == v.first10[i]);
  }
  // Derive() reaches the same labelled stream as direct construction.
  Rng child = Rng(42).Derive("class:PER");
  auto idx = ShuffledIndices(20, child);
  CHECK(idx[0] == 5);
  CHECK(idx[9] == 13);
}

TEST_CASE("bounded draws stay in range") {
  Rng rng(1);
  for (std::uint64_t n : {1ULL, 2ULL, 3ULL, 7ULL, 1000ULL, (1ULL << 63) + 1}) {
    for (int i = 0; i < 200; ++i) CHECK(rng.Below(n) < n);
  }
}

TEST_CASE("derived streams") {
  Rng root(42);
  Rng a = root.Derive("PER"), b = root.Derive("PER"), c = root.Derive("ORG");
  CHECK(a.label() == "PER");
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    std::uint64_t x = a.Next(), y = b.Next(), z = c.Next();
    CHECK(x == y);
    differs = differs || x != z;
  }
  CHECK(differs);

  // Drawing from the parent does not shift a child.
  Rng parent(42);
  Rng before = parent.Derive("LOC");
  for (int i = 0; i < 37; ++i) parent.Next();
  Rng after = parent.Derive("LOC");
  for (int i = 0; i < 100; ++i) CHECK(before.Next() == after.Next());

  CHECK(root.Derive("a").Derive("b").label() == "a/b");
}

TEST_CASE("random_sample examples") {
  SegmentPool pool = UniformPool(10, 1.0);
  Rng rng(42);
  SelectionResult r = RandomSample(pool, Budget::Seconds(5), rng);
  CHECK(r.selected_ids.size() == 5);
  CHECK(r.realized_duration_s == 5.0);
  CHECK_FALSE(r.saturated);

  Rng rng2(42);
  SelectionResult all = RandomSample(pool, Budget::Seconds(50), rng2);
  CHECK(all.saturated);
  REQUIRE(all.selected_ids.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(all.selected_ids[i] == SegId(i));

  Rng rng3(1);
  SelectionResult empty = RandomSample(SegmentPool(), Budget::Seconds(5), rng3);
  CHECK(empty.selected_ids.empty());
}

TEST_CASE("random_sample determinism and seed sensitivity") {
  Rng gen(3);
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < 1000; ++i)
    segs.push_back(MakeSegment(SegId(i), synth::Uniform(gen, 1, 20)));
  SegmentPool pool(std::move(segs));
  Budget budget = Budget::Seconds(pool.total_duration_s() / 10);

  Rng a(42), b(42), c(43);
  auto ra = RandomSample(pool, budget, a);
  auto rb = RandomSample(pool, budget, b);
  auto rc = RandomSample(pool, budget, c);
  CHECK(ra.selected_ids == rb.selected_ids);
  CHECK(ra.selected_ids != rc.selected_ids);
  CHECK(ra.seed == 42);
}

TEST_CASE("top_n examples") {
  SegmentPool pool = PoolOf({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}});
  std::vector<double> scores{0.1, 0.9, 0.5, 0.7, 0.3};
  auto r = TopN(pool, Budget::Seconds(3), scores);
  CHECK(r.selected_ids == std::vector<std::string>{"b", "d", "c"});

  SegmentPool tied = PoolOf({{"zeta", 1}, {"alpha", 1}, {"mid", 1}});
  auto t = TopN(tied, Budget::Seconds(1), std::vector<double>{0.8, 0.8, 0.1});
  CHECK(t.selected_ids == std::vector<std::string>{"alpha"});

  // Highest-scored segment does not fit and is skipped.
  SegmentPool skip = PoolOf({{"big", 10}, {"small", 2}, {"mid", 3}});
  auto s = TopN(skip, Budget::Seconds(4), std::vector<double>{0.9, 0.5, 0.7});
  CHECK(s.selected_ids == std::vector<std::string>{"mid"});
  CHECK(s.realized_duration_s == 3.0);

  CHECK_THROWS_AS(TopN(pool, Budget::Seconds(3),
                       std::vector<double>{0.1, NAN, 0.5, 0.7, 0.3}),
                  Error);
}

TEST_CASE("greedy fill is budget safe and near tight") {
  Rng gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + gen.Below(60);
    std::vector<Segment> segs;
    double dmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = synth::Uniform(gen, 0.1, 30.0);
      dmax = std::max(dmax, d);
      segs.push_back(MakeSegment(SegId(i), d));
    }
    SegmentPool pool(std::move(segs));
    Budget budget = Budget::Seconds(synth::Uniform(gen, 0.05, 1.2) *
                                    pool.total_duration_s());
    Rng rng(trial);
    auto r = RandomSample(pool, budget, rng);
    CHECK(r.realized_duration_s <= budget.seconds());
    if (pool.total_duration_s() > budget.seconds())
      CHECK(r.realized_duration_s >= budget.seconds() - dmax);
    std::set<std::string> uniq(r.selected_ids.begin(), r.selected_ids.end());
    CHECK(uniq.size() == r.selected_ids.size());
  }
}

TEST_CASE("shuffle orderings are uniform over 10,000 seeds") {
  std::map<std::vector<std::size_t>, int> counts;
  const int trials = 10000;
  for (int seed = 0; seed < trials; ++seed) {
    Rng rng(seed);
    counts[ShuffledIndices(5, rng)]++;
  }
  CHECK(counts.size() == 120);
  const double p = 1.0 / 120, mean = trials * p,
               sigma = std::sqrt(trials * p * (1 - p));
  for (const auto &[perm, c] : counts) {
    CAPTURE(c);
    CHECK(std::abs(c - mean) <= 3 * sigma);
  }
}

TEST_CASE("strategy names") {
  CHECK(ParseStrategy("ner-class-top-conf") == Strategy::kNerClassTopConf);
  CHECK(SelectableStrategies().size() == 7);
  try {
    ParseStrategy("bogus");
    FAIL("expected an exception");
  } catch (const Error &e) {
    std::string msg = e.what();
    for (Strategy s : SelectableStrategies())
      CHECK(msg.find(std::string(StrategyName(s))) != std::string::npos);
  }
  CHECK_THROWS(ParseStrategy("top-n"));
}

TEST_CASE("selection result json round trip") {
  SegmentPool pool = UniformPool(10, 1.0);
  Rng rng(42);
  SelectionResult r = RandomSample(pool, Budget::Seconds(4), rng);
  r.warnings.push_back("w");
  r.stats["k"] = 1;
  SelectionResult back = SelectionResultFromJson(ToJson(r));
  CHECK(back.selected_ids == r.selected_ids);
  CHECK(back.realized_duration_s == r.realized_duration_s);
  CHECK(back.rng_streams == r.rng_streams);
  CHECK(ToJson(back) == ToJson(r));
}
