// Copyright 2026 The DBRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "dbrec/common/errors.hpp"
#include "dbrec/data/dataset.hpp"
#include "dbrec/data/raw.hpp"
#include "dbrec/data/sampling.hpp"
#include "dbrec/data/synthetic.hpp"
#include "support.hpp"

using namespace dbrec::data;
using dbrec::testing::padded;

namespace {

RawData parse(const std::string& text, RawFormat format) {
  std::istringstream in(text);
  return parse_raw(in, format);
}

std::vector<RawPair> crossed(std::size_t users, std::size_t items) {
  std::vector<RawPair> pairs;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) pairs.push_back({padded('u', u), padded('i', i)});
  }
  return pairs;
}

}  // namespace

TEST_CASE("parse_raw reads the three formats") {
  SUBCASE("movielens single record") {
    const RawData raw = parse("1::10::4::978300760\n", RawFormat::kMovieLens);
    REQUIRE(raw.records.size() == 1);
    CHECK(raw.num_users == 1);
    CHECK(raw.num_items == 1);
    CHECK(raw.records[0].user == "1");
    CHECK(raw.records[0].item == "10");
    CHECK(raw.records[0].rating == 4.0);
    CHECK(raw.records[0].timestamp == "978300760");
  }
  SUBCASE("amazon") {
    const RawData raw = parse("A1,B2,5.0,1400000000\nA1,B3,2.0,1400000001\n", RawFormat::kAmazon);
    CHECK(raw.records.size() == 2);
    CHECK(raw.num_users == 1);
    CHECK(raw.num_items == 2);
  }
  SUBCASE("gowalla") {
    const RawData raw = parse("0\t2010-10-19T23:55:27Z\t30.23\t-97.79\t22847\n",
                              RawFormat::kGowalla);
    REQUIRE(raw.records.size() == 1);
    CHECK(raw.records[0].item == "22847");
    CHECK(raw.records[0].timestamp == "2010-10-19T23:55:27Z");
  }
}

TEST_CASE("parse_raw reports the offending line") {
  try {
    parse("1::10::x\n", RawFormat::kMovieLens);
    FAIL("expected ParseError");
  } catch (const dbrec::ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  try {
    parse("1::10::4::1\n2::11::oops::2\n", RawFormat::kMovieLens);
    FAIL("expected ParseError");
  } catch (const dbrec::ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("", RawFormat::kMovieLens), dbrec::ParseError);
  CHECK_THROWS_AS(load_raw("/nonexistent/ratings.dat", RawFormat::kMovieLens),
                  dbrec::MissingArtifactError);
  CHECK_THROWS_AS(parse_format("netflix"), dbrec::ConfigError);
}

TEST_CASE("to_implicit keeps ratings above 3 and every distinct check-in") {
  const RawData ratings =
      parse("1::10::4::1\n1::11::3::1\n1::12::5::1\n1::12::5::2\n", RawFormat::kMovieLens);
  const auto pairs = to_implicit(ratings, RawFormat::kMovieLens);
  CHECK(pairs == std::vector<RawPair>{{"1", "10"}, {"1", "12"}});

  const RawData checkins = parse("7\tt1\t0\t0\tL1\n7\tt2\t0\t0\tL1\n7\tt3\t0\t0\tL2\n",
                                 RawFormat::kGowalla);
  CHECK(to_implicit(checkins, RawFormat::kGowalla) ==
        std::vector<RawPair>{{"7", "L1"}, {"7", "L2"}});
}

TEST_CASE("core_filter drops sparse users and items") {
  SUBCASE("dense block survives intact") {
    const auto pairs = crossed(10, 10);
    CHECK(core_filter(pairs, {}) == pairs);
  }
  SUBCASE("user with 4 positives and item with 1 user are removed") {
    auto pairs = crossed(3, 6);                             // 3 users x 6 items
    for (std::size_t i = 0; i < 4; ++i) pairs.push_back({"u9999", padded('i', i)});
    pairs.push_back({padded('u', 0), "i9999"});             // item with a single user
    std::sort(pairs.begin(), pairs.end());
    const auto kept = core_filter(pairs, {});
    CHECK(std::none_of(kept.begin(), kept.end(), [](const RawPair& p) { return p.user == "u9999"; }));
    CHECK(std::none_of(kept.begin(), kept.end(), [](const RawPair& p) { return p.item == "i9999"; }));
    CHECK(kept.size() == 18);
  }
  SUBCASE("fixpoint repeats until stable") {
    // uB (4 positives) goes in the first user pass; that leaves iY with one
    // user, and removing iY leaves uC with 4 positives.
    auto pairs = crossed(2, 8);
    for (std::size_t i = 0; i < 3; ++i) pairs.push_back({"uB", padded('i', i)});
    pairs.push_back({"uB", "iY"});
    for (std::size_t i = 0; i < 4; ++i) pairs.push_back({"uC", padded('i', i)});
    pairs.push_back({"uC", "iY"});
    std::sort(pairs.begin(), pairs.end());
    auto has_user = [](const std::vector<RawPair>& v, const char* u) {
      return std::any_of(v.begin(), v.end(), [&](const RawPair& p) { return p.user == u; });
    };
    const auto once = core_filter(pairs, {5, 2, false});
    CHECK_FALSE(has_user(once, "uB"));
    CHECK(has_user(once, "uC"));
    const auto fixed = core_filter(pairs, {5, 2, true});
    CHECK_FALSE(has_user(fixed, "uC"));
    CHECK(fixed == crossed(2, 8));
  }
  CHECK_THROWS_AS(core_filter(crossed(2, 2), {}), dbrec::ConfigError);
}

TEST_CASE("split uses exact 70/10/20 counts and is seeded") {
  const auto pairs = crossed(50, 20);  // 1000 pairs, every user and item well covered
  const InteractionDataset a = split(pairs, {}, 17);
  CHECK(std::abs(static_cast<long>(a.count(Split::kTrain)) - 700) <= 1);
  CHECK(std::abs(static_cast<long>(a.count(Split::kValid)) - 100) <= 1);
  CHECK(std::abs(static_cast<long>(a.count(Split::kTest)) - 200) <= 1);
  CHECK(a == split(pairs, {}, 17));
  CHECK_FALSE(a == split(pairs, {}, 18));
  CHECK(a.num_users() == 50);
  CHECK(a.num_items() == 20);
}

TEST_CASE("split repair gives every user and item a training interaction") {
  // Tiny users make the random split likely to strand some of them.
  std::vector<RawPair> pairs;
  for (std::size_t u = 0; u < 200; ++u) {
    pairs.push_back({padded('u', u), padded('i', u % 7)});
    pairs.push_back({padded('u', u), padded('i', (u + 3) % 7)});
  }
  std::sort(pairs.begin(), pairs.end());
  const InteractionDataset ds = split(pairs, {0.3, 0.3, 0.4}, 5);
  for (std::uint32_t u = 0; u < ds.num_users(); ++u) CHECK_FALSE(ds.train_items(u).empty());
  std::vector<int> item_train(ds.num_items(), 0);
  for (const auto& x : ds.in_split(Split::kTrain)) ++item_train[x.item];
  for (int c : item_train) CHECK(c > 0);
  CHECK(ds.count(Split::kTrain) + ds.count(Split::kValid) + ds.count(Split::kTest) == 400);
}

TEST_CASE("dataset lookups agree with the interaction list") {
  const InteractionDataset ds = dbrec::testing::ring_dataset(6, 9, 5);
  for (const auto& x : ds.interactions()) {
    CHECK(ds.is_positive(x.user, x.item));
    CHECK(ds.is_train_positive(x.user, x.item) == (x.split == Split::kTrain));
  }
  CHECK_FALSE(ds.is_positive(0, 8));
  CHECK(ds.user_index("u0003") == 3u);
  CHECK_FALSE(ds.item_index("nope").has_value());
  CHECK(ds.positive_items(0).size() == 5);
  CHECK(ds.train_items(0).size() == 3);
}

TEST_CASE("dataset constructor enforces invariants") {
  CHECK_THROWS_AS(InteractionDataset({"u"}, {"i"}, {{0, 0, Split::kTrain}, {0, 0, Split::kTest}}),
                  dbrec::ConfigError);
  CHECK_THROWS_AS(InteractionDataset({"u"}, {"i"}, {{0, 0, Split::kTest}}), dbrec::ConfigError);
  CHECK_THROWS_AS(InteractionDataset({"u"}, {"i"}, {{0, 1, Split::kTrain}}), dbrec::ConfigError);
}

TEST_CASE("dataset container round-trips and detects corruption") {
  dbrec::testing::TempDir dir("dataset");
  const InteractionDataset ds = split(crossed(12, 9), {}, 3);
  save_dataset(ds, dir / "d.bin");
  CHECK(load_dataset(dir / "d.bin") == ds);

  std::string bytes;
  {
    std::ifstream in(dir / "d.bin", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& content) {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out << content;
  };
  write(bytes.substr(0, bytes.size() - 9));
  CHECK_THROWS_AS(load_dataset(dir / "bad.bin"), dbrec::IntegrityError);
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  write(flipped);
  CHECK_THROWS_AS(load_dataset(dir / "bad.bin"), dbrec::IntegrityError);
  CHECK_THROWS_AS(load_dataset(dir / "absent.bin"), dbrec::MissingArtifactError);
}

TEST_CASE("CF negatives avoid training positives") {
  SUBCASE("forced choice") {
    std::vector<Interaction> inter;
    for (std::uint32_t i = 0; i < 9; ++i) inter.push_back({0, i, Split::kTrain});
    inter.push_back({1, 9, Split::kTrain});
    std::vector<std::string> items;
    for (std::size_t i = 0; i < 10; ++i) items.push_back(padded('i', i));
    const InteractionDataset ds({"a", "b"}, items, inter);
    dbrec::Rng rng = dbrec::make_rng({1});
    for (int rep = 0; rep < 20; ++rep) {
      CHECK(sample_cf_negatives(ds, 0, 1, rng) == std::vector<std::uint32_t>{9});
    }
    CHECK_THROWS_AS(sample_cf_negatives(ds, 0, 2, rng), dbrec::SamplingError);
  }
  SUBCASE("five distinct non-positives, reproducible") {
    const InteractionDataset ds = dbrec::testing::ring_dataset(20, 40, 8);
    dbrec::Rng a = dbrec::make_rng({9});
    dbrec::Rng b = dbrec::make_rng({9});
    for (std::uint32_t u = 0; u < 20; ++u) {
      const auto neg = sample_cf_negatives(ds, u, 5, a);
      CHECK(neg == sample_cf_negatives(ds, u, 5, b));
      CHECK(std::set<std::uint32_t>(neg.begin(), neg.end()).size() == 5);
      for (auto i : neg) CHECK_FALSE(ds.is_train_positive(u, i));
    }
  }
}

TEST_CASE("evaluation candidates: 100 distinct, held-out once, no other positives") {
  const InteractionDataset ds = dbrec::testing::ring_dataset(30, 150, 10);
  for (const auto& x : ds.in_split(Split::kTest)) {
    const auto c = build_eval_candidates(ds, x, 99, 5);
    CHECK(c.size() == 100);
    CHECK(std::count(c.begin(), c.end(), x.item) == 1);
    CHECK(std::set<std::uint32_t>(c.begin(), c.end()).size() == 100);
    for (auto i : c) {
      if (i != x.item) CHECK_FALSE(ds.is_positive(x.user, i));
    }
    CHECK(c == build_eval_candidates(ds, x, 99, 5));
  }
  CHECK_THROWS_AS(build_eval_candidates(ds, {0, 100, Split::kTest}, 99, 5), dbrec::ProtocolError);
}

TEST_CASE("synthetic generators are seeded and sized") {
  const auto blocks = generate_planted_blocks({});
  CHECK(blocks.user_block.size() == 200);
  CHECK(blocks.item_block.size() == 300);
  // Within-block density is far above cross-block density.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
  for (const auto& p : blocks.pairs) {
    const auto u = std::stoul(p.user.substr(1));
    const auto i = std::stoul(p.item.substr(1));
    ++counts[{blocks.user_block[u], blocks.item_block[i]}];
  }
  CHECK(counts[{0, 0}] > 5 * counts[{0, 1}]);
  CHECK(counts[{1, 1}] > 5 * counts[{1, 0}]);
  CHECK(generate_planted_blocks({}).pairs == blocks.pairs);

  SyntheticRatingsConfig cfg;
  cfg.num_users = 60;
  cfg.num_items = 400;
  cfg.target_ratings = 3000;
  const auto ratings = generate_synthetic_ratings(cfg);
  CHECK(ratings.size() >= 2500);
  CHECK(ratings.size() <= 3500);
  for (const auto& r : ratings) {
    CHECK(r.rating >= 1.0);
    CHECK(r.rating <= 5.0);
  }
  const auto again = generate_synthetic_ratings(cfg);
  CHECK(std::equal(ratings.begin(), ratings.end(), again.begin(), again.end(),
                   [](const RawRecord& a, const RawRecord& b) {
                     return a.user == b.user && a.item == b.item && a.rating == b.rating;
                   }));
}
