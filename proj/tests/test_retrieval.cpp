// Copyright 2026 The aw2v Authors.
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
#include <random>

#include "aw2v/errors.hpp"
#include "aw2v/retrieval.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/testing.hpp"

using namespace aw2v;
using aw2v::testing::random_matrix;
using aw2v::testing::random_vector;
using aw2v::testing::TempDir;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

EmbeddingArchive three_points() {
  EmbeddingArchive archive(2);
  archive.add({"a", "x", vec2(1, 0)});
  archive.add({"b", "y", vec2(0, 1)});
  archive.add({"c", "z", vec2(-1, 0)});
  return archive;
}

Dataset toy_dataset(std::mt19937_64& rng, int n, Index dim) {
  Dataset d;
  std::uniform_int_distribution<int> len(2, 6);
  for (int k = 0; k < n; ++k) {
    d.add({.id = "s" + std::to_string(k), .word = "w" + std::to_string(k % 3), .phonemes = {},
           .split = Split::kTest, .features = FeatureSequence(random_matrix(len(rng), dim, rng))});
  }
  return d;
}

std::vector<std::string> ids(const RankedResult& r) {
  std::vector<std::string> out;
  for (const auto& item : r) out.push_back(item.id);
  return out;
}

}  // namespace

TEST_CASE("cosine similarity reference values") {
  const Vector u = vec2(3, 4);
  CHECK(cosine_similarity(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(vec2(1, 0), vec2(0, 5)) == 0.0);
  CHECK(cosine_similarity(u, -u) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity(Vector::Zero(2), u) == 0.0);
  CHECK(cosine_similarity(Vector::Zero(2), Vector::Zero(2)) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(u, Vector::Ones(3)), DimensionError);
}

TEST_CASE("rank orders by cosine with exclusion and truncation") {
  const EmbeddingArchive archive = three_points();
  const RankedResult all = rank(vec2(1, 0), archive);
  REQUIRE(all.size() == 3);
  CHECK(ids(all) == std::vector<std::string>{"a", "b", "c"});
  CHECK(all[0].score == doctest::Approx(1.0));
  CHECK(all[1].score == 0.0);
  CHECK(all[2].score == doctest::Approx(-1.0));

  CHECK(ids(rank(vec2(1, 0), archive, {.exclude_id = "a", .top_k = {}})) ==
        std::vector<std::string>{"b", "c"});
  CHECK(ids(rank(vec2(1, 0), archive, {.exclude_id = {}, .top_k = 1})) ==
        std::vector<std::string>{"a"});
  CHECK_THROWS_AS(rank(Vector::Ones(3), archive), DimensionError);
}

TEST_CASE("ties break by ascending id") {
  EmbeddingArchive archive(2);
  archive.add({"m", "x", vec2(1, 1)});
  archive.add({"b", "x", vec2(2, 2)});
  archive.add({"z", "x", vec2(0, 0)});
  archive.add({"a", "x", vec2(0, 0)});
  CHECK(ids(rank(vec2(1, 1), archive)) == std::vector<std::string>{"b", "m", "a", "z"});
}

TEST_CASE("ranking order is invariant to query scale and excludes the query") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lambda(0.01, 100.0);
  for (int trial = 0; trial < 30; ++trial) {
    EmbeddingArchive archive(4);
    for (int k = 0; k < 25; ++k) {
      archive.add({"e" + std::to_string(k), "w", random_vector(4, rng)});
    }
    const Vector q = random_vector(4, rng);
    const std::string excluded = "e" + std::to_string(trial % 25);
    const RankedResult base = rank(q, archive, {.exclude_id = excluded, .top_k = {}});
    const RankedResult scaled = rank(lambda(rng) * q, archive, {.exclude_id = excluded, .top_k = {}});
    CHECK(ids(base) == ids(scaled));
    CHECK(base.size() == 24);
    CHECK(std::none_of(base.begin(), base.end(),
                       [&](const RankedItem& r) { return r.id == excluded; }));
    CHECK(std::is_sorted(base.begin(), base.end(), ranks_before));
    CHECK(rank(q, archive) == rank(q, archive));
  }
}

TEST_CASE("build_archive encodes every record in manifest order") {
  std::mt19937_64 rng(13);
  const Dataset d = toy_dataset(rng, 3, 2);
  const SegmentEncoder ne = naive_encoder(2, 3);
  const EmbeddingArchive archive = build_archive(ne, d);
  REQUIRE(archive.size() == 3);
  CHECK(archive.dim() == 6);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(archive.entries()[k].id == d.records()[k].id);
    CHECK(archive.entries()[k].word == d.records()[k].word);
    CHECK(archive.entries()[k].embedding == naive_encode(d.records()[k].features, 3).values);
  }
  CHECK(build_archive(ne, d) == archive);

  const ModelParams params = init_params(2, 5, 1);
  const EmbeddingArchive sa = build_archive(autoencoder_encoder(params), d);
  CHECK(sa.dim() == 5);
  CHECK(sa.entries()[1].embedding == encode(params, d.records()[1].features));
}

TEST_CASE("encoder failure names the record") {
  std::mt19937_64 rng(14);
  const Dataset d = toy_dataset(rng, 4, 2);
  SegmentEncoder failing{2, [](const FeatureSequence& x) -> Vector {
                           if (x.length() > 0) throw Error("boom");
                           return Vector::Zero(2);
                         }};
  try {
    build_archive(failing, d);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'s0'") != std::string::npos);
  }
}

TEST_CASE("DTW ranking puts an identical segment first") {
  std::mt19937_64 rng(15);
  const Dataset d = toy_dataset(rng, 4, 3);
  const FeatureSequence query = d.records()[2].features;
  const RankedResult r = rank_dtw(query, d);
  REQUIRE(r.size() == 4);
  CHECK(r[0].id == "s2");
  CHECK(r[0].score == 0.0);
  const RankedResult excluded = rank_dtw(query, d, {.exclude_id = "s2", .top_k = {}});
  CHECK(excluded.size() == 3);
  const auto all_ids = ids(r);
  CHECK(ids(excluded) == std::vector<std::string>(all_ids.begin() + 1, all_ids.end()));
}

TEST_CASE("DTW ranking agrees with the enumeration oracle") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = toy_dataset(rng, 4, 2);
    const FeatureSequence query(random_matrix(3, 2, rng));
    RankedResult oracle;
    for (const auto& rec : d.records()) {
      oracle.push_back({rec.id, -aw2v::testing::dtw_by_enumeration(query, rec.features)});
    }
    std::sort(oracle.begin(), oracle.end(), ranks_before);
    CHECK(rank_dtw(query, d) == oracle);
  }
}

TEST_CASE("archive CSV round-trips exactly") {
  TempDir dir;
  std::mt19937_64 rng(17);
  EmbeddingArchive archive(3);
  for (int k = 0; k < 5; ++k) archive.add({"id" + std::to_string(k), "w", random_vector(3, rng)});
  write_archive(archive, dir / "a.csv");
  CHECK(aw2v::testing::slurp(dir / "a.csv").starts_with("id,word,z0,z1,z2\n"));
  CHECK(read_archive(dir / "a.csv") == archive);
}

TEST_CASE("malformed archives are rejected") {
  TempDir dir;
  aw2v::testing::spit(dir / "bad_header.csv", "id,label,z0\na,b,1\n");
  CHECK_THROWS_AS(read_archive(dir / "bad_header.csv"), FormatError);
  aw2v::testing::spit(dir / "short.csv", "id,word,z0,z1\na,b,1\n");
  CHECK_THROWS_AS(read_archive(dir / "short.csv"), DimensionError);
  aw2v::testing::spit(dir / "dup.csv", "id,word,z0\na,b,1\na,b,2\n");
  CHECK_THROWS_AS(read_archive(dir / "dup.csv"), FormatError);
  aw2v::testing::spit(dir / "nan.csv", "id,word,z0\na,b,x\n");
  CHECK_THROWS_AS(read_archive(dir / "nan.csv"), FormatError);
}
