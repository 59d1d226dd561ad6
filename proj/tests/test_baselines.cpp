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

#include <random>

#include "aw2v/baselines.hpp"
#include "aw2v/errors.hpp"
#include "doctest.h"
#include "support/oracles.hpp"
#include "support/testing.hpp"

using namespace aw2v;
using aw2v::testing::random_matrix;

TEST_CASE("one segment is the global frame mean") {
  std::mt19937_64 rng(1);
  const FeatureSequence x(random_matrix(7, 3, rng));
  const NaiveEmbedding e = naive_encode(x, 1);
  CHECK(e.values.size() == 3);
  CHECK(e.values.isApprox(x.frames().colwise().mean().transpose(), 1e-15));
}

TEST_CASE("singleton segments flatten the input") {
  std::mt19937_64 rng(2);
  const Matrix m = random_matrix(4, 3, rng);
  const NaiveEmbedding e = naive_encode(FeatureSequence(m), 4);
  for (Index t = 0; t < 4; ++t) {
    CHECK(e.values.segment(3 * t, 3) == m.row(t).transpose());
  }
}

TEST_CASE("floor partition of six frames into four segments") {
  Matrix m(6, 1);
  m << 1, 2, 3, 4, 5, 6;
  const NaiveEmbedding e = naive_encode(FeatureSequence(m), 4);
  REQUIRE(e.values.size() == 4);
  CHECK(e.values[0] == 1.0);
  CHECK(e.values[1] == 2.5);
  CHECK(e.values[2] == 4.0);
  CHECK(e.values[3] == 5.5);
}

TEST_CASE("naive embedding width is D*m even when T < m") {
  std::mt19937_64 rng(3);
  const Matrix m = random_matrix(2, 13, rng);
  for (int segments : {4, 6, 8}) {
    const NaiveEmbedding e = naive_encode(FeatureSequence(m), segments);
    CHECK(e.values.size() == 13 * segments);
    // T=2 leaves all but two segments empty.
    Index nonzero_blocks = 0;
    for (int s = 0; s < segments; ++s) {
      if (!e.values.segment(13 * s, 13).isZero(0.0)) ++nonzero_blocks;
    }
    CHECK(nonzero_blocks == 2);
  }
  CHECK_THROWS_AS(naive_encode(FeatureSequence(m), 0), DimensionError);
}

TEST_CASE("m = T reproduces the flattened input for random T") {
  std::mt19937_64 rng(4);
  for (Index length = 1; length <= 12; ++length) {
    const Matrix m = random_matrix(length, 2, rng);
    const NaiveEmbedding e = naive_encode(FeatureSequence(m), static_cast<int>(length));
    Matrix row_major = m.transpose();
    CHECK(e.values == Eigen::Map<const Vector>(row_major.data(), row_major.size()));
  }
}

TEST_CASE("DTW basics") {
  std::mt19937_64 rng(5);
  const FeatureSequence a(random_matrix(5, 3, rng));
  CHECK(dtw_distance(a, a) == 0.0);
  const FeatureSequence p(random_matrix(1, 3, rng));
  const FeatureSequence q(random_matrix(1, 3, rng));
  CHECK(dtw_distance(p, q) == (p.frames().row(0) - q.frames().row(0)).norm());
  CHECK_THROWS_AS(dtw_distance(a, FeatureSequence(Matrix::Ones(2, 2))), DimensionError);
}

TEST_CASE("DTW equals exhaustive path enumeration") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> len(1, 5), dim(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = dim(rng);
    const FeatureSequence a(random_matrix(len(rng), d, rng));
    const FeatureSequence b(random_matrix(len(rng), d, rng));
    const double oracle = aw2v::testing::dtw_by_enumeration(a, b);
    const DtwAlignment al = dtw_align(a, b);
    CHECK(dtw_distance(a, b) == oracle);
    CHECK(al.distance == oracle);
    CHECK(aw2v::testing::path_cost(a, b, al.path) == al.distance);
  }
}

TEST_CASE("DTW path is monotone and spans both sequences") {
  std::mt19937_64 rng(7);
  const FeatureSequence a(random_matrix(6, 2, rng));
  const FeatureSequence b(random_matrix(4, 2, rng));
  const auto path = dtw_align(a, b).path;
  REQUIRE(!path.empty());
  CHECK(path.front() == std::make_pair(Index{0}, Index{0}));
  CHECK(path.back() == std::make_pair(Index{5}, Index{3}));
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Index di = path[k].first - path[k - 1].first;
    const Index dj = path[k].second - path[k - 1].second;
    CHECK((di == 0 || di == 1));
    CHECK((dj == 0 || dj == 1));
    CHECK(di + dj >= 1);
  }
}

TEST_CASE("DTW is symmetric, non-negative and bounded by the diagonal") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureSequence a(random_matrix(len(rng), 3, rng));
    const FeatureSequence b(random_matrix(len(rng), 3, rng));
    const double ab = dtw_distance(a, b);
    CHECK(ab == dtw_distance(b, a));
    CHECK(ab >= 0.0);
    CHECK(dtw_distance(a, a) == 0.0);

    const FeatureSequence c(random_matrix(a.length(), 3, rng));
    double diagonal = 0.0;
    for (Index t = 0; t < a.length(); ++t) diagonal += aw2v::testing::frame_distance(a, t, c, t);
    CHECK(dtw_distance(a, c) <= diagonal);
  }
}

TEST_CASE("normalized DTW divides by the path length") {
  std::mt19937_64 rng(9);
  const FeatureSequence a(random_matrix(5, 2, rng));
  const FeatureSequence b(random_matrix(3, 2, rng));
  const DtwAlignment al = dtw_align(a, b);
  CHECK(dtw_distance(a, b, {.normalize_by_path_length = true}) ==
        al.distance / static_cast<double>(al.path.size()));
}
