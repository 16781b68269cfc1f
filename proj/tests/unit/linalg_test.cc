// Copyright 2026 The NeuroView Authors.
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

#include "neuroview/linalg.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

namespace nv {
namespace {

TEST(MatrixTest, InitializerListAndShape) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 0), 4.0);
  EXPECT_EQ(m.shape_string(), "2x3");
  EXPECT_THROW((Matrix{{1, 2}, {3}}), std::invalid_argument);
}

TEST(MatrixTest, TransposeAndIdentity) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  const Matrix t = m.transposed();
  EXPECT_EQ(t, (Matrix{{1, 4}, {2, 5}, {3, 6}}));
  EXPECT_EQ(t.transposed(), m);
  EXPECT_EQ(Matrix::identity(2), (Matrix{{1, 0}, {0, 1}}));
}

TEST(MatvecTest, HandComputed) {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(matvec(m, Vector{1, 0, -1}), (Vector{-2, -2}));
  Vector out{10, 20};
  matvec_accumulate(m, Vector{1, 1, 1}.span(), out.span());
  EXPECT_EQ(out, (Vector{16, 35}));
  Vector back{1, 1, 1};
  matvec_transposed_accumulate(m, Vector{1, -1}.span(), back.span());
  EXPECT_EQ(back, (Vector{-2, -2, -2}));
}

TEST(MatvecTest, ShapeMismatchNamesShapes) {
  const Matrix m(2, 3);
  try {
    matvec(m, Vector(2));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("2x3"), std::string::npos) << e.what();
  }
}

TEST(MatvecTest, TransposeAgreesWithTransposedMatvec) {
  Matrix m(4, 3);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std::sin(1.0 + i);
  const Vector v{0.5, -1.5, 2.0, 0.25};
  Vector out(3);
  matvec_transposed_accumulate(m, v.span(), out.span());
  const Vector ref = matvec(m.transposed(), v);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(out[i], ref[i], 1e-15);
}

TEST(VectorOpsTest, OuterConcatSlice) {
  Matrix m(2, 2);
  add_outer(m, Vector{1, 2}.span(), Vector{3, 4}.span());
  EXPECT_EQ(m, (Matrix{{3, 4}, {6, 8}}));
  const Vector c = concat({Vector{1}, Vector{}, Vector{2, 3}});
  EXPECT_EQ(c, (Vector{1, 2, 3}));
  EXPECT_EQ(slice(c, 1, 2), (Vector{2, 3}));
  EXPECT_THROW(slice(c, 2, 2), std::out_of_range);
  EXPECT_EQ(add(Vector{1, 2}, Vector{3, 4}), (Vector{4, 6}));
  EXPECT_THROW(add(Vector{1}, Vector{1, 2}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(dot(Vector{1, 2, 3}.span(), Vector{4, 5, 6}.span()), 32.0);
  EXPECT_DOUBLE_EQ(norm2(Vector{3, 4}.span()), 5.0);
  EXPECT_DOUBLE_EQ(max_abs(Vector{1, -7, 3}.span()), 7.0);
  EXPECT_EQ(elementwise(Vector{-1, 2}, [](double x) { return x * x; }), (Vector{1, 4}));
}

TEST(ActivationTest, SigmoidIsStableAndSymmetric) {
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_EQ(sigmoid(1000.0), 1.0);
  EXPECT_EQ(sigmoid(-1000.0), 0.0);
  EXPECT_FALSE(std::isnan(sigmoid(-std::numeric_limits<double>::max())));
  for (double x : {0.1, 1.0, 3.7, 20.0}) {
    EXPECT_NEAR(sigmoid(x) + sigmoid(-x), 1.0, 1e-15);
    EXPECT_NEAR(sigmoid(x), 1.0 / (1.0 + std::exp(-x)), 1e-15);
  }
  EXPECT_EQ(relu(-2.0), 0.0);
  EXPECT_EQ(relu(2.5), 2.5);
  EXPECT_EQ(relu(0.0), 0.0);
}

}  // namespace
}  // namespace nv
