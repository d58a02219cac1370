// Copyright 2026 The TPGN Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "tpgn/errors.hpp"
#include "tpgn/tensor.hpp"

namespace tpgn {
namespace {

TEST(TensorTest, ShapeAndFill) {
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.dim(1), 3u);
  EXPECT_DOUBLE_EQ(t.at({1, 2}), 1.5);
  EXPECT_THROW(t.dim(2), DimensionError);
}

TEST(TensorTest, ScalarHasRankZero) {
  const Tensor s = Tensor::scalar(4.0);
  EXPECT_EQ(s.rank(), 0u);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s.item(), 4.0);
}

TEST(TensorTest, RejectsWrongValueCount) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
}

TEST(TensorTest, ItemNeedsOneElement) {
  EXPECT_THROW(Tensor::from({1, 2}).item(), ContractError);
}

TEST(TensorTest, CopyOnWrite) {
  Tensor a = Tensor::from({1, 2, 3});
  Tensor b = a;
  b.mutable_values()[0] = 9;
  EXPECT_DOUBLE_EQ(a[0], 1);
  EXPECT_DOUBLE_EQ(b[0], 9);
}

TEST(TensorTest, ReshapedSharesValues) {
  const Tensor a = Tensor::from({1, 2, 3, 4, 5, 6});
  const Tensor r = a.reshaped({2, 3});
  EXPECT_DOUBLE_EQ(r.at({1, 0}), 4);
  EXPECT_THROW(a.reshaped({4, 2}), DimensionError);
}

TEST(TensorTest, AllFinite) {
  EXPECT_TRUE(Tensor::from({1, 2}).all_finite());
  EXPECT_FALSE(Tensor::from({1, std::nan("")}).all_finite());
}

TEST(TensorTest, BitwiseEqualDistinguishesSignedZero) {
  EXPECT_TRUE(bitwise_equal(Tensor::from({0.0}), Tensor::from({0.0})));
  EXPECT_FALSE(bitwise_equal(Tensor::from({0.0}), Tensor::from({-0.0})));
  EXPECT_FALSE(bitwise_equal(Tensor::from({1.0}), Tensor({1, 1}, 1.0)));
}

TEST(TensorTest, PeakBytesTracksAllocations) {
  reset_peak_bytes();
  const std::size_t before = memory_stats().live_bytes;
  {
    Tensor big({1000});
    EXPECT_GE(memory_stats().live_bytes, before + 8000);
  }
  EXPECT_EQ(memory_stats().live_bytes, before);
  EXPECT_GE(memory_stats().peak_bytes, before + 8000);
}

}  // namespace
}  // namespace tpgn
