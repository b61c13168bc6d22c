#include <gtest/gtest.h>

#include "gna/error.hpp"
#include "gna/tensor.hpp"

namespace gna {
namespace {

TEST(Tensor, SizeIsProductOfShape) {
  Tensor t({2, 3, 4}, 1.5);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.rank(), 3u);
  EXPECT_EQ(t.dim(2), 4u);
  for (double v : t.values()) EXPECT_EQ(v, 1.5);
}

TEST(Tensor, DefaultIsSingleZero) {
  Tensor t;
  EXPECT_EQ(t.shape(), Shape{1});
  EXPECT_EQ(t.item(), 0.0);
}

TEST(Tensor, ZeroLengthDimensionRejected) {
  EXPECT_THROW(Tensor(Shape{0}), ShapeError);
  EXPECT_THROW(Tensor(Shape{3, 0}), ShapeError);
  EXPECT_THROW(Tensor(Shape{}), ShapeError);
  EXPECT_THROW(Tensor::vector({}), ShapeError);
}

TEST(Tensor, ValueCountMustMatchShape) {
  EXPECT_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_NO_THROW(Tensor(Shape{2, 2}, std::vector<double>{1, 2, 3, 4}));
}

TEST(Tensor, MatrixLiteralIsRowMajor) {
  const Tensor m = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 0), 4.0);
  EXPECT_EQ(m[5], 6.0);
  EXPECT_EQ(m.row(1)[2], 6.0);
  EXPECT_THROW(Tensor::matrix({{1, 2}, {3}}), ShapeError);
}

TEST(Tensor, RankOneActsAsOneRow) {
  const Tensor v = Tensor::vector({1, 2, 3});
  EXPECT_EQ(v.rows(), 1u);
  EXPECT_EQ(v.cols(), 3u);
}

TEST(Tensor, ItemNeedsOneElement) {
  EXPECT_EQ(Tensor::scalar(2.5).item(), 2.5);
  EXPECT_THROW(Tensor::vector({1, 2}).item(), ShapeError);
}

TEST(Tensor, DimOutOfRange) { EXPECT_THROW(Tensor({2, 2}).dim(2), ShapeError); }

TEST(Tensor, ShapeString) { EXPECT_EQ(Tensor({3, 4}).shape_string(), "[3x4]"); }

TEST(Tensor, EqualityComparesShapeAndValues) {
  EXPECT_EQ(Tensor({2}, 1.0), Tensor::vector({1, 1}));
  EXPECT_NE(Tensor({1, 2}, 1.0), Tensor::vector({1, 1}));
}

}  // namespace
}  // namespace gna
