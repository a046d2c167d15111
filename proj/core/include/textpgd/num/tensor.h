// Copyright 2026 The TextPGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXTPGD_NUM_TENSOR_H_
#define TEXTPGD_NUM_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace textpgd {

// Dense row-major tensor of doubles. Rank 1 and 2 are all the network needs;
// rows()/cols() treat a rank-1 tensor as a single row.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<size_t> shape, double fill = 0.0);
  Tensor(std::vector<size_t> shape, std::vector<double> data);

  static Tensor Matrix(size_t rows, size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor Vector(size_t n, double fill = 0.0) { return Tensor({n}, fill); }
  static Tensor ZerosLike(const Tensor& t) { return Tensor(t.shape_, 0.0); }

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  size_t rows() const;
  size_t cols() const;

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& at(size_t r, size_t c) { return data_[r * cols() + c]; }
  double at(size_t r, size_t c) const { return data_[r * cols() + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }
  bool AllFinite() const;
  void Fill(double value);

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

std::string ShapeString(const std::vector<size_t>& shape);

// Throws kShapeMismatch naming `what` when shapes differ.
void CheckSameShape(const Tensor& a, const Tensor& b, const char* what);
// Throws kNumerical naming `what` on any NaN/Inf.
void CheckFinite(const Tensor& t, const char* what);

// C = A * B.
Tensor MatMul(const Tensor& a, const Tensor& b);
// C = A * B^T.
Tensor MatMulTransB(const Tensor& a, const Tensor& b);
// C = A^T * B.
Tensor MatMulTransA(const Tensor& a, const Tensor& b);
// acc += A^T * B, for gradient accumulation.
void AddMatMulTransA(const Tensor& a, const Tensor& b, Tensor& acc);

void AddInPlace(Tensor& acc, const Tensor& x, double scale = 1.0);
// Adds a length-cols vector to every row.
void AddRowVector(Tensor& m, const Tensor& v);
// Sums rows into a length-cols vector accumulator.
void AccumulateColumnSums(const Tensor& m, Tensor& acc);

double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);

// Row-wise numerically stable softmax, in place.
void SoftmaxRowsInPlace(Tensor& m);
void SoftmaxInPlace(std::span<double> v);

}  // namespace textpgd

#endif  // TEXTPGD_NUM_TENSOR_H_
