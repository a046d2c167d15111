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

#include "textpgd/num/tensor.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "textpgd/util/error.h"

namespace textpgd {

namespace {

size_t Product(const std::vector<size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<size_t> shape, double fill)
    : shape_(std::move(shape)), data_(Product(shape_), fill) {}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  Require(Product(shape_) == data_.size(), ErrorCode::kShapeMismatch,
          "tensor data length " + std::to_string(data_.size()) +
              " does not match shape " + ShapeString(shape_));
}

size_t Tensor::rows() const {
  if (shape_.empty()) return 0;
  return shape_.size() == 1 ? 1 : shape_[0];
}

size_t Tensor::cols() const {
  if (shape_.empty()) return 0;
  return shape_.back();
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string ShapeString(const std::vector<size_t>& shape) {
  std::ostringstream out;
  out << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

void CheckSameShape(const Tensor& a, const Tensor& b, const char* what) {
  Require(a.SameShape(b), ErrorCode::kShapeMismatch,
          std::string(what) + ": shape " + ShapeString(a.shape()) + " vs " +
              ShapeString(b.shape()));
}

void CheckFinite(const Tensor& t, const char* what) {
  Require(t.AllFinite(), ErrorCode::kNumerical,
          std::string("numerical overflow in ") + what);
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  Require(a.cols() == b.rows(), ErrorCode::kShapeMismatch,
          "MatMul " + ShapeString(a.shape()) + " * " + ShapeString(b.shape()));
  const size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor c = Tensor::Matrix(n, m);
  for (size_t i = 0; i < n; ++i) {
    double* ci = c.data().data() + i * m;
    for (size_t p = 0; p < k; ++p) {
      const double aip = a.data()[i * k + p];
      if (aip == 0.0) continue;
      const double* bp = b.data().data() + p * m;
      for (size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
    }
  }
  return c;
}

Tensor MatMulTransB(const Tensor& a, const Tensor& b) {
  Require(a.cols() == b.cols(), ErrorCode::kShapeMismatch,
          "MatMulTransB " + ShapeString(a.shape()) + " * " +
              ShapeString(b.shape()) + "^T");
  const size_t n = a.rows(), k = a.cols(), m = b.rows();
  Tensor c = Tensor::Matrix(n, m);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) c.at(i, j) = Dot(a.row(i), b.row(j));
  }
  (void)k;
  return c;
}

Tensor MatMulTransA(const Tensor& a, const Tensor& b) {
  Tensor c = Tensor::Matrix(a.cols(), b.cols());
  AddMatMulTransA(a, b, c);
  return c;
}

void AddMatMulTransA(const Tensor& a, const Tensor& b, Tensor& acc) {
  Require(a.rows() == b.rows() && acc.rows() == a.cols() &&
              acc.cols() == b.cols(),
          ErrorCode::kShapeMismatch,
          "MatMulTransA " + ShapeString(a.shape()) + "^T * " +
              ShapeString(b.shape()));
  const size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (size_t r = 0; r < n; ++r) {
    const double* ar = a.data().data() + r * k;
    const double* br = b.data().data() + r * m;
    for (size_t i = 0; i < k; ++i) {
      const double ari = ar[i];
      if (ari == 0.0) continue;
      double* ci = acc.data().data() + i * m;
      for (size_t j = 0; j < m; ++j) ci[j] += ari * br[j];
    }
  }
}

void AddInPlace(Tensor& acc, const Tensor& x, double scale) {
  CheckSameShape(acc, x, "AddInPlace");
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += scale * x[i];
}

void AddRowVector(Tensor& m, const Tensor& v) {
  Require(v.size() == m.cols(), ErrorCode::kShapeMismatch, "AddRowVector");
  for (size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (size_t j = 0; j < row.size(); ++j) row[j] += v[j];
  }
}

void AccumulateColumnSums(const Tensor& m, Tensor& acc) {
  Require(acc.size() == m.cols(), ErrorCode::kShapeMismatch,
          "AccumulateColumnSums");
  for (size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (size_t j = 0; j < row.size(); ++j) acc[j] += row[j];
  }
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

void SoftmaxInPlace(std::span<double> v) {
  if (v.empty()) return;
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

void SoftmaxRowsInPlace(Tensor& m) {
  for (size_t r = 0; r < m.rows(); ++r) SoftmaxInPlace(m.row(r));
}

}  // namespace textpgd
