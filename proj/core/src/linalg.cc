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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nv {

void Vector::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw std::invalid_argument("matvec: matrix is " + m.shape_string() +
                                " but vector has length " +
                                std::to_string(v.size()));
  }
  Vector out(m.rows());
  matvec_accumulate(m, v.span(), out.span());
  return out;
}

void matvec_accumulate(const Matrix& m, std::span<const double> v,
                       std::span<double> out) {
  const std::size_t cols = m.cols();
  const double* a = m.data();
  for (std::size_t r = 0; r < m.rows(); ++r, a += cols) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += a[c] * v[c];
    out[r] += acc;
  }
}

void matvec_transposed_accumulate(const Matrix& m, std::span<const double> v,
                                  std::span<double> out) {
  const std::size_t cols = m.cols();
  const double* a = m.data();
  for (std::size_t r = 0; r < m.rows(); ++r, a += cols) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) out[c] += a[c] * vr;
  }
}

void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b) {
  const std::size_t cols = m.cols();
  double* p = m.data();
  for (std::size_t r = 0; r < m.rows(); ++r, p += cols) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) p[c] += ar * b[c];
  }
}

Vector elementwise(const Vector& v, const std::function<double(double)>& f) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
  return out;
}

Vector concat(std::span<const Vector> parts) {
  std::vector<double> out;
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  out.reserve(total);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return Vector(std::move(out));
}

Vector concat(std::initializer_list<Vector> parts) {
  return concat(std::span<const Vector>(parts.begin(), parts.size()));
}

Vector slice(const Vector& v, std::size_t offset, std::size_t len) {
  if (offset + len > v.size()) {
    throw std::out_of_range("slice: [" + std::to_string(offset) + ", " +
                            std::to_string(offset + len) +
                            ") exceeds length " + std::to_string(v.size()));
  }
  return Vector(std::vector<double>(v.begin() + offset, v.begin() + offset + len));
}

Vector add(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("add: lengths " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
  }
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sigmoid(double x) {
  // Split by sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace nv
