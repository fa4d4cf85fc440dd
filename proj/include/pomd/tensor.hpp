#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pomd {

/// Dense row-major grids for time-indexed tabular quantities.
/// Axis order is (h, s, a, s') with the last axis contiguous, so row()
/// hands out a span over the innermost dimension.

template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int n0, int n1, T fill = T{})
      : n0_(n0), n1_(n1), v_(static_cast<std::size_t>(n0) * n1, fill) {}

  T& operator()(int i, int j) { return v_[idx(i, j)]; }
  const T& operator()(int i, int j) const { return v_[idx(i, j)]; }

  std::span<T> row(int i) { return {v_.data() + idx(i, 0), static_cast<std::size_t>(n1_)}; }
  std::span<const T> row(int i) const {
    return {v_.data() + idx(i, 0), static_cast<std::size_t>(n1_)};
  }

  int dim0() const { return n0_; }
  int dim1() const { return n1_; }
  bool empty() const { return v_.empty(); }
  const std::vector<T>& data() const { return v_; }
  std::vector<T>& data() { return v_; }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n1_ + j; }
  int n0_ = 0, n1_ = 0;
  std::vector<T> v_;
};

template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int n0, int n1, int n2, T fill = T{})
      : n0_(n0), n1_(n1), n2_(n2), v_(static_cast<std::size_t>(n0) * n1 * n2, fill) {}

  T& operator()(int i, int j, int k) { return v_[idx(i, j, k)]; }
  const T& operator()(int i, int j, int k) const { return v_[idx(i, j, k)]; }

  std::span<T> row(int i, int j) {
    return {v_.data() + idx(i, j, 0), static_cast<std::size_t>(n2_)};
  }
  std::span<const T> row(int i, int j) const {
    return {v_.data() + idx(i, j, 0), static_cast<std::size_t>(n2_)};
  }

  int dim0() const { return n0_; }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  bool empty() const { return v_.empty(); }
  const std::vector<T>& data() const { return v_; }
  std::vector<T>& data() { return v_; }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n1_ + j) * n2_ + k;
  }
  int n0_ = 0, n1_ = 0, n2_ = 0;
  std::vector<T> v_;
};

template <typename T>
class Grid4 {
 public:
  Grid4() = default;
  Grid4(int n0, int n1, int n2, int n3, T fill = T{})
      : n0_(n0), n1_(n1), n2_(n2), n3_(n3),
        v_(static_cast<std::size_t>(n0) * n1 * n2 * n3, fill) {}

  T& operator()(int i, int j, int k, int l) { return v_[idx(i, j, k, l)]; }
  const T& operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }

  std::span<T> row(int i, int j, int k) {
    return {v_.data() + idx(i, j, k, 0), static_cast<std::size_t>(n3_)};
  }
  std::span<const T> row(int i, int j, int k) const {
    return {v_.data() + idx(i, j, k, 0), static_cast<std::size_t>(n3_)};
  }

  int dim0() const { return n0_; }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }
  bool empty() const { return v_.empty(); }
  const std::vector<T>& data() const { return v_; }
  std::vector<T>& data() { return v_; }

  friend bool operator==(const Grid4&, const Grid4&) = default;

 private:
  std::size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<std::size_t>(i) * n1_ + j) * n2_ + k) * n3_ + l;
  }
  int n0_ = 0, n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<T> v_;
};

using Tensor2 = Grid2<double>;
using Tensor3 = Grid3<double>;
using Tensor4 = Grid4<double>;
using Count3 = Grid3<std::int64_t>;
using Count4 = Grid4<std::int64_t>;

}  // namespace pomd
