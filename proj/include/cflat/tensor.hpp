//! \file tensor.hpp
//! \brief Minimal dense rank-3/4 containers templated on scalar.

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace cflat {

template <class T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int n1, int n2, int n3) : n1_(n1), n2_(n2), n3_(n3), v_(std::size_t(n1) * n2 * n3) {}
  T& operator()(int i, int j, int k) { return v_[(std::size_t(i) * n2_ + j) * n3_ + k]; }
  const T& operator()(int i, int j, int k) const {
    return v_[(std::size_t(i) * n2_ + j) * n3_ + k];
  }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }
  const std::vector<T>& data() const { return v_; }
  std::vector<T>& data() { return v_; }

 private:
  int n1_ = 0, n2_ = 0, n3_ = 0;
  std::vector<T> v_;
};

template <class T>
class Grid4 {
 public:
  Grid4() = default;
  Grid4(int n1, int n2, int n3, int n4)
      : n1_(n1), n2_(n2), n3_(n3), n4_(n4), v_(std::size_t(n1) * n2 * n3 * n4) {}
  T& operator()(int i, int j, int k, int l) {
    return v_[((std::size_t(i) * n2_ + j) * n3_ + k) * n4_ + l];
  }
  const T& operator()(int i, int j, int k, int l) const {
    return v_[((std::size_t(i) * n2_ + j) * n3_ + k) * n4_ + l];
  }
  int dim1() const { return n1_; }
  int dim2() const { return n2_; }
  int dim3() const { return n3_; }
  int dim4() const { return n4_; }
  const std::vector<T>& data() const { return v_; }
  std::vector<T>& data() { return v_; }

 private:
  int n1_ = 0, n2_ = 0, n3_ = 0, n4_ = 0;
  std::vector<T> v_;
};

using Grid3d = Grid3<double>;
using Grid4d = Grid4<double>;

template <class G>
double max_abs(const G& g) {
  double m = 0.0;
  for (double v : g.data()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cflat
