//! \file jet.hpp
//! \brief Dense multivariate truncated Taylor arithmetic (order <= 3).
//!
//! A Jet carries the Taylor coefficients of a scalar function of m variables
//! at a point, truncated at total degree K in {0,1,2,3}.  Coefficients are
//! stored as c_alpha = d^alpha f / alpha!, grouped by degree: value, gradient,
//! symmetric Hessian pairs (i<=j), sorted third-order triples (i<=j<=k).
//! Arithmetic propagates the coefficients exactly (truncated convolution), so
//! derivatives extracted from a Jet are exact up to floating-point rounding.
//!
//! A Jet constructed from a bare double is a "shapeless" constant: it has no
//! layout and combines with any shaped jet by broadcasting.  This makes
//! Eigen::Matrix<Jet,...> usable as a container (zero-initialization yields
//! shapeless zeros that adapt on first contact with shaped operands).

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cflat {

//! Index bookkeeping for jets with a given variable count and order.
//! Instances are interned: jets compare layouts by pointer.
class JetLayout {
 public:
  static const JetLayout* get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(multi_.size()); }

  //! Coefficient slot of the multi-index with the given (sorted) variables.
  int index1(int i) const;
  int index2(int i, int j) const;
  int index3(int i, int j, int k) const;

  int degree(int slot) const { return degree_[slot]; }
  const std::vector<std::uint8_t>& multi(int slot) const { return multi_[slot]; }

  struct MulTerm {
    int a, b, out;
  };
  const std::vector<MulTerm>& mul_terms() const { return mul_; }

  //! Slot of multi(slot) + e_i; only valid when degree(slot) < order.
  int raise(int var, int slot) const { return raise_[var][slot]; }

 private:
  JetLayout(int nvars, int order);

  int nvars_ = 0;
  int order_ = 0;
  std::vector<std::vector<std::uint8_t>> multi_;  // exponent vector per slot
  std::vector<int> degree_;
  std::vector<MulTerm> mul_;
  std::vector<std::vector<int>> raise_;  // [var][slot]
};

class Jet {
 public:
  //! Shapeless zero constant.
  Jet() : layout_(nullptr), c_(1, 0.0) {}
  //! Shapeless constant.
  Jet(double value) : layout_(nullptr), c_(1, value) {}

  //! Jet of the coordinate function x -> x_index at the given point.
  static Jet seed(int index, double value, int order, int nvars);
  static Jet constant(double value) { return Jet(value); }
  //! Shaped zero with the given layout.
  static Jet zero(const JetLayout* layout);

  bool is_constant() const { return layout_ == nullptr; }
  int order() const { return layout_ ? layout_->order() : 0; }
  int nvars() const { return layout_ ? layout_->nvars() : 0; }
  const JetLayout* layout() const { return layout_; }

  double value() const { return c_[0]; }
  //! Partial derivatives (with factorial weights applied).
  double deriv(int i) const;
  double deriv2(int i, int j) const;
  double deriv3(int i, int j, int k) const;
  //! Raw Taylor coefficients c_alpha = d^alpha f / alpha!.
  double coeff(int slot) const { return c_[slot]; }
  double coeff2(int i, int j) const;

  //! d/dx_i as a jet one order lower.  Requires order >= 1.
  Jet partial(int i) const;
  //! Drop coefficients above the given order.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(const Jet& lhs, const Jet& rhs);
  friend Jet operator-(const Jet& x);
  friend Jet operator+(const Jet& x) { return x; }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.layout_ == b.layout_ && a.c_ == b.c_;
  }

  //! Composition with a univariate function given by its Taylor coefficients
  //! at the jet's value part: f(g) with f ~ f0 + f1*w + f2*w^2 + f3*w^3.
  static Jet compose(const Jet& g, double f0, double f1, double f2, double f3);

  friend Jet reciprocal(const Jet& x);
  friend Jet sqrt(const Jet& x);
  friend Jet exp(const Jet& x);
  friend Jet pow_int(const Jet& x, int p);

  friend std::ostream& operator<<(std::ostream& out, const Jet& x);

 private:
  Jet(const JetLayout* layout, std::vector<double> c)
      : layout_(layout), c_(std::move(c)) {}

  const JetLayout* layout_;  // nullptr for shapeless constants
  std::vector<double> c_;
};

// Eigen scalar support (containers, sums, transposes).
inline const Jet& conj(const Jet& x) { return x; }
inline const Jet& real(const Jet& x) { return x; }
inline Jet imag(const Jet&) { return Jet(0.0); }
inline Jet abs2(const Jet& x) { return x * x; }

using JetMatrix = Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic>;
using JetVector = Eigen::Matrix<Jet, Eigen::Dynamic, 1>;

//! Plain matrix product of jet matrices.
JetMatrix jet_matmul(const JetMatrix& a, const JetMatrix& b);

//! Value parts of a jet matrix.
Eigen::MatrixXd value_part(const JetMatrix& m);

}  // namespace cflat

namespace Eigen {
template <>
struct NumTraits<cflat::Jet> : NumTraits<double> {
  using Real = cflat::Jet;
  using NonInteger = cflat::Jet;
  using Nested = cflat::Jet;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 16,
    MulCost = 64,
  };
};
}  // namespace Eigen
