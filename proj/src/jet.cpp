#include "cflat/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace cflat {

namespace {

int checked_nvars(int m) {
  if (m < 1 || m > 16) throw std::invalid_argument("jet: nvars out of range [1,16]");
  return m;
}

int checked_order(int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("jet: order out of range [0,3]");
  return k;
}

}  // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  // Enumerate multi-indices by degree block; lower-order layouts are prefixes.
  std::vector<std::uint8_t> mi(nvars, 0);
  multi_.push_back(mi);
  if (order >= 1) {
    for (int i = 0; i < nvars; ++i) {
      std::fill(mi.begin(), mi.end(), 0);
      mi[i] = 1;
      multi_.push_back(mi);
    }
  }
  if (order >= 2) {
    for (int i = 0; i < nvars; ++i)
      for (int j = i; j < nvars; ++j) {
        std::fill(mi.begin(), mi.end(), 0);
        mi[i] += 1;
        mi[j] += 1;
        multi_.push_back(mi);
      }
  }
  if (order >= 3) {
    for (int i = 0; i < nvars; ++i)
      for (int j = i; j < nvars; ++j)
        for (int k = j; k < nvars; ++k) {
          std::fill(mi.begin(), mi.end(), 0);
          mi[i] += 1;
          mi[j] += 1;
          mi[k] += 1;
          multi_.push_back(mi);
        }
  }
  degree_.resize(multi_.size());
  for (size_t s = 0; s < multi_.size(); ++s) {
    int d = 0;
    for (int e : multi_[s]) d += e;
    degree_[s] = d;
  }

  auto slot_of = [&](const std::vector<std::uint8_t>& m) {
    int i = -1, j = -1, k = -1;
    for (int v = 0; v < nvars_; ++v)
      for (int c = 0; c < m[v]; ++c) {
        if (i < 0)
          i = v;
        else if (j < 0)
          j = v;
        else
          k = v;
      }
    if (i < 0) return 0;
    if (j < 0) return index1(i);
    if (k < 0) return index2(i, j);
    return index3(i, j, k);
  };

  // Truncated product: every ordered slot pair whose degrees fit.
  for (int sa = 0; sa < size(); ++sa)
    for (int sb = 0; sb < size(); ++sb) {
      if (degree_[sa] + degree_[sb] > order_) continue;
      std::vector<std::uint8_t> sum(nvars_);
      for (int v = 0; v < nvars_; ++v)
        sum[v] = static_cast<std::uint8_t>(multi_[sa][v] + multi_[sb][v]);
      mul_.push_back({sa, sb, slot_of(sum)});
    }

  raise_.assign(nvars_, std::vector<int>(size(), -1));
  for (int s = 0; s < size(); ++s) {
    if (degree_[s] >= order_) continue;
    for (int v = 0; v < nvars_; ++v) {
      std::vector<std::uint8_t> up = multi_[s];
      up[v] += 1;
      raise_[v][s] = slot_of(up);
    }
  }
}

const JetLayout* JetLayout::get(int nvars, int order) {
  checked_nvars(nvars);
  checked_order(order);
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::unique_ptr<JetLayout>(new JetLayout(nvars, order))).first;
  return it->second.get();
}

int JetLayout::index1(int i) const { return 1 + i; }

int JetLayout::index2(int i, int j) const {
  if (i > j) std::swap(i, j);
  return 1 + nvars_ + i * nvars_ - i * (i - 1) / 2 + (j - i);
}

int JetLayout::index3(int i, int j, int k) const {
  std::array<int, 3> v{i, j, k};
  std::sort(v.begin(), v.end());
  i = v[0];
  j = v[1];
  k = v[2];
  // Triples with first entry < i, then pairs (j,k) within the tail block.
  int base = 1 + nvars_ + nvars_ * (nvars_ + 1) / 2;
  int before = 0;
  for (int t = 0; t < i; ++t) before += (nvars_ - t) * (nvars_ - t + 1) / 2;
  int m = nvars_ - i;
  int jj = j - i, kk = k - i;
  return base + before + jj * m - jj * (jj - 1) / 2 + (kk - jj);
}

Jet Jet::seed(int index, double value, int order, int nvars) {
  if (index < 0 || index >= nvars) throw std::out_of_range("jet seed: index out of range");
  const JetLayout* L = JetLayout::get(nvars, order);
  std::vector<double> c(L->size(), 0.0);
  c[0] = value;
  if (order >= 1) c[L->index1(index)] = 1.0;
  return Jet(L, std::move(c));
}

Jet Jet::zero(const JetLayout* layout) {
  return Jet(layout, std::vector<double>(layout->size(), 0.0));
}

double Jet::deriv(int i) const {
  if (!layout_ || layout_->order() < 1) return 0.0;
  return c_[layout_->index1(i)];
}

double Jet::deriv2(int i, int j) const {
  if (!layout_ || layout_->order() < 2) return 0.0;
  return c_[layout_->index2(i, j)] * (i == j ? 2.0 : 1.0);
}

double Jet::coeff2(int i, int j) const {
  if (!layout_ || layout_->order() < 2) return 0.0;
  return c_[layout_->index2(i, j)];
}

double Jet::deriv3(int i, int j, int k) const {
  if (!layout_ || layout_->order() < 3) return 0.0;
  double fact = 1.0;
  if (i == j && j == k)
    fact = 6.0;
  else if (i == j || j == k || i == k)
    fact = 2.0;
  return c_[layout_->index3(i, j, k)] * fact;
}

Jet Jet::partial(int i) const {
  if (!layout_) return Jet(0.0);
  if (layout_->order() < 1) throw std::logic_error("jet partial: order 0 jet");
  const JetLayout* out = JetLayout::get(layout_->nvars(), layout_->order() - 1);
  std::vector<double> c(out->size());
  for (int s = 0; s < out->size(); ++s) {
    int src = layout_->raise(i, s);
    c[s] = c_[src] * (layout_->multi(s)[i] + 1.0);
  }
  return Jet(out, std::move(c));
}

Jet Jet::truncated(int order) const {
  if (!layout_) return *this;
  checked_order(order);
  if (order >= layout_->order()) return *this;
  const JetLayout* out = JetLayout::get(layout_->nvars(), order);
  return Jet(out, std::vector<double>(c_.begin(), c_.begin() + out->size()));
}

namespace {
[[noreturn]] void layout_mismatch() {
  throw std::invalid_argument("jet: mismatched order/nvars in binary operation");
}
}  // namespace

Jet& Jet::operator+=(const Jet& rhs) {
  if (rhs.layout_ == nullptr) {
    c_[0] += rhs.c_[0];
    return *this;
  }
  if (layout_ == nullptr) {
    double v = c_[0];
    *this = rhs;
    c_[0] += v;
    return *this;
  }
  if (layout_ != rhs.layout_) layout_mismatch();
  for (size_t s = 0; s < c_.size(); ++s) c_[s] += rhs.c_[s];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  if (rhs.layout_ == nullptr) {
    c_[0] -= rhs.c_[0];
    return *this;
  }
  if (layout_ == nullptr) {
    double v = c_[0];
    *this = -rhs;
    c_[0] += v;
    return *this;
  }
  if (layout_ != rhs.layout_) layout_mismatch();
  for (size_t s = 0; s < c_.size(); ++s) c_[s] -= rhs.c_[s];
  return *this;
}

Jet operator-(const Jet& x) {
  Jet out = x;
  for (double& v : out.c_) v = -v;
  return out;
}

Jet operator*(const Jet& lhs, const Jet& rhs) {
  if (lhs.layout_ == nullptr) {
    Jet out = rhs;
    for (double& v : out.c_) v *= lhs.c_[0];
    return out;
  }
  if (rhs.layout_ == nullptr) {
    Jet out = lhs;
    for (double& v : out.c_) v *= rhs.c_[0];
    return out;
  }
  if (lhs.layout_ != rhs.layout_) layout_mismatch();
  const JetLayout* L = lhs.layout_;
  std::vector<double> c(L->size(), 0.0);
  for (const auto& t : L->mul_terms()) c[t.out] += lhs.c_[t.a] * rhs.c_[t.b];
  return Jet(L, std::move(c));
}

Jet& Jet::operator*=(const Jet& rhs) { return *this = *this * rhs; }

Jet Jet::compose(const Jet& g, double f0, double f1, double f2, double f3) {
  if (g.layout_ == nullptr) return Jet(f0);
  // w = g - g0 has no constant term, so the Horner series is exact at K <= 3.
  Jet w = g;
  w.c_[0] = 0.0;
  Jet acc(f3);
  acc = acc * w + Jet(f2);
  acc = acc * w + Jet(f1);
  acc = acc * w + Jet(f0);
  return acc;
}

Jet reciprocal(const Jet& x) {
  double v = x.value();
  if (v == 0.0) throw std::domain_error("jet reciprocal: zero value part");
  if (x.layout_ == nullptr) return Jet(1.0 / v);
  double iv = 1.0 / v;
  return Jet::compose(x, iv, -iv * iv, iv * iv * iv, -iv * iv * iv * iv);
}

Jet operator/(const Jet& lhs, const Jet& rhs) {
  if (rhs.value() == 0.0) throw std::domain_error("jet division: zero value part");
  if (rhs.layout_ == nullptr) {
    // Keep order-0 semantics bit-identical to plain double division.
    Jet out = lhs;
    for (double& v : out.c_) v /= rhs.c_[0];
    return out;
  }
  if (lhs.layout_ == nullptr && rhs.layout_ == nullptr) return Jet(lhs.value() / rhs.value());
  Jet out = lhs * reciprocal(rhs);
  if (out.layout_ != nullptr) out.c_[0] = lhs.value() / rhs.value();
  return out;
}

Jet& Jet::operator/=(const Jet& rhs) { return *this = *this / rhs; }

Jet sqrt(const Jet& x) {
  double v = x.value();
  if (v <= 0.0) throw std::domain_error("jet sqrt: nonpositive value part");
  double s = std::sqrt(v);
  if (x.layout_ == nullptr) return Jet(s);
  return Jet::compose(x, s, 0.5 / s, -1.0 / (8.0 * s * v), 1.0 / (16.0 * s * v * v));
}

Jet exp(const Jet& x) {
  double e = std::exp(x.value());
  if (x.layout_ == nullptr) return Jet(e);
  return Jet::compose(x, e, e, e / 2.0, e / 6.0);
}

Jet pow_int(const Jet& x, int p) {
  if (p < 0) return reciprocal(pow_int(x, -p));
  Jet result(1.0);
  Jet base = x;
  int e = p;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

std::ostream& operator<<(std::ostream& out, const Jet& x) {
  out << "jet(" << x.value();
  if (x.layout_) {
    out << "; m=" << x.nvars() << ", K=" << x.order() << "; [";
    for (size_t s = 1; s < x.c_.size(); ++s) out << (s > 1 ? " " : "") << x.c_[s];
    out << "]";
  }
  out << ")";
  return out;
}

JetMatrix jet_matmul(const JetMatrix& a, const JetMatrix& b) {
  JetMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      Jet acc;
      for (int k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

Eigen::MatrixXd value_part(const JetMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).value();
  return out;
}

}  // namespace cflat
