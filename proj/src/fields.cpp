#include "cflat/fields.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cflat {

UPoly::UPoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

bool UPoly::is_zero() const {
  for (double c : coeffs_)
    if (c != 0.0) return false;
  return true;
}

double UPoly::operator()(double u) const {
  double acc = 0.0;
  for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * u + coeffs_[i];
  return acc;
}

Jet UPoly::operator()(const Jet& u) const {
  Jet acc(0.0);
  for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * u + Jet(coeffs_[i]);
  return acc;
}

UPoly UPoly::derivative() const {
  if (coeffs_.size() <= 1) return UPoly({0.0});
  std::vector<double> d(coeffs_.size() - 1);
  for (size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
  return UPoly(std::move(d));
}

MultiPoly& MultiPoly::add_term(double coef, std::vector<int> exps) {
  if (static_cast<int>(exps.size()) != nvars_)
    throw std::invalid_argument("MultiPoly: exponent list size mismatch");
  terms_.push_back({coef, std::move(exps)});
  return *this;
}

double MultiPoly::operator()(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double m = t.coef;
    for (int v = 0; v < nvars_; ++v)
      for (int e = 0; e < t.exps[v]; ++e) m *= x[v];
    acc += m;
  }
  return acc;
}

Jet MultiPoly::operator()(const JetVector& x) const {
  Jet acc(0.0);
  for (const auto& t : terms_) {
    Jet m(t.coef);
    for (int v = 0; v < nvars_; ++v)
      for (int e = 0; e < t.exps[v]; ++e) m = m * x[v];
    acc += m;
  }
  return acc;
}

MultiPoly MultiPoly::partial(int i) const {
  MultiPoly out(nvars_);
  for (const auto& t : terms_) {
    if (t.exps[i] == 0) continue;
    std::vector<int> e = t.exps;
    e[i] -= 1;
    out.add_term(t.coef * t.exps[i], std::move(e));
  }
  return out;
}

bool MultiPoly::depends_on(int i) const {
  for (const auto& t : terms_)
    if (t.exps[i] > 0 && t.coef != 0.0) return true;
  return false;
}

MultiPoly MultiPoly::operator+(const MultiPoly& rhs) const {
  MultiPoly out = *this;
  for (const auto& t : rhs.terms_) out.add_term(t.coef, t.exps);
  return out;
}

MultiPoly MultiPoly::operator*(double s) const {
  MultiPoly out = *this;
  for (auto& t : out.terms_) t.coef *= s;
  return out;
}

Eigen::VectorXd SampleBox::center() const {
  Eigen::VectorXd c(dim());
  for (int i = 0; i < dim(); ++i) c[i] = 0.5 * (range[i].first + range[i].second);
  return c;
}

JetVector seed_coords(const Eigen::VectorXd& p, int order) {
  JetVector out(p.size());
  for (int i = 0; i < p.size(); ++i)
    out[i] = Jet::seed(i, p[i], order, static_cast<int>(p.size()));
  return out;
}

MetricField::MetricField(int dim, std::string label, Evaluator eval, DomainPred domain,
                         SampleBox box)
    : dim_(dim),
      label_(std::move(label)),
      eval_(std::move(eval)),
      domain_(std::move(domain)),
      box_(std::move(box)) {
  if (box_.dim() != dim_) throw std::invalid_argument("MetricField: sample box dim mismatch");
}

bool MetricField::in_domain(const Eigen::VectorXd& p) const {
  if (p.size() != dim_) return false;
  return domain_ ? domain_(p) : true;
}

JetMatrix MetricField::eval(const Eigen::VectorXd& p, int order) const {
  if (!in_domain(p))
    throw std::domain_error("MetricField(" + label_ + "): point outside chart domain");
  return eval_(seed_coords(p, order));
}

Eigen::MatrixXd MetricField::eval_value(const Eigen::VectorXd& p) const {
  return value_part(eval(p, 0));
}

std::pair<int, int> MetricField::signature() const {
  Eigen::MatrixXd g = eval_value(box_.center());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  int neg = 0, pos = 0;
  for (int i = 0; i < dim_; ++i) (es.eigenvalues()[i] < 0 ? neg : pos)++;
  return {neg, pos};
}

Eigen::VectorXd MetricField::sample_point(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd p(dim_);
    for (int i = 0; i < dim_; ++i) {
      auto [lo, hi] = box_.range[i];
      p[i] = lo + (hi - lo) * unit(rng);
    }
    if (in_domain(p)) return p;
  }
  throw std::runtime_error("MetricField(" + label_ + "): sampling failed to hit the chart");
}

JetMatrix inverse_metric(const JetMatrix& g) {
  const int d = static_cast<int>(g.rows());
  Eigen::MatrixXd g0 = value_part(g);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g0);
  if (!lu.isInvertible()) throw std::domain_error("inverse_metric: singular value part");
  Eigen::MatrixXd inv0 = lu.inverse();

  // Find the jet order; a matrix of pure constants inverts at order 0.
  const JetLayout* L = nullptr;
  for (int i = 0; i < d && !L; ++i)
    for (int j = 0; j < d && !L; ++j) L = g(i, j).layout();
  JetMatrix out(d, d);
  if (L == nullptr || L->order() == 0) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j) = Jet(inv0(i, j));
    return out;
  }

  // g = g0 + N with N carrying no constant term; then
  // g^{-1} = sum_{k<=K} (-g0^{-1} N)^k g0^{-1} exactly in the truncated algebra.
  JetMatrix m(d, d);  // -g0^{-1} N
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Jet acc;
      for (int k = 0; k < d; ++k) {
        Jet n = g(k, j) - Jet(g0(k, j));
        acc += Jet(-inv0(i, k)) * n;
      }
      m(i, j) = acc;
    }
  JetMatrix series(d, d);  // I + m + m^2 + ... + m^K
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) series(i, j) = Jet(i == j ? 1.0 : 0.0);
  JetMatrix power = m;
  for (int k = 1; k <= L->order(); ++k) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) series(i, j) += power(i, j);
    if (k < L->order()) power = jet_matmul(power, m);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Jet acc;
      for (int k = 0; k < d; ++k) acc += series(i, k) * Jet(inv0(k, j));
      out(i, j) = acc;
    }
  return out;
}

MetricField conformal_scale(const MetricField& g, const MultiPoly& phi) {
  if (phi.nvars() != g.dim())
    throw std::invalid_argument("conformal_scale: phi variable count mismatch");
  auto base = g;
  auto eval = [base, phi](const JetVector& coords) {
    JetMatrix m = base.eval_jets(coords);
    Jet factor = exp(Jet(2.0) * phi(coords));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m(i, j) = m(i, j) * factor;
    return m;
  };
  MetricField out(g.dim(), g.label() + "*conf", eval,
                  [base](const Eigen::VectorXd& p) { return base.in_domain(p); },
                  g.sample_box());
  return out;
}

}  // namespace cflat
