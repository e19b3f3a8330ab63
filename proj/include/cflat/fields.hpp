//! \file fields.hpp
//! \brief Polynomial parameter functions and jet-valued metric fields.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cflat/jet.hpp"

namespace cflat {

//! Polynomial in the coordinate u: c0 + c1 u + ... + cd u^d.
//! Houses the u-dependent parameter functions of the metric families.
class UPoly {
 public:
  UPoly() : coeffs_{0.0} {}
  explicit UPoly(std::vector<double> coeffs);
  static UPoly constant(double c) { return UPoly({c}); }

  const std::vector<double>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const;

  double operator()(double u) const;
  Jet operator()(const Jet& u) const;
  UPoly derivative() const;

 private:
  std::vector<double> coeffs_;
};

//! Sparse multivariate polynomial; used for gauges, perturbations and
//! polynomial coordinate maps.  Monomials are (coefficient, exponents).
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  MultiPoly& add_term(double coef, std::vector<int> exps);
  static MultiPoly variable(int nvars, int i) {
    MultiPoly p(nvars);
    std::vector<int> e(nvars, 0);
    e[i] = 1;
    return p.add_term(1.0, std::move(e));
  }
  static MultiPoly constant(int nvars, double c) {
    return MultiPoly(nvars).add_term(c, std::vector<int>(nvars, 0));
  }

  double operator()(const Eigen::VectorXd& x) const;
  Jet operator()(const JetVector& x) const;
  MultiPoly partial(int i) const;
  bool depends_on(int i) const;

  MultiPoly operator+(const MultiPoly& rhs) const;
  MultiPoly operator*(double s) const;

 private:
  struct Term {
    double coef;
    std::vector<int> exps;
  };
  int nvars_ = 0;
  std::vector<Term> terms_;
};

//! Per-coordinate sampling ranges used by tests and the claims suite.
struct SampleBox {
  std::vector<std::pair<double, double>> range;
  int dim() const { return static_cast<int>(range.size()); }
  Eigen::VectorXd center() const;
};

//! Seeded coordinate jets at a point.
JetVector seed_coords(const Eigen::VectorXd& p, int order);

//! Walker structural metadata attached by the family constructors.
//! split is present for the lambda = 0 families (H = v H1 + H0).
struct WalkerSplit {
  std::function<JetMatrix(const JetVector& x, const Jet& u)> h;   // n x n fiber block
  std::function<JetVector(const JetVector& x, const Jet& u)> A;   // n components
  std::function<Jet(const JetVector& x, const Jet& u)> H1;
  std::function<Jet(const JetVector& x, const Jet& u)> H0;
};

struct WalkerInfo {
  int n = 0;
  bool fiber_depends_on_u = false;
  std::optional<UPoly> lambda;  // set for families with H = lambda(u)(v^2 -+ H0)
  std::optional<WalkerSplit> split;
};

//! A metric as a jet-valued symmetric matrix field over one coordinate chart.
//!
//! The evaluator receives the chart coordinates as jets (in any ambient
//! variable space) and returns the matrix of metric coefficients as jets of
//! the same shape; pullbacks compose evaluators directly.
class MetricField {
 public:
  using Evaluator = std::function<JetMatrix(const JetVector& coords)>;
  using DomainPred = std::function<bool(const Eigen::VectorXd& p)>;

  MetricField(int dim, std::string label, Evaluator eval, DomainPred domain,
              SampleBox box);

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const SampleBox& sample_box() const { return box_; }

  bool in_domain(const Eigen::VectorXd& p) const;
  //! Metric coefficients as jets on arbitrary coordinate jets (no domain check).
  JetMatrix eval_jets(const JetVector& coords) const { return eval_(coords); }
  //! Metric coefficients expanded at a chart point.  Throws std::domain_error
  //! outside the chart.
  JetMatrix eval(const Eigen::VectorXd& p, int order) const;
  Eigen::MatrixXd eval_value(const Eigen::VectorXd& p) const;

  //! (negative, positive) eigenvalue counts at the box center.
  std::pair<int, int> signature() const;

  const std::optional<WalkerInfo>& walker() const { return walker_; }
  void set_walker(WalkerInfo info) { walker_ = std::move(info); }

  //! Uniform draw from the sample box, rejected against the chart domain.
  Eigen::VectorXd sample_point(std::mt19937_64& rng) const;

 private:
  int dim_;
  std::string label_;
  Evaluator eval_;
  DomainPred domain_;
  SampleBox box_;
  std::optional<WalkerInfo> walker_;
};

//! Jet-level inverse of a metric matrix: exact truncated Neumann series
//! around the value-part inverse.  Throws on a singular value part.
JetMatrix inverse_metric(const JetMatrix& g);

//! The conformally rescaled metric e^{2 phi} g on the same chart.
MetricField conformal_scale(const MetricField& g, const MultiPoly& phi);

}  // namespace cflat
