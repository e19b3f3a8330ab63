#include "cflat/killing.hpp"

#include <cmath>
#include <stdexcept>

#include "cflat/curvature.hpp"

namespace cflat {

namespace {

//! Covariant symmetrized derivative values nabla_i A_j + nabla_j A_i at p.
Eigen::MatrixXd sym_nabla(const MetricField& h, const OneForm& A, const Eigen::VectorXd& p) {
  const int n = h.dim();
  JetVector x = seed_coords(p, 1);
  JetVector Aj = A(x);
  Grid3<Jet> gamma = christoffel_jets(h.eval(p, 2));
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = Aj[j].deriv(i) + Aj[i].deriv(j);
      for (int k = 0; k < n; ++k) acc -= 2.0 * gamma(k, i, j).value() * Aj[k].value();
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

double killing_residual(const MetricField& h, const OneForm& A, const Eigen::VectorXd& p) {
  return sym_nabla(h, A, p).cwiseAbs().maxCoeff();
}

namespace {

OneForm psi_killing_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& f,
                         double chart_sign, double const_sign) {
  const int n = static_cast<int>(b.size());
  if ((f + f.transpose()).norm() > 1e-12)
    throw std::invalid_argument("killing form: f must be skew-symmetric");
  Eigen::VectorXd bv = b;
  Eigen::MatrixXd fm = f;
  return [n, bv, fm, chart_sign, const_sign](const JetVector& x) {
    Jet r2(0.0), bx(0.0);
    for (int i = 0; i < n; ++i) {
      r2 += x[i] * x[i];
      bx += Jet(bv[i]) * x[i];
    }
    Jet denom = Jet(1.0) + Jet(chart_sign) * r2;
    Jet psi = Jet(4.0) * reciprocal(denom * denom);
    JetVector A(n);
    for (int i = 0; i < n; ++i) {
      Jet Xi = x[i] * bx - Jet(0.5 * bv[i]) * r2 + Jet(const_sign * 0.5 * bv[i]);
      for (int k = 0; k < n; ++k) Xi += Jet(fm(i, k)) * x[k];
      A[i] = psi * Xi;
    }
    return A;
  };
}

}  // namespace

OneForm sphere_killing_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& f) {
  return psi_killing_form(b, f, +1.0, +1.0);
}

OneForm lobachevskian_killing_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& f) {
  return psi_killing_form(b, f, -1.0, -1.0);
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)> killing_vector_field(
    const Eigen::VectorXd& b, const Eigen::MatrixXd& f, double const_sign) {
  Eigen::VectorXd bv = b;
  Eigen::MatrixXd fm = f;
  return [bv, fm, const_sign](const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    double r2 = x.squaredNorm();
    double bx = bv.dot(x);
    Eigen::VectorXd X(n);
    for (int i = 0; i < n; ++i)
      X[i] = x[i] * bx - 0.5 * bv[i] * r2 + const_sign * 0.5 * bv[i];
    X += fm * x;
    return X;
  };
}

double conformal_system_residual(const MetricField& h, const OneForm& A,
                                 const Eigen::VectorXd& p) {
  Eigen::MatrixXd sn = sym_nabla(h, A, p);
  const int n = h.dim();
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      res = std::max(res, std::abs(sn(i, j)));
      res = std::max(res, std::abs(0.5 * sn(i, i) - 0.5 * sn(j, j)));
    }
  return res;
}

}  // namespace cflat
