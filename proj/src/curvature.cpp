#include "cflat/curvature.hpp"

#include <cmath>
#include <stdexcept>

namespace cflat {

Grid3<Jet> christoffel_jets(const JetMatrix& g) {
  const int d = static_cast<int>(g.rows());
  const JetLayout* L = nullptr;
  for (int i = 0; i < d && !L; ++i)
    for (int j = 0; j < d && !L; ++j) L = g(i, j).layout();
  if (!L) {
    // Constant metric: flat connection.
    Grid3<Jet> gamma(d, d, d);
    for (auto& v : gamma.data()) v = Jet(0.0);
    return gamma;
  }
  if (L->order() < 1)
    throw std::invalid_argument("christoffel: metric jets must carry order >= 1");
  const int out_order = L->order() - 1;

  JetMatrix ginv = inverse_metric(g);
  // Work one order down throughout.
  JetMatrix gv(d, d);
  Grid3<Jet> dg(d, d, d);  // dg(b, c, d) = partial_b g_{cd}
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      gv(i, j) = ginv(i, j).truncated(out_order);
      for (int b = 0; b < d; ++b) dg(b, i, j) = g(i, j).partial(b);
    }

  Grid3<Jet> gamma(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = b; c < d; ++c) {
        Jet acc;
        for (int e = 0; e < d; ++e)
          acc += gv(a, e) * (dg(b, c, e) + dg(c, b, e) - dg(e, b, c));
        acc = Jet(0.5) * acc;
        gamma(a, b, c) = acc;
        gamma(a, c, b) = acc;
      }
  return gamma;
}

Grid3d christoffel(const MetricField& g, const Eigen::VectorXd& p, int order) {
  Grid3<Jet> gj = christoffel_jets(g.eval(p, order));
  const int d = g.dim();
  Grid3d out(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) out(a, b, c) = gj(a, b, c).value();
  return out;
}

CurvatureJets curvature_jets(const MetricField& g, const Eigen::VectorXd& p, int order) {
  if (order < 2) throw std::invalid_argument("curvature: metric order must be >= 2");
  const int d = g.dim();
  CurvatureJets out;
  out.g = g.eval(p, order);
  out.ginv = inverse_metric(out.g);
  out.gamma = christoffel_jets(out.g);

  const int r_order = order - 2;
  Grid4<Jet> riem(d, d, d, d);
  Grid3<Jet> dgamma(d, d * d, d);  // dgamma(c, a*d+b_pair)... flattened below
  // Precompute partials of gamma at order-2.
  Grid4<Jet> dG(d, d, d, d);  // dG(c, a, d_idx, b) = partial_c Gamma^a_{d b}
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a)
      for (int e = 0; e < d; ++e)
        for (int b = 0; b < d; ++b) dG(c, a, e, b) = out.gamma(a, e, b).partial(c);
  Grid3<Jet> gam(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) gam(a, b, c) = out.gamma(a, b, c).truncated(r_order);

  // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
  //           + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd) {
          Jet acc = dG(c, a, dd, b) - dG(dd, a, c, b);
          for (int e = 0; e < d; ++e)
            acc += gam(a, c, e) * gam(e, dd, b) - gam(a, dd, e) * gam(e, c, b);
          riem(a, b, c, dd) = acc;
        }
  out.riemann_up = riem;

  JetMatrix gtr(d, d), gitr(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      gtr(i, j) = out.g(i, j).truncated(r_order);
      gitr(i, j) = out.ginv(i, j).truncated(r_order);
    }

  Grid4<Jet> rlo(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd) {
          Jet acc;
          for (int e = 0; e < d; ++e) acc += gtr(a, e) * riem(e, b, c, dd);
          rlo(a, b, c, dd) = acc;
        }
  out.riemann_lo = rlo;

  out.ricci_lo.resize(d, d);
  for (int b = 0; b < d; ++b)
    for (int dd = 0; dd < d; ++dd) {
      Jet acc;
      for (int a = 0; a < d; ++a) acc += riem(a, b, a, dd);
      out.ricci_lo(b, dd) = acc;
    }
  out.ricci_op.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Jet acc;
      for (int c = 0; c < d; ++c) acc += gitr(a, c) * out.ricci_lo(c, b);
      out.ricci_op(a, b) = acc;
    }
  Jet s;
  for (int a = 0; a < d; ++a) s += out.ricci_op(a, a);
  out.scalar = s;
  return out;
}

namespace {

//! Lowered Schouten tensor as jets (dim >= 3).
JetMatrix schouten_lo_jets(const CurvatureJets& cj) {
  const int d = static_cast<int>(cj.g.rows());
  const int r_order = cj.ricci_lo(0, 0).is_constant() ? 0 : cj.ricci_lo(0, 0).order();
  JetMatrix gtr(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) gtr(i, j) = cj.g(i, j).truncated(r_order);
  JetMatrix L(d, d);
  Jet strace = cj.scalar * Jet(1.0 / (2.0 * (d - 1)));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      L(a, b) = (cj.ricci_lo(a, b) - gtr(a, b) * strace) * Jet(1.0 / (d - 2));
  return L;
}

}  // namespace

CurvatureBundle curvature_bundle(const MetricField& g, const Eigen::VectorXd& p, int order) {
  const int d = g.dim();
  if (order == 0) order = (d == 3) ? 3 : 2;
  CurvatureJets cj = curvature_jets(g, p, order);
  CurvatureBundle out;
  out.point = p;
  out.gamma = Grid3d(d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) out.gamma(a, b, c) = cj.gamma(a, b, c).value();
  out.riemann_up = Grid4d(d, d, d, d);
  out.riemann_lo = Grid4d(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int dd = 0; dd < d; ++dd) {
          out.riemann_up(a, b, c, dd) = cj.riemann_up(a, b, c, dd).value();
          out.riemann_lo(a, b, c, dd) = cj.riemann_lo(a, b, c, dd).value();
        }
  out.ricci_op.resize(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) out.ricci_op(a, b) = cj.ricci_op(a, b).value();
  out.scalar = cj.scalar.value();

  if (d >= 3) {
    JetMatrix Llo = schouten_lo_jets(cj);
    Eigen::MatrixXd gval = value_part(cj.g);
    Eigen::MatrixXd giv = value_part(cj.ginv);
    Eigen::MatrixXd Lval = value_part(Llo);
    out.schouten_op = giv * Lval;

    // (R_L)_{abcd} = L_{cb} g_{da} - g_{db} L_{ca} + g_{cb} L_{da} - L_{db} g_{ca}
    out.r_l_lo = Grid4d(d, d, d, d);
    out.weyl_lo = Grid4d(d, d, d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int dd = 0; dd < d; ++dd) {
            double rl = Lval(c, b) * gval(dd, a) - gval(dd, b) * Lval(c, a) +
                        gval(c, b) * Lval(dd, a) - Lval(dd, b) * gval(c, a);
            out.r_l_lo(a, b, c, dd) = rl;
            out.weyl_lo(a, b, c, dd) = out.riemann_lo(a, b, c, dd) + rl;
          }

    if (d == 3) {
      // C_{abc} = (nabla_c L)_{ab} - (nabla_b L)_{ac}
      Grid3d nablaL(d, d, d);  // (c, a, b) = (nabla_c L)_{ab}
      for (int c = 0; c < d; ++c)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            double acc = Llo(a, b).deriv(c);
            for (int e = 0; e < d; ++e)
              acc -= cj.gamma(e, c, a).value() * Llo(e, b).value() +
                     cj.gamma(e, c, b).value() * Llo(a, e).value();
            nablaL(c, a, b) = acc;
          }
      Grid3d cot(d, d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int c = 0; c < d; ++c) cot(a, b, c) = nablaL(c, a, b) - nablaL(b, a, c);
      out.cotton = cot;
    }
  }
  return out;
}

double sectional_curvature(const CurvatureBundle& cb, const Eigen::MatrixXd& gval,
                           const Eigen::VectorXd& X, const Eigen::VectorXd& Y) {
  const int d = static_cast<int>(gval.rows());
  // K = g(R(X,Y)Y, X) / (|X|^2|Y|^2 - g(X,Y)^2)
  double num = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) num += cb.riemann_lo(a, b, c, e) * X[a] * Y[b] * X[c] * Y[e];
  double xx = X.dot(gval * X), yy = Y.dot(gval * Y), xy = X.dot(gval * Y);
  return num / (xx * yy - xy * xy);
}

Eigen::MatrixXd parallel_transport(const MetricField& g,
                                   const std::vector<Eigen::VectorXd>& waypoints,
                                   const Eigen::MatrixXd& frame, int steps_per_unit) {
  Eigen::MatrixXd M = frame;
  const int d = g.dim();
  auto rhs = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& vel,
                 const Eigen::MatrixXd& F) {
    if (!g.in_domain(x))
      throw std::domain_error("parallel_transport: curve exits chart domain");
    Grid3<Jet> gamma = christoffel_jets(g.eval_jets(seed_coords(x, 1)));
    Eigen::MatrixXd A(d, d);  // A^a_c = Gamma^a_{bc} vel^b
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int b = 0; b < d; ++b) acc += gamma(a, b, c).value() * vel[b];
        A(a, c) = acc;
      }
    return Eigen::MatrixXd(-A * F);
  };
  for (size_t seg = 0; seg + 1 < waypoints.size(); ++seg) {
    Eigen::VectorXd a = waypoints[seg], b = waypoints[seg + 1];
    Eigen::VectorXd delta = b - a;
    double len = delta.norm();
    if (len == 0.0) continue;
    int steps = std::max(1, static_cast<int>(std::ceil(steps_per_unit * len)));
    double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      double t = s * h;
      Eigen::VectorXd x0 = a + t * delta;
      Eigen::VectorXd xh = a + (t + 0.5 * h) * delta;
      Eigen::VectorXd x1 = a + (t + h) * delta;
      Eigen::MatrixXd k1 = rhs(x0, delta, M);
      Eigen::MatrixXd k2 = rhs(xh, delta, M + 0.5 * h * k1);
      Eigen::MatrixXd k3 = rhs(xh, delta, M + 0.5 * h * k2);
      Eigen::MatrixXd k4 = rhs(x1, delta, M + h * k3);
      M += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return M;
}

double sup_norm(const Grid4d& t) { return max_abs(t); }
double sup_norm(const Grid3d& t) { return max_abs(t); }

}  // namespace cflat
