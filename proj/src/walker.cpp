#include "cflat/walker.hpp"

#include <cmath>
#include <stdexcept>

namespace cflat {

namespace {

const WalkerInfo& walker_info(const MetricField& g) {
  if (!g.walker())
    throw std::invalid_argument("walker: metric not constructor-tagged as Walker (" +
                                g.label() + ")");
  return *g.walker();
}

//! (R(Y,Z)W)^a from R^a_{bcd} values.
Eigen::VectorXd curv_apply(const Grid4d& riem_up, const Eigen::VectorXd& Y,
                           const Eigen::VectorXd& Z, const Eigen::VectorXd& W) {
  const int d = static_cast<int>(Y.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  for (int a = 0; a < d; ++a) {
    double acc = 0.0;
    for (int b = 0; b < d; ++b) {
      if (W[b] == 0.0) continue;
      for (int c = 0; c < d; ++c) {
        if (Y[c] == 0.0) continue;
        for (int e = 0; e < d; ++e) acc += riem_up(a, b, c, e) * W[b] * Y[c] * Z[e];
      }
    }
    out[a] = acc;
  }
  return out;
}

}  // namespace

WalkerFrame walker_frame(const MetricField& g, const Eigen::VectorXd& pt) {
  const WalkerInfo& info = walker_info(g);
  const int n = info.n, d = n + 2;
  Eigen::MatrixXd gval = g.eval_value(pt);
  WalkerFrame f;
  f.gval = gval;
  f.p = Eigen::VectorXd::Zero(d);
  f.p[0] = 1.0;
  f.X = Eigen::MatrixXd::Zero(d, n);
  for (int i = 0; i < n; ++i) {
    f.X(1 + i, i) = 1.0;
    f.X(0, i) = -gval(1 + i, d - 1);  // -A_i
  }
  f.q = Eigen::VectorXd::Zero(d);
  f.q[d - 1] = 1.0;
  f.q[0] = -0.5 * gval(d - 1, d - 1);  // -H/2
  f.M.resize(d, d);
  f.M.col(0) = f.p;
  for (int i = 0; i < n; ++i) f.M.col(1 + i) = f.X.col(i);
  f.M.col(d - 1) = f.q;
  return f;
}

MetricField fiber_metric(const MetricField& g, const Eigen::VectorXd& pt) {
  const WalkerInfo& info = walker_info(g);
  const int n = info.n, d = n + 2;
  const double v0 = pt[0], u0 = pt[d - 1];
  MetricField base = g;
  auto eval = [base, n, v0, u0](const JetVector& x) {
    JetVector full(n + 2);
    full[0] = Jet(v0);
    for (int i = 0; i < n; ++i) full[1 + i] = x[i];
    full[n + 1] = Jet(u0);
    JetMatrix m = base.eval_jets(full);
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = m(1 + i, 1 + j);
    return h;
  };
  auto domain = [base, n, v0, u0](const Eigen::VectorXd& x) {
    Eigen::VectorXd full(n + 2);
    full[0] = v0;
    full.segment(1, n) = x;
    full[n + 1] = u0;
    return base.in_domain(full);
  };
  SampleBox box;
  for (int i = 0; i < n; ++i) box.range.push_back(g.sample_box().range[1 + i]);
  return MetricField(n, g.label() + ".fiber", eval, domain, box);
}

WalkerData walker_extract(const MetricField& g, const Eigen::VectorXd& pt,
                          bool with_f_split) {
  const WalkerInfo& info = walker_info(g);
  const int n = info.n, d = n + 2;
  WalkerData w;
  w.n = n;

  JetMatrix gj = g.eval(pt, 2);
  const Jet& H = gj(d - 1, d - 1);
  w.h.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w.h(i, j) = gj(1 + i, 1 + j).value();
  w.hinv = w.h.inverse();

  // lambda = (1/2) d_v^2 H; vec v = (1/2) h^{ij} (d_i d_v H - A_i d_v^2 H) X_j.
  w.lambda = 0.5 * H.deriv2(0, 0);
  Eigen::VectorXd lower(n);
  for (int i = 0; i < n; ++i) {
    double Ai = gj(1 + i, d - 1).value();
    lower[i] = 0.5 * (H.deriv2(0, 1 + i) - Ai * H.deriv2(0, 0));
  }
  w.vvec = w.hinv * lower;

  w.F.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w.F(i, j) = gj(1 + j, d - 1).deriv(1 + i) - gj(1 + i, d - 1).deriv(1 + j);

  // Frame contractions of the curvature operator, in the pipeline convention:
  //   T_{ij} = g(R(X_i, q) q, X_j),   h_{il} P^l_{jk} = g(R(X_k, q) X_j, X_i).
  // Signs are anchored by the closed forms -(1/2) nabla_k F_{ij} and the
  // family-1 value T = -a id; T matches the source display through
  // kWalkerOrientation, while the P contraction display disagrees with its
  // own closed form by one sign and the closed form wins.
  CurvatureJets cj = curvature_jets(g, pt, 2);
  Grid4d riem(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) riem(a, b, c, e) = cj.riemann_up(a, b, c, e).value();
  WalkerFrame f = walker_frame(g, pt);

  w.T.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd RXq_q = curv_apply(riem, f.X.col(i), f.q, f.q);
    for (int j = 0; j < n; ++j)
      w.T(i, j) = -kWalkerOrientation * RXq_q.dot(f.gval * f.X.col(j));
  }
  w.hP = Grid3d(n, n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd RXq_Xj = curv_apply(riem, f.X.col(k), f.q, f.X.col(j));
      for (int i = 0; i < n; ++i)
        w.hP(i, j, k) = RXq_Xj.dot(f.gval * f.X.col(i));
    }
  w.P = Grid3d(n, n, n);
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += w.hinv(l, i) * w.hP(i, j, k);
        w.P(l, j, k) = acc;
      }

  // Fiber data through the curvature pipeline on h(.; u fixed).
  MetricField fib = fiber_metric(g, pt);
  Eigen::VectorXd x = pt.segment(1, n);
  CurvatureJets fj = curvature_jets(fib, x, 2);
  w.s0 = fj.scalar.value();
  w.ric_h.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w.ric_h(i, j) = fj.ricci_op(i, j).value();
  w.R0 = Grid4d(n, n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) w.R0(i, j, k, l) = fj.riemann_lo(i, j, k, l).value();

  if (with_f_split) {
    auto t_eig = [&](double v) {
      Eigen::VectorXd pv = pt;
      pv[0] = v;
      WalkerData wv = walker_extract(g, pv, false);
      return (wv.hinv * wv.T).trace() / n;
    };
    double f0 = t_eig(0.0);
    double f1 = t_eig(1.0) - f0;
    w.f_split = std::make_pair(f1, f0);
  }
  return w;
}

WalkerClosedForms walker_closed_forms(const MetricField& g, const Eigen::VectorXd& pt) {
  const WalkerInfo& info = walker_info(g);
  if (info.fiber_depends_on_u)
    throw std::invalid_argument(
        "walker_closed_forms(" + g.label() +
        "): fiber metric depends on u; closed forms require d_u h = 0");
  const int n = info.n, d = n + 2;
  JetMatrix gj = g.eval(pt, 2);
  const Jet& H = gj(d - 1, d - 1);

  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = gj(1 + i, 1 + j).value();
  Eigen::MatrixXd hinv = h.inverse();

  // Fiber Christoffel values from the h-block jets (x-derivatives only).
  Grid3d gam(n, n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += hinv(k, l) * (gj(1 + j, 1 + l).deriv(1 + i) +
                               gj(1 + i, 1 + l).deriv(1 + j) -
                               gj(1 + i, 1 + j).deriv(1 + l));
        gam(k, i, j) = 0.5 * acc;
      }

  Eigen::VectorXd A(n), duA(n), dvH_grad(n);
  Eigen::MatrixXd dA(n, n);  // dA(i, j) = d_i A_j
  for (int j = 0; j < n; ++j) {
    A[j] = gj(1 + j, d - 1).value();
    duA[j] = gj(1 + j, d - 1).deriv(d - 1);
    dvH_grad[j] = H.deriv2(0, 1 + j);
    for (int i = 0; i < n; ++i) dA(i, j) = gj(1 + j, d - 1).deriv(1 + i);
  }
  Eigen::MatrixXd F = dA - dA.transpose();
  double dvH = H.deriv(0);
  double dv2H = H.deriv2(0, 0);

  WalkerClosedForms out;
  // h_{il} P^l_{jk} = -(1/2) nabla_k F_{ij}
  out.hP = Grid3d(n, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double nkF = gj(1 + j, d - 1).deriv2(1 + k, 1 + i) -
                     gj(1 + i, d - 1).deriv2(1 + k, 1 + j);
        for (int l = 0; l < n; ++l)
          nkF -= gam(l, k, i) * F(l, j) + gam(l, k, j) * F(i, l);
        out.hP(i, j, k) = -0.5 * nkF;
      }

  // T_{ij} = -(1/2) nab_i nab_j H + (1/4) F_{ik} F_{jl} h^{kl}
  //        + (1/4)(d_v H)(nab_i A_j + nab_j A_i)
  //        + (1/2)(A_i d_j d_v H + A_j d_i d_v H)
  //        + (1/2) d_u (nab_i A_j + nab_j A_i) - (1/2) A_i A_j d_v^2 H
  out.T.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double nnH = H.deriv2(1 + i, 1 + j);
      for (int k = 0; k < n; ++k) nnH -= gam(k, i, j) * H.deriv(1 + k);

      double FFh = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) FFh += F(i, k) * F(j, l) * hinv(k, l);

      double symA = dA(i, j) + dA(j, i);
      for (int k = 0; k < n; ++k) symA -= 2.0 * gam(k, i, j) * A[k];

      double du_symA = gj(1 + j, d - 1).deriv2(1 + i, d - 1) +
                       gj(1 + i, d - 1).deriv2(1 + j, d - 1);
      for (int k = 0; k < n; ++k) du_symA -= 2.0 * gam(k, i, j) * duA[k];

      out.T(i, j) = -0.5 * nnH + 0.25 * FFh + 0.25 * dvH * symA +
                    0.5 * (A[i] * dvH_grad[j] + A[j] * dvH_grad[i]) + 0.5 * du_symA -
                    0.5 * A[i] * A[j] * dv2H;
    }
  return out;
}

Lemma1Residuals lemma1_residuals(const MetricField& g, const Eigen::VectorXd& pt) {
  WalkerData w = walker_extract(g, pt);
  const int n = w.n;
  Lemma1Residuals r;

  r.scalar = std::abs(w.s0 + n * (n - 1) * w.lambda);

  // R0 in walker orientation must equal -(lambda/2) R_id, R_id = 2 X ^ Y.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double rid = w.h(k, j) * w.h(l, i) - w.h(l, j) * w.h(k, i);
          double res = kWalkerOrientation * w.R0(i, j, k, l) + w.lambda * rid;
          r.fiber_curv = std::max(r.fiber_curv, std::abs(res));
        }

  Eigen::VectorXd vlow = w.h * w.vvec;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double target = vlow[j] * w.h(k, i) - w.h(k, j) * vlow[i];
        r.p_wedge = std::max(r.p_wedge, std::abs(w.hP(i, j, k) - target));
      }

  double fhat = (w.hinv * w.T).trace() / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      r.t_prop = std::max(r.t_prop, std::abs(w.T(i, j) - fhat * w.h(i, j)));
  return r;
}

Eigen::VectorXd ric_tilde_p(const WalkerData& w) {
  const int n = w.n;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) acc += w.hinv(i, j) * w.P(k, j, i);
    out[k] = acc;
  }
  return out;
}

Eigen::MatrixXd ricci_from_walker(const WalkerData& w, const WalkerFrame& f) {
  const int n = w.n, d = n + 2;
  Eigen::VectorXd rtp = ric_tilde_p(w);
  Eigen::VectorXd wbar = w.vvec - rtp;  // vec v - Ric-tilde P, X-frame components
  Eigen::VectorXd wbar_coords = f.X * wbar;
  double trT = (w.hinv * w.T).trace();

  Eigen::MatrixXd ric(d, d);
  // Columns are Ric applied to (p, X_i, q), in coordinates.
  ric.col(0) = w.lambda * f.p;
  Eigen::VectorXd wlow = w.h * wbar;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd richXi = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < n; ++k) richXi += w.ric_h(k, i) * f.X.col(k);
    ric.col(1 + i) = wlow[i] * f.p + richXi;
  }
  ric.col(d - 1) = trT * f.p + wbar_coords + w.lambda * f.q;

  // Convert "operator on frame vectors" to a coordinate-basis operator.
  return ric * f.M.inverse();
}

Grid4d frame_components(const Grid4d& t_lo, const WalkerFrame& f) {
  const int d = static_cast<int>(f.M.rows());
  // out(a,b,c,e) = g(T(Y_a, Y_b) Y_c, Y_e) = T_{e' c' a' b'} Y_e^{e'} Y_c^{c'} ...
  Grid4d out(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double acc = 0.0;
          for (int i = 0; i < d; ++i) {
            double fe = f.M(i, e);
            if (fe == 0.0) continue;
            for (int j = 0; j < d; ++j) {
              double fc = f.M(j, c);
              if (fc == 0.0) continue;
              for (int k = 0; k < d; ++k) {
                double fa = f.M(k, a);
                if (fa == 0.0) continue;
                for (int l = 0; l < d; ++l) acc += t_lo(i, j, k, l) * fe * fc * fa * f.M(l, b);
              }
            }
          }
          out(a, b, c, e) = acc;
        }
  return out;
}

namespace {

//! g(U ^ V applied to Z, W) with (U^V)Z = g(U,Z)V - g(V,Z)U.
double wedge_pair(const Eigen::MatrixXd& gval, const Eigen::VectorXd& U,
                  const Eigen::VectorXd& V, const Eigen::VectorXd& Z,
                  const Eigen::VectorXd& W) {
  double uz = U.dot(gval * Z), vz = V.dot(gval * Z);
  return uz * V.dot(gval * W) - vz * U.dot(gval * W);
}

}  // namespace

Grid4d r_l_from_walker(const WalkerData& w, const WalkerFrame& f) {
  const int n = w.n, d = n + 2;
  Eigen::VectorXd rtp = ric_tilde_p(w);
  Eigen::VectorXd wbar = f.X * (w.vvec - rtp);  // coordinates
  double trT = (w.hinv * w.T).trace();
  double s = 2.0 * w.lambda + w.s0;
  double nu = ((n - 1) * w.lambda - w.s0) / (n + 1);
  double mu = (2.0 * n * w.lambda - w.s0) / (n + 1);
  double shalf = s / (2.0 * (n + 1));

  // Frame-vector list Y_0 = p, Y_{1..n} = X_i, Y_{n+1} = q.
  auto Y = [&](int a) -> Eigen::VectorXd { return f.M.col(a); };
  auto richX = [&](int i) {  // Ric(h) X_i in coordinates
    Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < n; ++k) out += w.ric_h(k, i) * f.X.col(k);
    return out;
  };

  // R_L(Y_a, Y_b) as a list of wedge terms (U_m, V_m) with weights; computed
  // for a <= b in the frame ordering (p, X, q), antisymmetrized below.
  struct WTerm {
    double c;
    Eigen::VectorXd U, V;
  };
  auto terms_for = [&](int a, int b) {
    std::vector<WTerm> t;
    double inv = 1.0 / n;
    auto add = [&](double c, const Eigen::VectorXd& U, const Eigen::VectorXd& V) {
      if (c != 0.0) t.push_back({c, U, V});
    };
    bool a_is_p = (a == 0), a_is_q = (a == d - 1);
    bool b_is_p = (b == 0), b_is_q = (b == d - 1);
    if (a_is_p && b_is_q) {
      add(inv * mu, f.p, f.q);
      add(inv, f.p, wbar);
    } else if (a_is_p && !b_is_q && !b_is_p) {
      int i = b - 1;
      add(inv, f.p, richX(i) + nu * f.X.col(i));
    } else if (!a_is_p && !a_is_q && b_is_q) {
      int i = a - 1;
      double cx = f.X.col(i).dot(f.gval * wbar);
      add(inv * cx, f.p, f.q);
      add(-inv * trT, f.p, f.X.col(i));
      add(inv, f.X.col(i), wbar);
      add(inv, richX(i) + nu * f.X.col(i), f.q);
    } else if (!a_is_p && !a_is_q && !b_is_p && !b_is_q) {
      int i = a - 1, j = b - 1;
      double ci = f.X.col(i).dot(f.gval * wbar);
      double cj = f.X.col(j).dot(f.gval * wbar);
      add(inv * ci, f.p, f.X.col(j));
      add(-inv * cj, f.p, f.X.col(i));
      add(inv, richX(i) - shalf * f.X.col(i), f.X.col(j));
      add(inv, f.X.col(i), richX(j) - shalf * f.X.col(j));
    }
    return t;
  };

  Grid4d out(d, d, d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      auto terms = terms_for(a, b);
      for (int c = 0; c < d; ++c)
        for (int e = 0; e < d; ++e) {
          double acc = 0.0;
          for (const auto& t : terms) acc += t.c * wedge_pair(f.gval, t.U, t.V, Y(c), Y(e));
          out(a, b, c, e) = acc;
          out(b, a, c, e) = -acc;
        }
    }
  return out;
}

JetVector CoordMap::apply(const JetVector& c) const {
  JetVector out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = comp[i](c);
  return out;
}

Eigen::VectorXd CoordMap::apply_value(const Eigen::VectorXd& p) const {
  Eigen::VectorXd out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = comp[i](p);
  return out;
}

CoordMap CoordMap::identity(int d) {
  CoordMap m;
  for (int i = 0; i < d; ++i) m.comp.push_back(MultiPoly::variable(d, i));
  return m;
}

CoordMap CoordMap::linear(const Eigen::MatrixXd& A) {
  const int d = static_cast<int>(A.rows());
  CoordMap m;
  for (int i = 0; i < d; ++i) {
    MultiPoly p(d);
    for (int j = 0; j < d; ++j) {
      if (A(i, j) == 0.0) continue;
      std::vector<int> e(d, 0);
      e[j] = 1;
      p.add_term(A(i, j), e);
    }
    m.comp.push_back(p);
  }
  return m;
}

CoordMap CoordMap::fiber_rotation(int n, const Eigen::MatrixXd& R) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n + 2, n + 2);
  A.block(1, 1, n, n) = R;
  return linear(A);
}

CoordMap CoordMap::gt_shear() {
  CoordMap m = identity(4);
  m.comp[0] = MultiPoly::variable(4, 0) + MultiPoly(4).add_term(-1.0, {0, 2, 0, 0}) +
              MultiPoly(4).add_term(1.0, {0, 0, 2, 0});
  return m;
}

CoordMap CoordMap::v_shift(const MultiPoly& phi) {
  const int d = phi.nvars();
  CoordMap m = identity(d);
  m.comp[0] = MultiPoly::variable(d, 0) + phi;
  return m;
}

MetricField coordinate_transform(const MetricField& g, const CoordMap& map,
                                 SampleBox new_box,
                                 MetricField::DomainPred extra_domain) {
  if (map.dim() != g.dim())
    throw std::invalid_argument("coordinate_transform: map dimension mismatch");
  const int d = g.dim();
  MetricField base = g;
  std::vector<std::vector<MultiPoly>> jac(d);
  for (int c = 0; c < d; ++c)
    for (int a = 0; a < d; ++a) jac[c].push_back(map.comp[c].partial(a));

  auto eval = [base, map, jac, d](const JetVector& c) {
    JetVector y = map.apply(c);
    JetMatrix J(d, d);
    Eigen::MatrixXd Jval(d, d);
    for (int i = 0; i < d; ++i)
      for (int a = 0; a < d; ++a) {
        J(i, a) = jac[i][a](c);
        Jval(i, a) = J(i, a).value();
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Jval);
    if (!lu.isInvertible())
      throw std::domain_error("coordinate_transform: Jacobian singular at sample point");
    JetMatrix gm = base.eval_jets(y);
    JetMatrix out(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        Jet acc;
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) acc += J(i, a) * J(j, b) * gm(i, j);
        out(a, b) = acc;
      }
    return out;
  };
  auto domain = [base, map, extra_domain](const Eigen::VectorXd& p) {
    if (extra_domain && !extra_domain(p)) return false;
    return base.in_domain(map.apply_value(p));
  };
  return MetricField(d, g.label() + "*pullback", eval, domain, std::move(new_box));
}

MetricField gauge_transform(const MetricField& g, const MultiPoly& phi) {
  const WalkerInfo& info = walker_info(g);
  if (!info.split)
    throw std::invalid_argument("gauge_transform(" + g.label() +
                                "): requires d_v^2 H = 0 (lambda = 0 families)");
  const int n = info.n, d = n + 2;
  if (phi.nvars() != d)
    throw std::invalid_argument("gauge_transform: phi must use full chart coordinates");
  if (phi.depends_on(0))
    throw std::invalid_argument("gauge_transform: phi must not depend on v");

  WalkerSplit old = *info.split;
  auto with_coords = [n, d](const JetVector& x, const Jet& u) {
    JetVector full(d);
    full[0] = Jet(0.0);
    for (int i = 0; i < n; ++i) full[1 + i] = x[i];
    full[d - 1] = u;
    return full;
  };
  WalkerSplit split;
  split.h = old.h;
  split.A = [old, phi, with_coords, n](const JetVector& x, const Jet& u) {
    JetVector full = with_coords(x, u);
    JetVector A = old.A(x, u);
    for (int i = 0; i < n; ++i) A[i] += phi.partial(1 + i)(full);
    return A;
  };
  split.H1 = old.H1;
  split.H0 = [old, phi, with_coords, d](const JetVector& x, const Jet& u) {
    JetVector full = with_coords(x, u);
    return old.H0(x, u) + old.H1(x, u) * phi(full) +
           Jet(2.0) * phi.partial(d - 1)(full);
  };

  auto eval = [split, n](const JetVector& c) {
    JetVector x = c.segment(1, n);
    Jet u = c[n + 1], v = c[0];
    JetMatrix h = split.h(x, u);
    JetVector A = split.A(x, u);
    Jet H = v * split.H1(x, u) + split.H0(x, u);
    const int d = n + 2;
    JetMatrix gm(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) gm(i, j) = Jet(0.0);
    gm(0, d - 1) = Jet(1.0);
    gm(d - 1, 0) = Jet(1.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) gm(1 + i, 1 + j) = h(i, j);
      gm(1 + i, d - 1) = A[i];
      gm(d - 1, 1 + i) = A[i];
    }
    gm(d - 1, d - 1) = H;
    return gm;
  };
  MetricField out(d, g.label() + "+gauge", eval, nullptr, g.sample_box());
  WalkerInfo ninfo;
  ninfo.n = n;
  ninfo.split = split;
  out.set_walker(ninfo);
  return out;
}

}  // namespace cflat
