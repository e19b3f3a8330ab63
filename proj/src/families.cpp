#include "cflat/families.hpp"

#include <cmath>
#include <stdexcept>

namespace cflat {

namespace {

Jet sum_sq(const JetVector& x) {
  Jet acc(0.0);
  for (int i = 0; i < x.size(); ++i) acc += x[i] * x[i];
  return acc;
}

//! Psi = 4/(1 + sign * r^2)^2 on the fiber chart.
Jet psi_chart(const JetVector& x, double sign) {
  Jet denom = Jet(1.0) + Jet(sign) * sum_sq(x);
  return Jet(4.0) * reciprocal(pow_int(denom, 2));
}

SampleBox walker_box(int n, double xmax) {
  SampleBox box;
  box.range.emplace_back(-1.0, 1.0);  // v
  for (int i = 0; i < n; ++i) box.range.emplace_back(-xmax, xmax);
  box.range.emplace_back(-1.0, 1.0);  // u
  return box;
}

//! Assemble the Walker matrix 2dvdu + h + 2A du + H du^2 from jet components.
JetMatrix walker_matrix(int n, const JetMatrix& h, const JetVector& A, const Jet& H) {
  const int d = n + 2;
  JetMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Jet(0.0);
  g(0, d - 1) = Jet(1.0);
  g(d - 1, 0) = Jet(1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(1 + i, 1 + j) = h(i, j);
    g(1 + i, d - 1) = A[i];
    g(d - 1, 1 + i) = A[i];
  }
  g(d - 1, d - 1) = H;
  return g;
}

void check_poly_count(const std::vector<UPoly>& p, int n, const char* name) {
  if (static_cast<int>(p.size()) != n)
    throw std::invalid_argument(std::string("family: parameter ") + name +
                                " must have one polynomial per fiber coordinate");
}

void check_lambda_sign(const UPoly& lambda, bool negative) {
  for (int i = 0; i <= 200; ++i) {
    double u = -1.0 + i / 100.0;
    double v = lambda(u);
    if (negative ? (v >= 0.0) : (v <= 0.0))
      throw std::invalid_argument(negative
                                      ? "family constraint violated: lambda(u) < 0 on [-1,1]"
                                      : "family constraint violated: lambda(u) > 0 on [-1,1]");
  }
}

bool all_zero(const std::vector<UPoly>& p) {
  for (const auto& q : p)
    if (!q.is_zero()) return false;
  return true;
}

}  // namespace

MetricField flat_walker(int n) {
  auto eval = [n](const JetVector& c) {
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = Jet(i == j ? 1.0 : 0.0);
    JetVector A(n);
    for (int i = 0; i < n; ++i) A[i] = Jet(0.0);
    (void)c;
    return walker_matrix(n, h, A, Jet(0.0));
  };
  MetricField g(n + 2, "flat", eval, nullptr, walker_box(n, 1.0));
  WalkerInfo info;
  info.n = n;
  WalkerSplit split;
  split.h = [n](const JetVector&, const Jet&) {
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = Jet(i == j ? 1.0 : 0.0);
    return h;
  };
  split.A = [n](const JetVector&, const Jet&) {
    JetVector A(n);
    for (int i = 0; i < n; ++i) A[i] = Jet(0.0);
    return A;
  };
  split.H1 = [](const JetVector&, const Jet&) { return Jet(0.0); };
  split.H0 = [](const JetVector&, const Jet&) { return Jet(0.0); };
  info.split = split;
  g.set_walker(info);
  return g;
}

namespace {

//! Shared builder for the lambda = 0 families with flat fiber.
MetricField build_split_walker(int n, std::string label, WalkerSplit split) {
  auto eval = [n, split](const JetVector& c) {
    JetVector x = c.segment(1, n);
    Jet u = c[n + 1], v = c[0];
    JetMatrix h = split.h(x, u);
    JetVector A = split.A(x, u);
    Jet H = v * split.H1(x, u) + split.H0(x, u);
    return walker_matrix(n, h, A, H);
  };
  MetricField g(n + 2, std::move(label), eval, nullptr, walker_box(n, 1.0));
  WalkerInfo info;
  info.n = n;
  info.split = std::move(split);
  g.set_walker(info);
  return g;
}

JetMatrix flat_fiber(int n) {
  JetMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = Jet(i == j ? 1.0 : 0.0);
  return h;
}

}  // namespace

MetricField ppwave_f1(int n, const UPoly& a) {
  WalkerSplit split;
  split.h = [n](const JetVector&, const Jet&) { return flat_fiber(n); };
  split.A = [n](const JetVector&, const Jet&) {
    JetVector A(n);
    for (int i = 0; i < n; ++i) A[i] = Jet(0.0);
    return A;
  };
  split.H1 = [](const JetVector&, const Jet&) { return Jet(0.0); };
  split.H0 = [a](const JetVector& x, const Jet& u) { return a(u) * sum_sq(x); };
  return build_split_walker(n, "ppwave_f1", std::move(split));
}

MetricField ppwave_with_extra(int n, const UPoly& a, const MultiPoly& extra_xu) {
  if (extra_xu.nvars() != n + 2)
    throw std::invalid_argument("ppwave_with_extra: perturbation must use full chart coords");
  auto eval = [n, a, extra_xu](const JetVector& c) {
    JetVector x = c.segment(1, n);
    Jet H = a(c[n + 1]) * sum_sq(x) + extra_xu(c);
    JetVector A(n);
    for (int i = 0; i < n; ++i) A[i] = Jet(0.0);
    return walker_matrix(n, flat_fiber(n), A, H);
  };
  MetricField g(n + 2, "ppwave_f1_perturbed", eval, nullptr, walker_box(n, 1.0));
  WalkerInfo info;
  info.n = n;
  g.set_walker(info);
  return g;
}

MetricField sim_f2(int n, const UPoly& a, const std::vector<UPoly>& B,
                   const std::vector<UPoly>& C, const UPoly& D) {
  check_poly_count(B, n, "B");
  check_poly_count(C, n, "C");
  if (all_zero(B))
    throw std::invalid_argument("family constraint violated: sum_i B_i^2(u) != 0");
  WalkerSplit split;
  split.h = [n](const JetVector&, const Jet&) { return flat_fiber(n); };
  split.A = [n, B](const JetVector& x, const Jet& u) {
    Jet r2 = sum_sq(x);
    Jet Bx(0.0);
    std::vector<Jet> Bu(n);
    for (int i = 0; i < n; ++i) {
      Bu[i] = B[i](u);
      Bx += Bu[i] * x[i];
    }
    JetVector A(n);
    for (int i = 0; i < n; ++i)
      A[i] = Jet(0.25) * (Jet(2.0) * Bx * x[i] - Bu[i] * r2);
    return A;
  };
  split.H1 = [n, B](const JetVector& x, const Jet& u) {
    Jet Bx(0.0);
    for (int i = 0; i < n; ++i) Bx += B[i](u) * x[i];
    return Bx;
  };
  split.H0 = [n, a, B, C, D](const JetVector& x, const Jet& u) {
    Jet r2 = sum_sq(x);
    Jet B2(0.0), Cx(0.0);
    for (int i = 0; i < n; ++i) {
      Jet b = B[i](u);
      B2 += b * b;
      Cx += C[i](u) * x[i];
    }
    return Jet(1.0 / 16.0) * B2 * r2 * r2 + a(u) * r2 + Cx + D(u);
  };
  return build_split_walker(n, "sim_f2", std::move(split));
}

namespace {

//! Families 3/4 share their structure up to chart and sign choices.
MetricField build_f34(int n, const UPoly& lambda, const UPoly& a,
                      const std::vector<UPoly>& B, const std::vector<UPoly>& C,
                      const UPoly& D, bool sphere) {
  check_poly_count(B, n, "B");
  check_poly_count(C, n, "C");
  check_lambda_sign(lambda, /*negative=*/sphere);
  if (all_zero(B) && a.is_zero())
    throw std::invalid_argument(
        "family constraint violated: sum_i B_i^2(u) + a^2(u) != 0");
  const double chart_sign = sphere ? 1.0 : -1.0;    // Psi = 4/(1 +- r^2)^2
  const double a_const_sign = sphere ? 0.5 : -0.5;  // +- B_i/2 constant term in A_i
  const double h0_bx_sign = sphere ? 1.0 : -1.0;    // Psi(sum B^2 +- (Bx)^2)
  const double h_sign = sphere ? -1.0 : 1.0;        // H = lambda(v^2 -+ H0)

  auto eval = [=](const JetVector& c) {
    JetVector x = c.segment(1, n);
    Jet u = c[n + 1], v = c[0];
    Jet lam = lambda(u);
    Jet psi = psi_chart(x, chart_sign);
    Jet r2 = sum_sq(x);

    JetMatrix h(n, n);
    Jet hscale = psi / (Jet(sphere ? -1.0 : 1.0) * lam);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = (i == j) ? hscale : Jet(0.0);

    Jet Bx(0.0), B2(0.0), Cx(0.0);
    std::vector<Jet> Bu(n);
    for (int i = 0; i < n; ++i) {
      Bu[i] = B[i](u);
      Bx += Bu[i] * x[i];
      B2 += Bu[i] * Bu[i];
      Cx += C[i](u) * x[i];
    }
    JetVector A(n);
    for (int i = 0; i < n; ++i)
      A[i] = psi * (Bx * x[i] - Jet(0.5) * Bu[i] * r2 + Jet(a_const_sign) * Bu[i]);

    Jet H0 = psi * (B2 + Jet(h0_bx_sign) * Bx * Bx) +
             sqrt(psi) * (a(u) * r2 + Cx + D(u));
    Jet H = lam * (v * v + Jet(h_sign) * H0);
    return walker_matrix(n, h, A, H);
  };

  MetricField::DomainPred domain = nullptr;
  double xmax = 0.9 / std::sqrt(double(n));
  if (!sphere) {
    domain = [n](const Eigen::VectorXd& p) {
      double r2 = p.segment(1, n).squaredNorm();
      return r2 <= 0.81;
    };
  }
  MetricField g(n + 2, sphere ? "sphere_f3" : "hyp_f4", eval, domain, walker_box(n, xmax));
  WalkerInfo info;
  info.n = n;
  info.lambda = lambda;
  info.fiber_depends_on_u = lambda.degree() > 0;
  g.set_walker(info);
  return g;
}

}  // namespace

MetricField sphere_f3(int n, const UPoly& lambda, const UPoly& a,
                      const std::vector<UPoly>& B, const std::vector<UPoly>& C,
                      const UPoly& D) {
  return build_f34(n, lambda, a, B, C, D, /*sphere=*/true);
}

MetricField hyp_f4(int n, const UPoly& lambda, const UPoly& a,
                   const std::vector<UPoly>& B, const std::vector<UPoly>& C,
                   const UPoly& D) {
  return build_f34(n, lambda, a, B, C, D, /*sphere=*/false);
}

MetricField const_curv_riem(int n, double k) {
  if (k == 0.0) throw std::invalid_argument("const_curv_riem: curvature must be nonzero");
  double sign = k > 0 ? 1.0 : -1.0;
  double scale = 1.0 / std::abs(k);
  auto eval = [n, sign, scale](const JetVector& x) {
    Jet psi = psi_chart(x, sign);
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = (i == j) ? Jet(scale) * psi : Jet(0.0);
    return h;
  };
  SampleBox box;
  double xmax = 0.9 / std::sqrt(double(n));
  for (int i = 0; i < n; ++i) box.range.emplace_back(-xmax, xmax);
  MetricField::DomainPred domain = nullptr;
  if (k < 0)
    domain = [](const Eigen::VectorXd& p) { return p.squaredNorm() <= 0.81; };
  return MetricField(n, k > 0 ? "sphere_riem" : "hyp_riem", eval, domain, box);
}

MetricField euclidean(int n) {
  auto eval = [n](const JetVector&) {
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = Jet(i == j ? 1.0 : 0.0);
    return h;
  };
  SampleBox box;
  for (int i = 0; i < n; ++i) box.range.emplace_back(-1.0, 1.0);
  return MetricField(n, "euclidean", eval, nullptr, box);
}

MetricField line_metric(double sign) {
  auto eval = [sign](const JetVector&) {
    JetMatrix h(1, 1);
    h(0, 0) = Jet(sign);
    return h;
  };
  SampleBox box;
  box.range.emplace_back(-1.0, 1.0);
  return MetricField(1, sign > 0 ? "line+" : "line-", eval, nullptr, box);
}

MetricField const_curv_lorentz2(double c) {
  auto eval = [c](const JetVector& x) {
    JetMatrix g(2, 2);
    g(0, 0) = Jet(0.0);
    g(0, 1) = Jet(1.0);
    g(1, 0) = Jet(1.0);
    g(1, 1) = Jet(c) * x[0] * x[0];
    return g;
  };
  SampleBox box;
  box.range.emplace_back(-1.0, 1.0);
  box.range.emplace_back(-1.0, 1.0);
  return MetricField(2, "lorentz2", eval, nullptr, box);
}

namespace {

MetricField build_thc3_dec(int n, double c, bool sphere) {
  if (c <= 0.0) throw std::invalid_argument("family constraint violated: c > 0");
  double chart_sign = sphere ? 1.0 : -1.0;
  double h_sign = sphere ? -1.0 : 1.0;
  auto eval = [n, c, chart_sign, h_sign](const JetVector& coords) {
    JetVector x = coords.segment(1, n);
    Jet v = coords[0];
    Jet psi = psi_chart(x, chart_sign);
    JetMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = (i == j) ? Jet(1.0 / c) * psi : Jet(0.0);
    JetVector A(n);
    for (int i = 0; i < n; ++i) A[i] = Jet(0.0);
    Jet H = Jet(h_sign * c) * v * v;
    return walker_matrix(n, h, A, H);
  };
  MetricField::DomainPred domain = nullptr;
  double xmax = 0.9 / std::sqrt(double(n));
  if (!sphere)
    domain = [n](const Eigen::VectorXd& p) {
      return p.segment(1, n).squaredNorm() <= 0.81;
    };
  MetricField g(n + 2, sphere ? "thc3_dec_sphere" : "thc3_dec_hyp", eval, domain,
                walker_box(n, xmax));
  WalkerInfo info;
  info.n = n;
  info.lambda = UPoly::constant(h_sign * c);
  g.set_walker(info);
  return g;
}

}  // namespace

MetricField thc3_dec_sphere(int n, double c) { return build_thc3_dec(n, c, true); }
MetricField thc3_dec_hyp(int n, double c) { return build_thc3_dec(n, c, false); }

MetricField thc3_flat(int n) {
  MetricField g = flat_walker(n);
  return MetricField(n + 2, "thc3_flat",
                     [g](const JetVector& c) { return g.eval_jets(c); }, nullptr,
                     g.sample_box());
}

namespace {

SampleBox gt_box() {
  SampleBox box;
  box.range.emplace_back(-1.0, 1.0);  // x
  box.range.emplace_back(0.3, 1.5);   // y
  box.range.emplace_back(-1.0, 1.0);  // z
  box.range.emplace_back(-1.0, 1.0);  // t
  return box;
}

bool gt_domain(const Eigen::VectorXd& p) { return p[1] > 0.05; }

}  // namespace

MetricField gt_original() {
  auto eval = [](const JetVector& c) {
    Jet x = c[0], y = c[1], z = c[2];
    JetMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = Jet(0.0);
    g(0, 3) = Jet(1.0);
    g(3, 0) = Jet(1.0);
    g(0, 1) = Jet(2.0) * y;  // 4y dx dy
    g(1, 0) = g(0, 1);
    g(0, 2) = Jet(-2.0) * z;  // -4z dx dz
    g(2, 0) = g(0, 2);
    Jet inv2y2 = reciprocal(Jet(2.0) * y * y);
    g(1, 1) = inv2y2;
    g(2, 2) = inv2y2;
    Jet w = x + y * y - z * z;
    g(3, 3) = Jet(2.0) * w * w;
    return g;
  };
  return MetricField(4, "gt_original", eval, gt_domain, gt_box());
}

MetricField gt_corrected() {
  auto eval = [](const JetVector& c) {
    Jet x = c[0], y = c[1], z = c[2];
    JetMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = Jet(0.0);
    g(0, 3) = Jet(1.0);
    g(3, 0) = Jet(1.0);
    g(1, 3) = Jet(2.0) * y;  // 4y dt dy
    g(3, 1) = g(1, 3);
    g(2, 3) = Jet(-2.0) * z;  // -4z dt dz
    g(3, 2) = g(2, 3);
    Jet inv2y2 = reciprocal(Jet(2.0) * y * y);
    g(1, 1) = inv2y2;
    g(2, 2) = inv2y2;
    Jet w = x + y * y - z * z;
    g(3, 3) = Jet(2.0) * w * w;
    return g;
  };
  MetricField g(4, "gt_corrected", eval, gt_domain, gt_box());
  WalkerInfo info;
  info.n = 2;
  info.lambda = UPoly::constant(2.0);
  g.set_walker(info);
  return g;
}

MetricField gt_simplified() {
  auto eval = [](const JetVector& c) {
    Jet x = c[0], y = c[1];
    JetMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = Jet(0.0);
    g(0, 3) = Jet(1.0);
    g(3, 0) = Jet(1.0);
    Jet inv2y2 = reciprocal(Jet(2.0) * y * y);
    g(1, 1) = inv2y2;
    g(2, 2) = inv2y2;
    g(3, 3) = Jet(2.0) * x * x;
    return g;
  };
  MetricField g(4, "gt_simplified", eval, gt_domain, gt_box());
  WalkerInfo info;
  info.n = 2;
  info.lambda = UPoly::constant(2.0);
  g.set_walker(info);
  return g;
}

MetricField cahen_wallach(int n) {
  MetricField g = ppwave_f1(n, UPoly::constant(1.0));
  MetricField out(n + 2, "cahen_wallach",
                  [g](const JetVector& c) { return g.eval_jets(c); }, nullptr,
                  g.sample_box());
  out.set_walker(*g.walker());
  return out;
}

MetricField product_metric(const MetricField& g1, const MetricField& g2) {
  const int d1 = g1.dim(), d2 = g2.dim();
  auto eval = [g1, g2, d1, d2](const JetVector& c) {
    JetVector c1 = c.head(d1), c2 = c.tail(d2);
    JetMatrix m1 = g1.eval_jets(c1), m2 = g2.eval_jets(c2);
    JetMatrix g(d1 + d2, d1 + d2);
    for (int i = 0; i < d1 + d2; ++i)
      for (int j = 0; j < d1 + d2; ++j) g(i, j) = Jet(0.0);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j) g(i, j) = m1(i, j);
    for (int i = 0; i < d2; ++i)
      for (int j = 0; j < d2; ++j) g(d1 + i, d1 + j) = m2(i, j);
    return g;
  };
  auto domain = [g1, g2, d1, d2](const Eigen::VectorXd& p) {
    return g1.in_domain(p.head(d1)) && g2.in_domain(p.tail(d2));
  };
  SampleBox box;
  box.range = g1.sample_box().range;
  for (const auto& r : g2.sample_box().range) box.range.push_back(r);
  return MetricField(d1 + d2, "product(" + g1.label() + "," + g2.label() + ")", eval,
                     domain, box);
}

UPoly random_upoly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<double> c(degree + 1);
  for (double& v : c) v = coef(rng);
  return UPoly(std::move(c));
}

MetricField build_family(const FamilySpec& spec) {
  switch (spec.id) {
    case FamilyId::flat:
      return flat_walker(spec.n);
    case FamilyId::const_curv_riem:
      return const_curv_riem(spec.n, spec.c);
    case FamilyId::const_curv_lorentz:
      return const_curv_lorentz2(spec.c);
    case FamilyId::ppwave_f1:
      return ppwave_f1(spec.n, spec.a);
    case FamilyId::sim_f2:
      return sim_f2(spec.n, spec.a, spec.B, spec.C, spec.D);
    case FamilyId::sphere_f3:
      return sphere_f3(spec.n, spec.lambda, spec.a, spec.B, spec.C, spec.D);
    case FamilyId::hyp_f4:
      return hyp_f4(spec.n, spec.lambda, spec.a, spec.B, spec.C, spec.D);
    case FamilyId::thc3_dec_sphere:
      return thc3_dec_sphere(spec.n, spec.c);
    case FamilyId::thc3_dec_hyp:
      return thc3_dec_hyp(spec.n, spec.c);
    case FamilyId::thc3_flat:
      return thc3_flat(spec.n);
    case FamilyId::gt_original:
      return gt_original();
    case FamilyId::gt_corrected:
      return gt_corrected();
    case FamilyId::gt_simplified:
      return gt_simplified();
    case FamilyId::cahen_wallach:
      return cahen_wallach(spec.n);
  }
  throw std::invalid_argument("build_family: unknown family id");
}

}  // namespace cflat
