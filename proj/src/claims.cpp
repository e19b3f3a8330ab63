#include "cflat/claims.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cflat/curvature.hpp"
#include "cflat/families.hpp"
#include "cflat/holonomy.hpp"
#include "cflat/killing.hpp"
#include "cflat/walker.hpp"

namespace cflat {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::mt19937_64 rng_for(const ClaimConfig& cfg, const std::string& id) {
  return std::mt19937_64(cfg.seed ^ fnv1a(id));
}

UPoly nonzero_upoly(std::mt19937_64& rng, int degree) {
  UPoly p = random_upoly(rng, degree);
  std::vector<double> c = p.coeffs();
  c[0] += (c[0] >= 0.0 ? 0.5 : -0.5);  // keep the function away from zero
  return UPoly(c);
}

std::vector<UPoly> random_upolys(std::mt19937_64& rng, int n, int degree) {
  std::vector<UPoly> out;
  for (int i = 0; i < n; ++i) out.push_back(random_upoly(rng, degree));
  return out;
}

//! Family instance with randomized parameters drawn from the claim's rng.
MetricField make_family(const std::string& fam, int n, std::mt19937_64& rng,
                        bool constant_lambda = false) {
  if (fam == "ppwave_f1") return ppwave_f1(n, nonzero_upoly(rng, 2));
  if (fam == "cahen_wallach") return cahen_wallach(n);
  if (fam == "sim_f2") {
    std::vector<UPoly> B = random_upolys(rng, n, 2);
    B[0] = nonzero_upoly(rng, 2);
    return sim_f2(n, random_upoly(rng, 2), B, random_upolys(rng, n, 2),
                  random_upoly(rng, 2));
  }
  if (fam == "sphere_f3" || fam == "hyp_f4") {
    UPoly lambda = constant_lambda ? UPoly({1.0}) : UPoly({1.0, 0.0, 0.25});
    if (fam == "sphere_f3") {
      std::vector<double> c = lambda.coeffs();
      for (double& v : c) v = -v;
      lambda = UPoly(c);
    }
    std::vector<UPoly> B = random_upolys(rng, n, 2);
    UPoly a = nonzero_upoly(rng, 2);
    if (fam == "sphere_f3")
      return sphere_f3(n, lambda, a, B, random_upolys(rng, n, 2), random_upoly(rng, 2));
    return hyp_f4(n, lambda, a, B, random_upolys(rng, n, 2), random_upoly(rng, 2));
  }
  throw std::invalid_argument("make_family: unknown family " + fam);
}

struct Meter {
  double worst = 0.0;
  void update(double v) { worst = std::max(worst, std::abs(v)); }
};

double weyl_ratio(const CurvatureBundle& cb) {
  return sup_norm(cb.weyl_lo) / (1.0 + sup_norm(cb.riemann_lo));
}

ClaimResult finish(const Claim& c, const ClaimConfig& cfg, double residual, double tol,
                   std::string note = "") {
  ClaimResult r;
  r.claim_id = c.id;
  r.family = c.family;
  r.n = c.n;
  r.samples = cfg.samples;
  r.max_residual = residual;
  r.tolerance = cfg.tol_override.value_or(tol);
  r.pass = r.max_residual <= r.tolerance;
  r.seed = cfg.seed;
  r.note = std::move(note);
  return r;
}

//! Shortfall encoding for must-exceed checks: 0 when the measured value
//! clears the threshold, otherwise the distance still missing.
double shortfall(double measured, double threshold) {
  return std::max(0.0, threshold - measured);
}

// ---------------------------------------------------------------------------
// Criterion 1/7/8/11: Weyl / Cotton flatness sweeps
// ---------------------------------------------------------------------------

Claim weyl_claim(const std::string& id, const std::string& fam, int n) {
  Claim c{id, "weyl", fam, n, nullptr};
  c.run = [c, fam, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng);
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      m.update(weyl_ratio(curvature_bundle(g, p, 2)));
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim thc2_claim(const std::string& id, bool sphere, int n) {
  Claim c{id, "thc2", sphere ? "thc3_dec_sphere" : "thc3_dec_hyp", n, nullptr};
  c.run = [c, sphere, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    std::uniform_real_distribution<double> cpar(0.5, 2.0);
    MetricField g = sphere ? thc3_dec_sphere(n, cpar(rng)) : thc3_dec_hyp(n, cpar(rng));
    Meter m;
    for (int s = 0; s < cfg.samples; ++s)
      m.update(weyl_ratio(curvature_bundle(g, g.sample_point(rng), 2)));
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim thc2_flat_claim(const std::string& id, int n) {
  Claim c{id, "thc2", "thc3_flat", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = thc3_flat(n);
    Meter m;
    for (int s = 0; s < cfg.samples; ++s)
      m.update(sup_norm(curvature_bundle(g, g.sample_point(rng), 2).riemann_lo));
    return finish(c, cfg, m.worst, 1e-10);
  };
  return c;
}

Claim product_weyl_claim(const std::string& id, int n1, int n2) {
  Claim c{id, "products", "sphere x hyp", n1 + n2, nullptr};
  c.run = [c, n1, n2](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    std::uniform_real_distribution<double> cpar(0.5, 1.5);
    double k = cpar(rng);
    MetricField g = product_metric(const_curv_riem(n1, k), const_curv_riem(n2, -k));
    Meter m;
    for (int s = 0; s < cfg.samples; ++s)
      m.update(weyl_ratio(curvature_bundle(g, g.sample_point(rng), 2)));
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim product_cotton_claim(const std::string& id) {
  Claim c{id, "products", "surface x line", 3, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    std::uniform_real_distribution<double> cpar(0.4, 1.5);
    Meter m;
    for (double sign : {1.0, -1.0}) {
      MetricField g = product_metric(const_curv_riem(2, sign * cpar(rng)), line_metric(-1.0));
      for (int s = 0; s < cfg.samples / 2; ++s) {
        CurvatureBundle cb = curvature_bundle(g, g.sample_point(rng), 3);
        m.update(sup_norm(*cb.cotton) / (1.0 + sup_norm(cb.riemann_lo)));
      }
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim nordstrom_claim(const std::string& id, const std::string& fam) {
  Claim c{id, "nordstrom", fam, 2, nullptr};
  c.run = [c, fam](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, 2, rng);
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      CurvatureBundle cb = curvature_bundle(g, g.sample_point(rng), 2);
      m.update(weyl_ratio(cb));
      m.update(cb.scalar);
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 2: Lemma-1 equivalence
// ---------------------------------------------------------------------------

Claim lemma1_claim(const std::string& id, const std::string& fam, int n) {
  Claim c{id, "lemma1", fam, n, nullptr};
  c.run = [c, fam, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng);
    Meter m;
    for (int s = 0; s < cfg.samples; ++s)
      m.update(lemma1_residuals(g, g.sample_point(rng)).max());
    return finish(c, cfg, m.worst, 1e-8);
  };
  return c;
}

Claim lemma1_perturbed_claim(const std::string& id) {
  Claim c{id, "lemma1", "ppwave_f1_perturbed", 2, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MultiPoly cubic(4);
    cubic.add_term(0.1, {0, 3, 0, 0});  // 0.1 (x^1)^3
    MetricField g = ppwave_with_extra(2, nonzero_upoly(rng, 2), cubic);
    double best = 0.0;  // best joint violation over the sample
    for (int s = 0; s < cfg.samples; ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      double wn = sup_norm(curvature_bundle(g, p, 2).weyl_lo);
      double lr = lemma1_residuals(g, p).max();
      best = std::max(best, std::min(wn, lr));
    }
    return finish(c, cfg, shortfall(best, 1e-3), 0.0,
                  "must exceed 1e-3; measured " + std::to_string(best));
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 3: Ricci structure
// ---------------------------------------------------------------------------

Claim ricci_f1_slot_claim(const std::string& id, int n) {
  Claim c{id, "ricci", "ppwave_f1", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    UPoly a = nonzero_upoly(rng, 2);
    MetricField g = ppwave_f1(n, a);
    const int d = n + 2;
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      CurvatureBundle cb = curvature_bundle(g, p, 2);
      // Single p (x) du slot; value n a(u) in the source orientation, which is
      // -Ric^v_u in the pipeline convention (see README on conventions).
      m.update(-cb.ricci_op(0, d - 1) - n * a(p[d - 1]));
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (!(i == 0 && j == d - 1)) m.update(cb.ricci_op(i, j));
    }
    return finish(c, cfg, m.worst, 1e-8);
  };
  return c;
}

Claim ricci_f1_nilpotent_claim(const std::string& id, int n) {
  Claim c{id, "ricci", "ppwave_f1", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = ppwave_f1(n, nonzero_upoly(rng, 2));
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      CurvatureBundle cb = curvature_bundle(g, g.sample_point(rng), 2);
      m.update((cb.ricci_op * cb.ricci_op).norm());
    }
    return finish(c, cfg, m.worst, 1e-10);
  };
  return c;
}

Claim ricci_f2_ric3_claim(const std::string& id, int n) {
  Claim c{id, "ricci", "sim_f2", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family("sim_f2", n, rng);
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      CurvatureBundle cb = curvature_bundle(g, g.sample_point(rng), 2);
      Eigen::MatrixXd r2 = cb.ricci_op * cb.ricci_op;
      m.update((r2 * cb.ricci_op).norm());
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim ricci_f2_ric2_claim(const std::string& id, int n) {
  Claim c{id, "ricci", "sim_f2", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family("sim_f2", n, rng);
    double worst_shortfall = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
      CurvatureBundle cb = curvature_bundle(g, g.sample_point(rng), 2);
      double r = cb.ricci_op.norm();
      double r2 = (cb.ricci_op * cb.ricci_op).norm();
      worst_shortfall = std::max(worst_shortfall, shortfall(r2, 1e-6 * r * r));
    }
    return finish(c, cfg, worst_shortfall, 0.0, "Ric^2 must exceed 1e-6 |Ric|^2");
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 4: scalar curvature
// ---------------------------------------------------------------------------

Claim scalar_claim(const std::string& id, const std::string& fam, int n) {
  Claim c{id, "scalar", fam, n, nullptr};
  c.run = [c, fam, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng);
    const UPoly lambda = g.walker() && g.walker()->lambda ? *g.walker()->lambda : UPoly();
    Meter m;
    for (int s = 0; s < cfg.samples; ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      double sc = curvature_bundle(g, p, 2).scalar;
      if (fam == "sim_f2")
        m.update(sc);
      else
        m.update(sc + (n - 2) * (n + 1) * lambda(p[n + 1]));
    }
    return finish(c, cfg, m.worst, fam == "sim_f2" ? 1e-9 : 1e-8);
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 5 / 6: holonomy spans
// ---------------------------------------------------------------------------

Claim holonomy_claim(const std::string& id, const std::string& fam, int n) {
  Claim c{id, "holonomy", fam, n, nullptr};
  c.run = [c, fam, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng);
    const int nsamp = std::min(cfg.samples, 20);
    auto samples = holonomy_samples(g, nsamp, cfg.seed ^ fnv1a(c.id + ".pts"));
    EndoSpan span = curvature_span(g, default_base_point(n + 2), samples, cfg.seed);
    std::string label = classify(span, n);
    bool ok;
    std::string want;
    if (fam == "ppwave_f1") {
      ok = span.dim <= n && span.bracket_closed_dim == span.dim &&
           span.preserves_null_line && label.rfind("null_translations", 0) == 0;
      want = "null_translations(<=n)";
    } else {
      const int sim_dim = 1 + n + n * (n - 1) / 2;
      ok = span.bracket_closed_dim == sim_dim && span.preserves_null_line &&
           !span.preserves_nondeg_subspace && label == "sim(" + std::to_string(n) + ")";
      want = "sim(" + std::to_string(n) + ")";
    }
    return finish(c, cfg, ok ? 0.0 : 1.0, 0.5,
                  "label=" + label + " dim=" + std::to_string(span.dim) + " closure=" +
                      std::to_string(span.bracket_closed_dim) + " want " + want);
  };
  return c;
}

Claim gt_original_weyl_claim(const std::string& id) {
  Claim c{id, "dim4", "gt_original", 2, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = gt_original();
    double best = 0.0;
    for (int s = 0; s < std::min(cfg.samples, 20); ++s)
      best = std::max(best, sup_norm(curvature_bundle(g, g.sample_point(rng), 2).weyl_lo));
    return finish(c, cfg, shortfall(best, 1e-3), 0.0,
                  "Weyl must exceed 1e-3; measured " + std::to_string(best));
  };
  return c;
}

Claim gt_corrected_weyl_claim(const std::string& id) {
  Claim c{id, "dim4", "gt_corrected", 2, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = gt_corrected();
    Meter m;
    for (int s = 0; s < cfg.samples; ++s)
      m.update(weyl_ratio(curvature_bundle(g, g.sample_point(rng), 2)));
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim gt_holonomy_claim(const std::string& id) {
  Claim c{id, "dim4", "gt_corrected", 2, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    MetricField g = gt_corrected();
    auto samples = holonomy_samples(g, std::min(cfg.samples, 20), cfg.seed ^ fnv1a(c.id));
    Eigen::VectorXd base(4);
    base << 0.1, 0.7, 0.2, 0.1;  // inside the y > 0.05 chart
    EndoSpan span = curvature_span(g, base, samples, cfg.seed);
    std::string label = classify(span, 2);
    bool ok = label == "so(1,1)+so(2)";
    return finish(c, cfg, ok ? 0.0 : 1.0, 0.5,
                  "label=" + label + " closure=" + std::to_string(span.bracket_closed_dim));
  };
  return c;
}

Claim gt_transform_claim(const std::string& id) {
  Claim c{id, "dim4", "gt_corrected", 2, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField target = gt_simplified();
    MetricField pulled = coordinate_transform(gt_corrected(), CoordMap::gt_shear(),
                                              target.sample_box(),
                                              [](const Eigen::VectorXd& p) { return p[1] > 0.05; });
    Meter m;
    for (int s = 0; s < std::min(cfg.samples, 50); ++s) {
      Eigen::VectorXd p = target.sample_point(rng);
      Eigen::MatrixXd a = pulled.eval_value(p), b = target.eval_value(p);
      m.update((a - b).cwiseAbs().maxCoeff());
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 9: Killing suites
// ---------------------------------------------------------------------------

Claim killing_claim(const std::string& id, bool sphere, int n) {
  Claim c{id, "killing", sphere ? "sphere_riem" : "hyp_riem", n, nullptr};
  c.run = [c, sphere, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField h = const_curv_riem(n, sphere ? 1.0 : -1.0);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Meter m;
    const int fields = 10;
    for (int t = 0; t < fields; ++t) {
      Eigen::VectorXd b(n);
      Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        b[i] = coef(rng);
        for (int j = i + 1; j < n; ++j) {
          f(i, j) = coef(rng);
          f(j, i) = -f(i, j);
        }
      }
      OneForm A = sphere ? sphere_killing_form(b, f) : lobachevskian_killing_form(b, f);
      for (int s = 0; s < cfg.samples / fields; ++s)
        m.update(killing_residual(h, A, h.sample_point(rng)));
    }
    return finish(c, cfg, m.worst, 1e-9);
  };
  return c;
}

Claim killing_span_claim(const std::string& id, int n) {
  Claim c{id, "killing", "sphere_riem", n, nullptr};
  c.run = [c, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField h = const_curv_riem(n, 1.0);
    // Basis fields: n translations (b = e_i) and n(n-1)/2 rotations (f = E_ij).
    std::vector<std::function<Eigen::VectorXd(const Eigen::VectorXd&)>> fields;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
      b[i] = 1.0;
      fields.push_back(killing_vector_field(b, Eigen::MatrixXd::Zero(n, n), +1.0));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
        f(i, j) = 1.0;
        f(j, i) = -1.0;
        fields.push_back(killing_vector_field(Eigen::VectorXd::Zero(n), f, +1.0));
      }
    std::vector<Eigen::VectorXd> pts{h.sample_point(rng), h.sample_point(rng),
                                     h.sample_point(rng)};
    Eigen::MatrixXd stack(static_cast<int>(fields.size()), 3 * n);
    for (size_t k = 0; k < fields.size(); ++k)
      for (int t = 0; t < 3; ++t)
        stack.block(static_cast<int>(k), t * n, 1, n) = fields[k](pts[t]).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-9 * svd.singularValues()[0]) rank++;
    const int want = n * (n + 1) / 2;
    return finish(c, cfg, std::abs(rank - want), 0.5,
                  "span dim " + std::to_string(rank) + " want " + std::to_string(want));
  };
  return c;
}

// ---------------------------------------------------------------------------
// Criterion 10: cross-validation
// ---------------------------------------------------------------------------

Claim crossval_closed_claim(const std::string& id, const std::string& fam, int n,
                            bool constant_lambda) {
  Claim c{id, "crossval", fam, n, nullptr};
  c.run = [c, fam, n, constant_lambda](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng, constant_lambda);
    Meter m;
    for (int s = 0; s < std::max(10, cfg.samples / 2); ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      WalkerData w = walker_extract(g, p);
      WalkerClosedForms cf = walker_closed_forms(g, p);
      m.update((w.T - cf.T).cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) m.update(w.hP(i, j, k) - cf.hP(i, j, k));
    }
    return finish(c, cfg, m.worst, 1e-8);
  };
  return c;
}

Claim crossval_frame_claim(const std::string& id, const std::string& fam, int n) {
  Claim c{id, "crossval", fam, n, nullptr};
  c.run = [c, fam, n](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    MetricField g = make_family(fam, n, rng);
    const int d = n + 2;
    Meter m;
    for (int s = 0; s < std::max(10, cfg.samples / 2); ++s) {
      Eigen::VectorXd p = g.sample_point(rng);
      CurvatureBundle cb = curvature_bundle(g, p, 2);
      WalkerFrame fr = walker_frame(g, p);
      WalkerData w = walker_extract(g, p);
      m.update((ricci_from_walker(w, fr) - cb.ricci_op).cwiseAbs().maxCoeff());
      Grid4d rl_pipe = frame_components(cb.r_l_lo, fr);
      Grid4d rl_walk = r_l_from_walker(w, fr);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int cc = 0; cc < d; ++cc)
            for (int e = 0; e < d; ++e) m.update(rl_pipe(a, b, cc, e) - rl_walk(a, b, cc, e));
    }
    return finish(c, cfg, m.worst, 1e-8);
  };
  return c;
}

double fd_rel(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

//! Random smooth composite expressions; value evaluation doubles as the
//! finite-difference oracle for the jet coefficients.
struct RandomExpr {
  int m = 1;
  std::vector<MultiPoly> polys;
  int pattern = 0;

  template <class S>
  S eval(const std::vector<S>& x) const {
    auto P = [&](int k) {
      JetVector xv(m);
      (void)xv;
      if constexpr (std::is_same_v<S, double>) {
        Eigen::VectorXd v(m);
        for (int i = 0; i < m; ++i) v[i] = x[i];
        return polys[k](v);
      } else {
        JetVector v(m);
        for (int i = 0; i < m; ++i) v[i] = x[i];
        return polys[k](v);
      }
    };
    S p0 = P(0), p1 = P(1), p2 = P(2);
    switch (pattern) {
      case 0:
        return p0 + p1 * p2;
      case 1:
        return p0 / (S(1.5) + p1 * p1);
      case 2:
        return sqrt(S(1.5) + p0 * p0) * p1;
      case 3:
        return exp(S(0.3) * p0) + p1 * p2;
      default:
        return reciprocal(S(2.0) + p0 * p0) - pow_int(p1, 3);
    }
  }

  double eval_at(const Eigen::VectorXd& x) const {
    std::vector<double> v(x.data(), x.data() + x.size());
    return eval_plain(v);
  }
  double eval_plain(const std::vector<double>& x) const {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = x[i];
    double p0 = polys[0](v), p1 = polys[1](v), p2 = polys[2](v);
    switch (pattern) {
      case 0:
        return p0 + p1 * p2;
      case 1:
        return p0 / (1.5 + p1 * p1);
      case 2:
        return std::sqrt(1.5 + p0 * p0) * p1;
      case 3:
        return std::exp(0.3 * p0) + p1 * p2;
      default:
        return 1.0 / (2.0 + p0 * p0) - p1 * p1 * p1;
    }
  }
};

MultiPoly random_multipoly(std::mt19937_64& rng, int m, int degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, m - 1);
  MultiPoly p(m);
  p.add_term(coef(rng), std::vector<int>(m, 0));
  const int terms = 2 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(m, 0);
    int deg = 1 + static_cast<int>(rng() % degree);
    for (int q = 0; q < deg; ++q) e[pick(rng)]++;
    p.add_term(coef(rng), e);
  }
  return p;
}

Claim jets_fd_claim(const std::string& id) {
  Claim c{id, "crossval", "jets", 0, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    std::uniform_real_distribution<double> unit(-0.8, 0.8);
    Meter m;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
      RandomExpr ex;
      ex.m = 1 + static_cast<int>(rng() % 3);
      ex.pattern = static_cast<int>(rng() % 5);
      for (int k = 0; k < 3; ++k) ex.polys.push_back(random_multipoly(rng, ex.m, 2));
      Eigen::VectorXd x(ex.m);
      for (int i = 0; i < ex.m; ++i) x[i] = unit(rng);

      std::vector<Jet> seeds(ex.m);
      for (int i = 0; i < ex.m; ++i) seeds[i] = Jet::seed(i, x[i], 3, ex.m);
      Jet jf = ex.eval(seeds);

      const double h = 1e-4;
      auto at = [&](const Eigen::VectorXd& y) { return ex.eval_at(y); };
      for (int i = 0; i < ex.m; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        m.update(fd_rel(jf.deriv(i), (at(xp) - at(xm)) / (2 * h)));
        m.update(fd_rel(jf.deriv2(i, i), (at(xp) - 2 * at(x) + at(xm)) / (h * h)));
        for (int j = i + 1; j < ex.m; ++j) {
          Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
          pp[i] += h;
          pp[j] += h;
          pm[i] += h;
          pm[j] -= h;
          mp[i] -= h;
          mp[j] += h;
          mm[i] -= h;
          mm[j] -= h;
          m.update(fd_rel(jf.deriv2(i, j), (at(pp) - at(pm) - at(mp) + at(mm)) / (4 * h * h)));
        }
      }
      // Directional third derivative at a wider step (f64 conditioning).
      Eigen::VectorXd w(ex.m);
      for (int i = 0; i < ex.m; ++i) w[i] = unit(rng);
      w.normalize();
      double d3 = 0.0;
      for (int i = 0; i < ex.m; ++i)
        for (int j = 0; j < ex.m; ++j)
          for (int k = 0; k < ex.m; ++k) d3 += jf.deriv3(i, j, k) * w[i] * w[j] * w[k];
      const double H = 8e-4;
      double fd3 = (at(x + 2 * H * w) - 2 * at(x + H * w) + 2 * at(x - H * w) -
                    at(x - 2 * H * w)) /
                   (2 * H * H * H);
      m.update(fd_rel(d3, fd3));
    }
    return finish(c, cfg, m.worst, 1e-6);
  };
  return c;
}

Claim metric_fd_claim(const std::string& id) {
  Claim c{id, "crossval", "families", 0, nullptr};
  c.run = [c](const ClaimConfig& cfg) {
    auto rng = rng_for(cfg, c.id);
    Meter m;
    for (const char* fam : {"ppwave_f1", "sim_f2", "sphere_f3", "hyp_f4"}) {
      MetricField g = make_family(fam, 2, rng);
      const int d = g.dim();
      for (int s = 0; s < 5; ++s) {
        Eigen::VectorXd p = g.sample_point(rng);
        JetMatrix gj = g.eval(p, 2);
        const double h = 1e-4;
        for (int a = 0; a < d; ++a)
          for (int b = a; b < d; ++b) {
            auto at = [&](const Eigen::VectorXd& y) { return g.eval_value(y)(a, b); };
            for (int i = 0; i < d; ++i) {
              Eigen::VectorXd xp = p, xm = p;
              xp[i] += h;
              xm[i] -= h;
              m.update(fd_rel(gj(a, b).deriv(i), (at(xp) - at(xm)) / (2 * h)));
              m.update(
                  fd_rel(gj(a, b).deriv2(i, i), (at(xp) - 2 * at(p) + at(xm)) / (h * h)));
            }
          }
      }
    }
    return finish(c, cfg, m.worst, 1e-6);
  };
  return c;
}

}  // namespace

std::vector<Claim> default_claims() {
  std::vector<Claim> all;
  const std::vector<std::pair<std::string, std::string>> fams = {
      {"f1", "ppwave_f1"}, {"f2", "sim_f2"}, {"f3", "sphere_f3"}, {"f4", "hyp_f4"}};
  for (const auto& [tag, fam] : fams)
    for (int n : {2, 3, 4}) {
      std::string nn = "-n" + std::to_string(n);
      all.push_back(weyl_claim("01-weyl-" + tag + nn, fam, n));
      all.push_back(lemma1_claim("02-lemma1-" + tag + nn, fam, n));
    }
  all.push_back(lemma1_perturbed_claim("02-lemma1-perturbed-exceeds"));

  for (int n : {2, 3, 4}) {
    std::string nn = "-n" + std::to_string(n);
    all.push_back(ricci_f1_slot_claim("03-ricci-f1-slot" + nn, n));
    all.push_back(ricci_f1_nilpotent_claim("03-ricci-f1-sq" + nn, n));
    all.push_back(ricci_f2_ric2_claim("03-ricci-f2-sq-exceeds" + nn, n));
    all.push_back(ricci_f2_ric3_claim("03-ricci-f2-cube" + nn, n));
    all.push_back(scalar_claim("04-scalar-f2" + nn, "sim_f2", n));
    all.push_back(scalar_claim("04-scalar-f3" + nn, "sphere_f3", n));
    all.push_back(scalar_claim("04-scalar-f4" + nn, "hyp_f4", n));
  }

  for (const auto& [tag, fam] : fams)
    for (int n : {2, 3, 4})
      all.push_back(holonomy_claim("05-holonomy-" + tag + "-n" + std::to_string(n), fam, n));

  all.push_back(gt_original_weyl_claim("06-gt-original-weyl-exceeds"));
  all.push_back(gt_corrected_weyl_claim("06-gt-corrected-weyl"));
  all.push_back(gt_holonomy_claim("06-gt-corrected-holonomy"));
  all.push_back(gt_transform_claim("06-gt-transform"));

  for (int n : {2, 3, 4}) {
    std::string nn = "-n" + std::to_string(n);
    all.push_back(thc2_claim("07-thc2-sphere" + nn, true, n));
    all.push_back(thc2_claim("07-thc2-hyp" + nn, false, n));
    all.push_back(thc2_flat_claim("07-thc2-flat" + nn, n));
  }

  all.push_back(product_weyl_claim("08-product-d4", 2, 2));
  all.push_back(product_weyl_claim("08-product-d5", 2, 3));
  all.push_back(product_weyl_claim("08-product-d6", 3, 3));
  all.push_back(product_cotton_claim("08-product-d3-cotton"));

  for (int n : {2, 3, 4}) {
    std::string nn = "-n" + std::to_string(n);
    all.push_back(killing_claim("09-killing-sphere" + nn, true, n));
    all.push_back(killing_claim("09-killing-hyp" + nn, false, n));
    all.push_back(killing_span_claim("09-killing-span" + nn, n));
  }

  for (int n : {2, 3}) {
    std::string nn = "-n" + std::to_string(n);
    all.push_back(crossval_closed_claim("10-crossval-closed-f1" + nn, "ppwave_f1", n, false));
    all.push_back(crossval_closed_claim("10-crossval-closed-f2" + nn, "sim_f2", n, false));
    all.push_back(crossval_closed_claim("10-crossval-closed-f3c" + nn, "sphere_f3", n, true));
    all.push_back(crossval_closed_claim("10-crossval-closed-f4c" + nn, "hyp_f4", n, true));
    all.push_back(crossval_frame_claim("10-crossval-frame-f1" + nn, "ppwave_f1", n));
    all.push_back(crossval_frame_claim("10-crossval-frame-f2" + nn, "sim_f2", n));
    all.push_back(crossval_frame_claim("10-crossval-frame-f3" + nn, "sphere_f3", n));
    all.push_back(crossval_frame_claim("10-crossval-frame-f4" + nn, "hyp_f4", n));
  }
  all.push_back(jets_fd_claim("10-crossval-jets-fd"));
  all.push_back(metric_fd_claim("10-crossval-metric-fd"));

  all.push_back(nordstrom_claim("11-nordstrom-f1", "ppwave_f1"));
  all.push_back(nordstrom_claim("11-nordstrom-f2", "sim_f2"));

  std::sort(all.begin(), all.end(), [](const Claim& a, const Claim& b) { return a.id < b.id; });
  return all;
}

std::vector<Claim> select_claims(const std::vector<Claim>& all,
                                 const std::vector<std::string>& ids) {
  std::vector<Claim> out;
  for (const auto& c : all)
    if (std::find(ids.begin(), ids.end(), c.id) != ids.end()) out.push_back(c);
  return out;
}

std::vector<Claim> filter_claims(const std::vector<Claim>& all, const std::string& group,
                                 const std::string& family, int n) {
  std::vector<Claim> out;
  for (const auto& c : all) {
    if (!group.empty() && c.group != group) continue;
    if (!family.empty() && c.family != family) continue;
    if (n > 0 && c.n != n) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<ClaimResult> run_claims(const std::vector<Claim>& claims, const ClaimConfig& cfg) {
  std::vector<Claim> ordered = claims;
  std::sort(ordered.begin(), ordered.end(),
            [](const Claim& a, const Claim& b) { return a.id < b.id; });
  std::vector<ClaimResult> out;
  for (const auto& c : ordered) {
    auto t0 = std::chrono::steady_clock::now();
    ClaimResult r;
    try {
      r = c.run(cfg);
    } catch (const std::exception& e) {
      r.claim_id = c.id;
      r.family = c.family;
      r.n = c.n;
      r.samples = cfg.samples;
      r.seed = cfg.seed;
      r.pass = false;
      r.skipped = true;
      r.max_residual = std::numeric_limits<double>::quiet_NaN();
      r.note = e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string render_report_jsonl(const std::vector<ClaimResult>& results) {
  std::ostringstream out;
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["claim_id"] = r.claim_id;
    j["family"] = r.family;
    j["n"] = r.n;
    j["samples"] = r.samples;
    j["max_residual"] = std::isnan(r.max_residual) ? -1.0 : r.max_residual;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["elapsed_ms"] = 0;  // zeroed: reports are bit-identical for fixed seed/flags
    j["seed"] = r.seed;
    if (r.skipped) j["skipped"] = true;
    out << j.dump() << "\n";
    (r.skipped ? skipped : (r.pass ? passed : failed))++;
  }
  nlohmann::ordered_json summary;
  summary["summary"] = true;
  summary["claims"] = static_cast<int>(results.size());
  summary["passed"] = passed;
  summary["failed"] = failed;
  summary["skipped"] = skipped;
  out << summary.dump() << "\n";
  return out.str();
}

std::string render_table(const std::vector<ClaimResult>& results) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-34s %-18s %2s %12s %10s %6s %7s\n", "claim", "family",
                "n", "residual", "tol", "pass", "ms");
  out << line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof(line), "%-34s %-18s %2d %12.3e %10.1e %6s %7ld\n",
                  r.claim_id.c_str(), r.family.c_str(), r.n, r.max_residual, r.tolerance,
                  r.skipped ? "SKIP" : (r.pass ? "ok" : "FAIL"), r.elapsed_ms);
    out << line;
    if (!r.note.empty()) out << "    note: " << r.note << "\n";
  }
  return out.str();
}

int exit_code_for(const std::vector<ClaimResult>& results) {
  bool any_skip = false, any_fail = false;
  for (const auto& r : results) {
    any_skip |= r.skipped;
    any_fail |= (!r.pass && !r.skipped);
  }
  if (any_skip) return 2;
  return any_fail ? 1 : 0;
}

}  // namespace cflat
