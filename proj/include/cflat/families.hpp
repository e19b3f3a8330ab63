//! \file families.hpp
//! \brief Constructors for the Walker metric families and reference metrics.
//!
//! Coordinates are ordered (v, x^1..x^n, u); the fiber block sits at indices
//! 1..n.  All parameter functions of u are polynomials (UPoly).

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cflat/fields.hpp"

namespace cflat {

enum class FamilyId {
  flat,              // 2dvdu + sum dx^2 (Walker coordinates)
  const_curv_riem,   // Psi-chart constant-curvature Riemannian space
  const_curv_lorentz,// 2d block 2dvdu + c v^2 du^2 (curvature c)
  ppwave_f1,         // family 1: pp-wave with H = a(u) r^2
  sim_f2,            // family 2: flat fiber, H = v H1 + H0
  sphere_f3,         // family 3: sphere fiber, lambda(u) < 0
  hyp_f4,            // family 4: Lobachevskian fiber, lambda(u) > 0
  thc3_dec_sphere,   // decomposable: sphere fiber x 2d Lorentzian (-c)
  thc3_dec_hyp,      // decomposable: Lobachevskian fiber x 2d Lorentzian (+c)
  thc3_flat,         // decomposable flat
  gt_original,       // dim-4 metric with dx-mixed terms (not Walker-aligned)
  gt_corrected,      // dim-4 Walker metric, conformally flat
  gt_simplified,     // gt_corrected after the shear x -> x - y^2 + z^2
  cahen_wallach,     // ppwave_f1 with a == 1
};

struct FamilySpec {
  FamilyId id = FamilyId::flat;
  int n = 2;          // fiber dimension (ignored by the fixed dim-4 metrics)
  UPoly a, D;         // scalar parameter functions
  std::vector<UPoly> B, C;
  UPoly lambda;       // families 3/4
  double c = 1.0;     // decomposable/constant-curvature parameter
};

//! Build the metric for a family spec.  Throws std::invalid_argument naming
//! the violated constraint when the spec is inadmissible.
MetricField build_family(const FamilySpec& spec);

//! Convenience constructors.
MetricField flat_walker(int n);
MetricField ppwave_f1(int n, const UPoly& a);
//! Family-1 variant with an extra polynomial added to H0 (perturbation hook).
MetricField ppwave_with_extra(int n, const UPoly& a, const MultiPoly& extra_xu);
MetricField sim_f2(int n, const UPoly& a, const std::vector<UPoly>& B,
                   const std::vector<UPoly>& C, const UPoly& D);
MetricField sphere_f3(int n, const UPoly& lambda, const UPoly& a,
                      const std::vector<UPoly>& B, const std::vector<UPoly>& C,
                      const UPoly& D);
MetricField hyp_f4(int n, const UPoly& lambda, const UPoly& a,
                   const std::vector<UPoly>& B, const std::vector<UPoly>& C,
                   const UPoly& D);

//! Constant sectional curvature k != 0 Riemannian metric on the Psi-chart,
//! h = (1/|k|) * 4/(1 +- r^2)^2 * sum dx^2.
MetricField const_curv_riem(int n, double k);
//! Flat Euclidean metric in n dimensions.
MetricField euclidean(int n);
//! One-dimensional line with metric sign*(dt)^2, sign in {+1,-1}.
MetricField line_metric(double sign);
//! 2d Lorentzian constant-curvature block 2dvdu + c v^2 du^2 (curvature c).
MetricField const_curv_lorentz2(double c);

MetricField thc3_dec_sphere(int n, double c);
MetricField thc3_dec_hyp(int n, double c);
MetricField thc3_flat(int n);

MetricField gt_original();
MetricField gt_corrected();
MetricField gt_simplified();
MetricField cahen_wallach(int n);

//! Block-diagonal product metric on the product chart.
MetricField product_metric(const MetricField& g1, const MetricField& g2);

//! Draw a random UPoly of the given degree with coefficients in [-1,1].
UPoly random_upoly(std::mt19937_64& rng, int degree);

}  // namespace cflat
