//! \file walker.hpp
//! \brief Walker-frame curvature data, conformal-flatness residuals, and the
//! gauge / coordinate transformations of the classification.
//!
//! The Walker frame at a point of g = 2dvdu + h + 2A du + H du^2 is
//!   p = d_v,  X_i = d_i - A_i d_v,  q = d_u - (H/2) d_v.
//! Frame quantities (P, T, and the fiber curvature condition) are reported in
//! the orientation of the source formulas, which is opposite to the pipeline's
//! pinned Riemann convention; the single constant kWalkerOrientation = -1
//! absorbs the flip (fixed once by the family-1 closed-form cross-check).

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "cflat/curvature.hpp"
#include "cflat/fields.hpp"
#include "cflat/tensor.hpp"

namespace cflat {

//! Orientation of frame-extracted curvature data relative to the pipeline.
inline constexpr double kWalkerOrientation = -1.0;

struct WalkerFrame {
  Eigen::VectorXd p, q;   // coordinate components
  Eigen::MatrixXd X;      // columns X_1..X_n
  Eigen::MatrixXd M;      // full frame matrix [p | X | q]
  Eigen::MatrixXd gval;   // metric values at the point
};

WalkerFrame walker_frame(const MetricField& g, const Eigen::VectorXd& pt);

struct WalkerData {
  int n = 0;
  double lambda = 0.0;
  Eigen::VectorXd vvec;   // components of vec v in the X-frame
  Eigen::MatrixXd F;      // F_ij = d_i A_j - d_j A_i
  Grid3d hP;              // h_{il} P^l_{jk}
  Grid3d P;               // P^i_{jk}
  Eigen::MatrixXd T;      // T_{ij}
  Eigen::MatrixXd h, hinv;
  double s0 = 0.0;        // fiber scalar curvature
  Eigen::MatrixXd ric_h;  // fiber Ricci operator
  Grid4d R0;              // fiber curvature R0_{ijkl}, pipeline orientation
  std::optional<std::pair<double, double>> f_split;  // (f1, f0) of T = (v f1 + f0) id
};

//! The standalone fiber metric h(.; u fixed) as an n-dimensional field.
MetricField fiber_metric(const MetricField& g, const Eigen::VectorXd& pt);

WalkerData walker_extract(const MetricField& g, const Eigen::VectorXd& pt,
                          bool with_f_split = false);

//! Closed forms for P and T available when h does not depend on u.
struct WalkerClosedForms {
  Grid3d hP;
  Eigen::MatrixXd T;
};
WalkerClosedForms walker_closed_forms(const MetricField& g, const Eigen::VectorXd& pt);

//! Residuals of the four conditions equivalent to W = 0:
//!   (i) s0 + n(n-1) lambda,  (ii) R0 = -(lambda/2) R_id,
//!   (iii) P(X) = v ^ X,      (iv) T proportional to id.
struct Lemma1Residuals {
  double scalar = 0.0;
  double fiber_curv = 0.0;
  double p_wedge = 0.0;
  double t_prop = 0.0;
  double max() const {
    return std::max(std::max(scalar, fiber_curv), std::max(p_wedge, t_prop));
  }
};
Lemma1Residuals lemma1_residuals(const MetricField& g, const Eigen::VectorXd& pt);

//! Ricci operator rebuilt from Walker data (coordinate basis), and the frame
//! components of R_L rebuilt from Walker data; both for cross-validation
//! against the coordinate pipeline.
Eigen::MatrixXd ricci_from_walker(const WalkerData& w, const WalkerFrame& f);
//! rl(a,b,c,d) = g(R_L(Y_a, Y_b) Y_c, Y_d) over the frame (p, X_1..X_n, q).
Grid4d r_l_from_walker(const WalkerData& w, const WalkerFrame& f);
//! Same contraction of an arbitrary (0,4) tensor given in coordinates.
Grid4d frame_components(const Grid4d& t_lo, const WalkerFrame& f);

//! Ric-tilde contraction h^{ij} P(X_i) X_j, in the X-frame.
Eigen::VectorXd ric_tilde_p(const WalkerData& w);

//! Polynomial coordinate map: old coordinates as polynomials of new ones.
struct CoordMap {
  std::vector<MultiPoly> comp;
  int dim() const { return static_cast<int>(comp.size()); }
  JetVector apply(const JetVector& c) const;
  Eigen::VectorXd apply_value(const Eigen::VectorXd& p) const;

  static CoordMap identity(int d);
  static CoordMap linear(const Eigen::MatrixXd& A);
  //! Fiber rotation (v, x, u) -> (v, R x, u).
  static CoordMap fiber_rotation(int n, const Eigen::MatrixXd& R);
  //! The dim-4 shear x -> x - y^2 + z^2 (decomposition transformation).
  static CoordMap gt_shear();
  //! v -> v + phi(x, u), other coordinates fixed (gauge isometry).
  static CoordMap v_shift(const MultiPoly& phi);
};

//! Pullback metric under the polynomial map.  Throws if the Jacobian is
//! singular at an evaluation point.
MetricField coordinate_transform(const MetricField& g, const CoordMap& map,
                                 SampleBox new_box,
                                 MetricField::DomainPred extra_domain = nullptr);

//! Gauge change A -> A + d phi, H0 -> H0 + H1 phi + 2 d_u phi for the
//! lambda = 0 families (phi a polynomial in x and u).  Throws otherwise.
MetricField gauge_transform(const MetricField& g, const MultiPoly& phi);

}  // namespace cflat
