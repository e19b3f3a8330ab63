//! \file curvature.hpp
//! \brief Metric -> curvature pipeline and numerical parallel transport.
//!
//! Conventions (pinned; see README):
//!   R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z,
//!   R^a_{bcd} <-> R(e_c,e_d)e_b = R^a_{bcd} e_a,   R_{abcd} = g_{ae} R^e_{bcd},
//!   Ric_{bd} = R^a_{bad} (positive on round spheres),  s = tr Ric,
//!   L = (Ric - s/(2(d-1)) id)/(d-2),
//!   (R_L)_{abcd} built from R_L(X,Y) = LX^Y + X^LY with (X^Y)Z = g(X,Z)Y - g(Y,Z)X.
//! With these choices W = R + R_L vanishes identically on constant-curvature
//! metrics, which fixes the Riemann sign: R(X,Y) = -k X^Y at curvature k.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cflat/fields.hpp"
#include "cflat/tensor.hpp"

namespace cflat {

//! Curvature data of one metric at one point, value parts only.
//! cotton is filled only for dim 3 (order-3 jets required).
struct CurvatureBundle {
  Eigen::VectorXd point;
  Grid3d gamma;           // Gamma^a_{bc}
  Grid4d riemann_up;      // R^a_{bcd}
  Grid4d riemann_lo;      // R_{abcd}
  Eigen::MatrixXd ricci_op;
  double scalar = 0.0;
  Eigen::MatrixXd schouten_op;  // empty for dim 2
  Grid4d r_l_lo;                // empty for dim 2
  Grid4d weyl_lo;               // empty for dim < 4... filled for dim >= 3 (W=0 identically at 3)
  std::optional<Grid3d> cotton; // dim 3 only
};

//! Jet-level stages, exposed for cross-checks that need derivatives of
//! curvature (second Bianchi, Cotton).
struct CurvatureJets {
  JetMatrix g, ginv;
  Grid3<Jet> gamma;
  Grid4<Jet> riemann_up;
  Grid4<Jet> riemann_lo;
  Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic> ricci_lo;
  Eigen::Matrix<Jet, Eigen::Dynamic, Eigen::Dynamic> ricci_op;
  Jet scalar;
};

//! Christoffel symbols as jets one order below the metric jets.
Grid3<Jet> christoffel_jets(const JetMatrix& g);
//! Christoffel values at a point (metric evaluated at the given order).
Grid3d christoffel(const MetricField& g, const Eigen::VectorXd& p, int order = 2);

//! Full jet pipeline at a point; metric order must be >= 2.
CurvatureJets curvature_jets(const MetricField& g, const Eigen::VectorXd& p, int order);

//! Value-level bundle; order defaults to 2, or 3 when dim == 3 (Cotton).
CurvatureBundle curvature_bundle(const MetricField& g, const Eigen::VectorXd& p,
                                 int order = 0);

//! Sectional curvature of the plane spanned by (coordinate) vectors X, Y.
double sectional_curvature(const CurvatureBundle& cb, const Eigen::MatrixXd& gval,
                           const Eigen::VectorXd& X, const Eigen::VectorXd& Y);

//! Transport a frame (columns) along a piecewise-linear coordinate path by
//! integrating dX^a/dt = -Gamma^a_{bc} gdot^b X^c with fixed-step RK4,
//! steps_per_unit steps per unit of Euclidean coordinate length.
Eigen::MatrixXd parallel_transport(const MetricField& g,
                                   const std::vector<Eigen::VectorXd>& waypoints,
                                   const Eigen::MatrixXd& frame, int steps_per_unit = 64);

//! max |.| over all entries.
double sup_norm(const Grid4d& t);
double sup_norm(const Grid3d& t);

}  // namespace cflat
