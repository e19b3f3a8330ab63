//! \file killing.hpp
//! \brief Killing and conformal 1-form verification on constant-curvature
//! fiber charts.

#pragma once

#include <Eigen/Dense>
#include <functional>

#include "cflat/fields.hpp"

namespace cflat {

//! A 1-form on an n-dimensional chart as a jet-evaluable component list.
using OneForm = std::function<JetVector(const JetVector& x)>;

//! max_{ij} |nabla_i A_j + nabla_j A_i| at p, with h's Christoffel symbols.
double killing_residual(const MetricField& h, const OneForm& A, const Eigen::VectorXd& p);

//! Killing 1-form A_i = h_{ij} X^j on the sphere chart Psi = 4/(1+r^2)^2:
//!   X^i = x^i b_k x^k - (1/2) b_i r^2 + f_{ik} x^k + (1/2) b_i,  f skew.
OneForm sphere_killing_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& f);
//! Lobachevskian chart Psi = 4/(1-r^2)^2; the constant term is -(1/2) b_i.
OneForm lobachevskian_killing_form(const Eigen::VectorXd& b, const Eigen::MatrixXd& f);

//! The corresponding vector fields X^i (used for flow checks).
std::function<Eigen::VectorXd(const Eigen::VectorXd&)> killing_vector_field(
    const Eigen::VectorXd& b, const Eigen::MatrixXd& f, double const_sign);

//! Residual of the trace-adjusted conformal system
//!   nabla_i A_i = nabla_j A_j (all i,j),  nabla_i A_j + nabla_j A_i = 0 (i != j).
double conformal_system_residual(const MetricField& h, const OneForm& A,
                                 const Eigen::VectorXd& p);

}  // namespace cflat
