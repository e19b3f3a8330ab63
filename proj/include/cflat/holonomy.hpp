//! \file holonomy.hpp
//! \brief Ambrose-Singer style holonomy estimation from transported curvature.
//!
//! Curvature endomorphisms at sample points are parallel-transported back to a
//! base point along axis-aligned polylines, orthonormalized by SVD, and closed
//! under commutators.  The resulting span is a numerical lower bound for the
//! holonomy algebra; classification labels are claimed only when the span
//! dimension and invariant-subspace flags match a known algebra.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cflat/fields.hpp"

namespace cflat {

struct EndoSpan {
  Eigen::VectorXd base;
  std::vector<Eigen::MatrixXd> gens;   // raw transported generators
  std::vector<Eigen::MatrixXd> basis;  // orthonormal bracket-closed basis
  int dim = 0;                  // span dimension before bracket closure
  int bracket_closed_dim = 0;
  bool preserves_null_line = false;
  bool preserves_nondeg_subspace = false;
  int fiber_rotation_dim = 0;
  std::vector<int> dims_by_sample;  // span dim after each sample (monotone)
};

//! Default base point (0.1, 0.2, ..., 0.2, 0.1); avoids the symmetric
//! degeneracies at x = 0.
Eigen::VectorXd default_base_point(int dim);

//! Draw sample points for the span inside the metric's box, shrunk so the
//! axis-aligned paths from the base stay in the chart.
std::vector<Eigen::VectorXd> holonomy_samples(const MetricField& g, int count,
                                              std::uint64_t seed);

EndoSpan curvature_span(const MetricField& g, const Eigen::VectorXd& base,
                        const std::vector<Eigen::VectorXd>& samples,
                        std::uint64_t seed);

//! Label from span dimension and flags; "unrecognized(dim)" is a legal
//! outcome, never an error.
std::string classify(const EndoSpan& span, int n);

}  // namespace cflat
