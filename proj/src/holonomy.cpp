#include "cflat/holonomy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "cflat/curvature.hpp"

namespace cflat {

namespace {

constexpr double kRankCutoff = 1e-7;   // relative singular-value cutoff
constexpr double kLineTol = 1e-6;      // invariant-line test
constexpr double kSkewTol = 1e-6;      // transport metric-compatibility

Eigen::VectorXd vectorize(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd devectorize(const Eigen::VectorXd& v, int d) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), d, d);
}

//! Rank and orthonormal row basis of the stacked generator matrix.
std::pair<int, std::vector<Eigen::MatrixXd>> svd_span(
    const std::vector<Eigen::MatrixXd>& gens, int d) {
  if (gens.empty()) return {0, {}};
  Eigen::MatrixXd stack(static_cast<int>(gens.size()), d * d);
  for (size_t i = 0; i < gens.size(); ++i) stack.row(static_cast<int>(i)) = vectorize(gens[i]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinV);
  double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  std::vector<Eigen::MatrixXd> basis;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()[i] > kRankCutoff * smax && smax > 0.0) {
      rank++;
      basis.push_back(devectorize(svd.matrixV().col(i), d));
    }
  }
  return {rank, basis};
}

//! Axis-aligned polyline from a to b, one coordinate per segment.
std::vector<Eigen::VectorXd> axis_path(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  std::vector<Eigen::VectorXd> path{a};
  Eigen::VectorXd cur = a;
  for (int i = 0; i < a.size(); ++i) {
    if (cur[i] == b[i]) continue;
    cur[i] = b[i];
    path.push_back(cur);
  }
  return path;
}

//! Generalized eigenspace basis (complex) for an eigenvalue cluster.
Eigen::MatrixXcd generalized_eigenspace(const Eigen::MatrixXcd& A, std::complex<double> lam,
                                        int mult) {
  const int d = static_cast<int>(A.rows());
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd shifted = A - lam * Eigen::MatrixXcd::Identity(d, d);
  for (int k = 0; k < mult; ++k) B = shifted * B;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
  double smax = svd.singularValues()[0];
  int null_dim = 0;
  for (int i = 0; i < d; ++i)
    if (svd.singularValues()[i] <= 1e-8 * std::max(smax, 1.0)) null_dim++;
  return svd.matrixV().rightCols(null_dim);
}

//! Search for a proper invariant subspace on which the metric restricts
//! nondegenerately.  Candidates come from eigenvalue clusters of a generic
//! element of the span.
bool find_nondeg_invariant(const std::vector<Eigen::MatrixXd>& basis,
                           const Eigen::MatrixXd& gval, std::mt19937_64& rng) {
  if (basis.empty()) return false;
  const int d = static_cast<int>(gval.rows());
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (const auto& b : basis) A += coef(rng) * b;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A.cast<std::complex<double>>());
  if (es.info() != Eigen::Success) return false;

  // Cluster eigenvalues.
  std::vector<std::complex<double>> lam;
  std::vector<int> mult;
  double scale = 0.0;
  for (int i = 0; i < d; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
  double tol = 1e-6 * std::max(scale, 1.0);
  for (int i = 0; i < d; ++i) {
    std::complex<double> v = es.eigenvalues()[i];
    bool found = false;
    for (size_t c = 0; c < lam.size(); ++c)
      if (std::abs(lam[c] - v) < tol) {
        mult[c]++;
        found = true;
        break;
      }
    if (!found) {
      lam.push_back(v);
      mult.push_back(1);
    }
  }
  const int nc = static_cast<int>(lam.size());
  if (nc <= 1) return false;

  // Every conjugation-closed nonempty proper subset of clusters spans an
  // invariant subspace of the generic element; test those against the basis.
  for (int mask = 1; mask < (1 << nc) - 1; ++mask) {
    bool conj_closed = true;
    int dim = 0;
    for (int c = 0; c < nc; ++c) {
      if (!(mask & (1 << c))) continue;
      dim += mult[c];
      if (std::abs(lam[c].imag()) > tol) {
        bool partner = false;
        for (int c2 = 0; c2 < nc; ++c2)
          if ((mask & (1 << c2)) && std::abs(lam[c2] - std::conj(lam[c])) < tol) partner = true;
        if (!partner) conj_closed = false;
      }
    }
    if (!conj_closed || dim == 0 || dim >= d) continue;

    // Real basis of the candidate subspace.
    std::vector<Eigen::VectorXd> cols;
    for (int c = 0; c < nc; ++c) {
      if (!(mask & (1 << c))) continue;
      Eigen::MatrixXcd V = generalized_eigenspace(A.cast<std::complex<double>>(), lam[c], mult[c]);
      for (int j = 0; j < V.cols(); ++j) {
        cols.push_back(V.col(j).real());
        if (std::abs(lam[c].imag()) > tol) cols.push_back(V.col(j).imag());
      }
    }
    if (cols.empty()) continue;
    Eigen::MatrixXd C(d, static_cast<int>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) C.col(static_cast<int>(j)) = cols[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> csvd(C, Eigen::ComputeThinU);
    int vdim = 0;
    for (int i = 0; i < csvd.singularValues().size(); ++i)
      if (csvd.singularValues()[i] > 1e-8 * csvd.singularValues()[0]) vdim++;
    if (vdim == 0 || vdim >= d) continue;
    Eigen::MatrixXd V = csvd.matrixU().leftCols(vdim);

    // Invariance under all basis generators.
    Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(d, d) - V * V.transpose();
    bool invariant = true;
    for (const auto& B : basis)
      if ((proj * (B * V)).norm() > 1e-6 * std::max(1.0, B.norm())) {
        invariant = false;
        break;
      }
    if (!invariant) continue;

    // Nondegeneracy of g restricted to the subspace.
    Eigen::MatrixXd gres = V.transpose() * gval * V;
    Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(gres);
    if (gsvd.singularValues()[vdim - 1] > 1e-6) return true;
  }
  return false;
}

}  // namespace

Eigen::VectorXd default_base_point(int dim) {
  Eigen::VectorXd p = Eigen::VectorXd::Constant(dim, 0.2);
  p[0] = 0.1;
  p[dim - 1] = 0.1;
  return p;
}

std::vector<Eigen::VectorXd> holonomy_samples(const MetricField& g, int count,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int d = g.dim();
  // Half-size box around the center keeps axis paths inside the chart
  // (corner coordinates mix two sampled points).
  std::vector<Eigen::VectorXd> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 10000) {
    attempts++;
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) {
      auto [lo, hi] = g.sample_box().range[i];
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      p[i] = mid + 0.5 * half * unit(rng);
    }
    if (!g.in_domain(p)) continue;
    // Corners of the axis path against the base must stay inside too.
    bool ok = true;
    for (const auto& wp : axis_path(default_base_point(d), p))
      if (!g.in_domain(wp)) ok = false;
    if (ok) out.push_back(p);
  }
  if (static_cast<int>(out.size()) < count)
    throw std::runtime_error("holonomy_samples: could not draw enough in-chart samples");
  return out;
}

EndoSpan curvature_span(const MetricField& g, const Eigen::VectorXd& base,
                        const std::vector<Eigen::VectorXd>& samples, std::uint64_t seed) {
  const int d = g.dim();
  EndoSpan span;
  span.base = base;
  Eigen::MatrixXd gb = g.eval_value(base);

  for (const auto& y : samples) {
    // Transport the coordinate frame base -> y, then pull endomorphisms back.
    auto path = axis_path(base, y);
    Eigen::MatrixXd M = parallel_transport(g, path, Eigen::MatrixXd::Identity(d, d));

    // Metric compatibility diagnostic: M^T g(y) M == g(base).
    Eigen::MatrixXd gy = g.eval_value(y);
    double drift = (M.transpose() * gy * M - gb).norm() / std::max(1.0, gb.norm());
    if (drift > kSkewTol)
      throw std::runtime_error(
          "curvature_span: transport loses metric-compatibility beyond 1e-6 "
          "(step count too small)");

    CurvatureBundle cb = curvature_bundle(g, y, 2);
    Eigen::MatrixXd Minv = M.inverse();
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        Eigen::MatrixXd R(d, d);  // R(e_a, e_b) as endomorphism
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) R(i, j) = cb.riemann_up(i, j, a, b);
        span.gens.push_back(Minv * R * M);
      }
    span.dims_by_sample.push_back(svd_span(span.gens, d).first);
  }

  auto [dim, basis] = svd_span(span.gens, d);
  span.dim = dim;

  // Close under brackets until the rank stabilizes.
  std::vector<Eigen::MatrixXd> closed = basis;
  int rank = dim;
  for (int iter = 0; iter < d * d; ++iter) {
    std::vector<Eigen::MatrixXd> added = closed;
    const size_t m = closed.size();
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j)
        added.push_back(closed[i] * closed[j] - closed[j] * closed[i]);
    auto [r2, b2] = svd_span(added, d);
    if (r2 == rank) break;
    rank = r2;
    closed = b2;
  }
  span.bracket_closed_dim = rank;
  span.basis = closed;

  // Null-line test along d_v at the base.
  Eigen::VectorXd ell = Eigen::VectorXd::Zero(d);
  ell[0] = 1.0;
  span.preserves_null_line = !span.basis.empty();
  for (const auto& A : span.basis) {
    Eigen::VectorXd img = A * ell;
    Eigen::VectorXd off = img - img.dot(ell) * ell;
    if (off.norm() > kLineTol * std::max(1.0, A.norm())) span.preserves_null_line = false;
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  span.preserves_nondeg_subspace = find_nondeg_invariant(span.basis, gb, rng);

  // Induced rotation content on ell-perp / ell when the null line is preserved.
  if (span.preserves_null_line && !span.basis.empty()) {
    Eigen::VectorXd gell = gb * ell;
    Eigen::JacobiSVD<Eigen::MatrixXd> ksvd(gell.transpose(), Eigen::ComputeFullV);
    Eigen::MatrixXd perp = ksvd.matrixV().rightCols(d - 1);  // basis of ell-perp
    // Remove the ell direction itself from the quotient basis.
    Eigen::MatrixXd quot(d, d - 2);
    {
      Eigen::MatrixXd tmp = perp;
      for (int c = 0; c < tmp.cols(); ++c) tmp.col(c) -= tmp.col(c).dot(ell) * ell;
      Eigen::JacobiSVD<Eigen::MatrixXd> qsvd(tmp, Eigen::ComputeThinU);
      quot = qsvd.matrixU().leftCols(d - 2);
    }
    std::vector<Eigen::MatrixXd> induced;
    for (const auto& A : span.basis) induced.push_back(quot.transpose() * A * quot);
    span.fiber_rotation_dim = svd_span(induced, d - 2).first;
  }
  return span;
}

std::string classify(const EndoSpan& span, int n) {
  const int sim_dim = 1 + n + n * (n - 1) / 2;
  const int so1n1_dim = (n + 2) * (n + 1) / 2;
  if (span.bracket_closed_dim == 0) return "trivial";

  // Abelian nilpotent span inside the null-translation part.
  if (span.preserves_null_line && span.bracket_closed_dim <= n &&
      span.bracket_closed_dim == span.dim && span.fiber_rotation_dim == 0) {
    bool nilpotent = true;
    for (const auto& A : span.basis)
      if ((A * A).norm() > 1e-8 * A.norm()) nilpotent = false;
    if (nilpotent)
      return "null_translations(" + std::to_string(span.bracket_closed_dim) + ")";
  }
  if (span.preserves_null_line && !span.preserves_nondeg_subspace &&
      span.bracket_closed_dim == sim_dim)
    return "sim(" + std::to_string(n) + ")";
  if (span.preserves_nondeg_subspace && span.bracket_closed_dim == 1 + n * (n - 1) / 2) {
    // so(1,1) (+) so(n): a boost factor shows up as a generator with real
    // spectrum; pure rotation splits have none.
    bool has_boost = false;
    for (const auto& A : span.basis) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(A);
      for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()[i].real()) > 1e-4 &&
            std::abs(es.eigenvalues()[i].imag()) < 1e-6)
          has_boost = true;
    }
    if (has_boost) return "so(1,1)+so(" + std::to_string(n) + ")";
  }
  if (span.preserves_nondeg_subspace) return "so_split(" + std::to_string(span.bracket_closed_dim) + ")";
  if (span.bracket_closed_dim == so1n1_dim) return "so(1," + std::to_string(n + 1) + ")";
  return "unrecognized(" + std::to_string(span.bracket_closed_dim) + ")";
}

}  // namespace cflat
