#include "scalemix/hiw.hpp"

#include <cmath>

#include "scalemix/error.hpp"
#include "scalemix/linalg.hpp"

namespace scalemix {

namespace {

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& m, ErrorCode code, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw Error(code, what);
  return llt.matrixL();
}

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd e(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) e(i, j) = std_normal(rng);
  return e;
}

void validate_scale(const Eigen::MatrixXd& scale, int q) {
  if (scale.rows() != q || scale.cols() != q)
    throw Error(ErrorCode::NonPdScale, "HIW scale has the wrong dimensions");
  if (!scale.allFinite()) throw Error(ErrorCode::NonPdScale, "HIW scale has non-finite entries");
  const double tol = 1e-10 * std::max(1.0, scale.cwiseAbs().maxCoeff());
  if (!is_symmetric(scale, tol)) throw Error(ErrorCode::NonPdScale, "HIW scale is not symmetric");
  if (!is_positive_definite(scale))
    throw Error(ErrorCode::NonPdScale, "HIW scale is not positive definite");
}

}  // namespace

Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale, Rng& rng) {
  const Eigen::Index p = scale.rows();
  if (!(df > p - 1.0))
    throw Error(ErrorCode::InvalidParams, "inverse Wishart needs df > dimension - 1");
  const Eigen::MatrixXd m =
      cholesky_lower(scale, ErrorCode::NonPdScale, "inverse Wishart scale is not positive definite");

  // Bartlett factor A of a Wishart(df, I) draw W = A A'. Then
  // (M A^-T)(M A^-T)' ~ IW(df, M M').
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(chi_squared(df - static_cast<double>(i), rng));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = std_normal(rng);
  }
  const Eigen::MatrixXd xt = a.triangularView<Eigen::Lower>().solve(m.transpose());
  Eigen::MatrixXd sigma = xt.transpose() * xt;
  return 0.5 * (sigma + sigma.transpose());
}

HiwDraw sample_hiw(const DecomposableGraph& g, const HiwParams& params, Rng& rng) {
  const int q = g.num_vertices();
  if (!(params.degrees > 0.0) || !std::isfinite(params.degrees))
    throw Error(ErrorCode::InvalidParams, "HIW degrees must be positive");
  validate_scale(params.scale, q);
  if (!is_decomposable(g.adjacency()))
    throw Error(ErrorCode::NotDecomposable, "HIW requires a decomposable graph");

  const Eigen::MatrixXd& d = params.scale;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(q, q);
  VertexSet history(q);

  const auto& cliques = g.cliques();
  const auto& separators = g.separators();
  for (std::size_t j = 0; j < cliques.size(); ++j) {
    const VertexSet& clique = cliques[j];
    const VertexSet& sep = separators[j];
    const std::vector<int> r = (clique - sep).to_vector();
    const std::vector<int> s = sep.to_vector();
    const double df = params.degrees + clique.size() - 1.0;

    if (s.empty()) {
      sigma(r, r) = sample_inverse_wishart(df, d(r, r), rng);
      history |= clique;
      continue;
    }

    const Eigen::MatrixXd d_ss = d(s, s);
    const Eigen::MatrixXd d_rs = d(r, s);
    const Eigen::MatrixXd l_s =
        cholesky_lower(d_ss, ErrorCode::NonPdScale, "HIW scale separator block is not PD");
    // M = D_RS D_SS^-1, computed as (D_SS^-1 D_SR)'.
    const Eigen::MatrixXd mean =
        Eigen::LLT<Eigen::MatrixXd>(d_ss).solve(d_rs.transpose()).transpose();
    Eigen::MatrixXd d_rr_s = d(r, r) - mean * d_rs.transpose();
    d_rr_s = 0.5 * (d_rr_s + d_rr_s.transpose());

    const Eigen::MatrixXd sigma_rr_s = sample_inverse_wishart(df, d_rr_s, rng);
    const Eigen::MatrixXd a =
        cholesky_lower(sigma_rr_s, ErrorCode::NotPositiveDefinite, "conditional IW draw not PD");
    const Eigen::MatrixXd e = standard_normal_matrix(static_cast<Eigen::Index>(r.size()),
                                                     static_cast<Eigen::Index>(s.size()), rng);
    // U ~ MN(M, Sigma_RR.S, D_SS^-1): U = M + A E L_S^-1.
    const Eigen::MatrixXd noise =
        l_s.triangularView<Eigen::Lower>().solve<Eigen::OnTheRight>(a * e);
    const Eigen::MatrixXd u = mean + noise;

    const Eigen::MatrixXd sigma_ss = sigma(s, s);
    const Eigen::MatrixXd sigma_rs = u * sigma_ss;
    Eigen::MatrixXd sigma_rr = sigma_rr_s + sigma_rs * u.transpose();
    sigma_rr = 0.5 * (sigma_rr + sigma_rr.transpose());
    sigma(r, r) = sigma_rr;
    sigma(r, s) = sigma_rs;
    sigma(s, r) = sigma_rs.transpose();

    // Markov completion against the rest of the history.
    const std::vector<int> h = (history - sep).to_vector();
    if (!h.empty()) {
      const Eigen::MatrixXd cross = u * sigma(s, h);
      sigma(r, h) = cross;
      sigma(h, r) = cross.transpose();
    }
    history |= clique;
  }

  HiwDraw draw;
  draw.precision = precision_from_cliques(g, sigma);
  draw.sigma = std::move(sigma);
  return draw;
}

Eigen::MatrixXd precision_from_cliques(const DecomposableGraph& g, const Eigen::MatrixXd& sigma) {
  const int q = g.num_vertices();
  if (sigma.rows() != q || sigma.cols() != q)
    throw Error(ErrorCode::DimensionMismatch, "covariance does not match the graph");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(q, q);
  for (const auto& c : g.cliques()) {
    const std::vector<int> idx = c.to_vector();
    k(idx, idx) += inverse_spd(sigma(idx, idx));
  }
  for (const auto& s : g.separators()) {
    if (s.empty()) continue;
    const std::vector<int> idx = s.to_vector();
    k(idx, idx) -= inverse_spd(sigma(idx, idx));
  }
  return k;
}

}  // namespace scalemix
