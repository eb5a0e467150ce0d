#include "scalemix/sim.hpp"

#include <cmath>
#include <string>

#include "scalemix/error.hpp"
#include "scalemix/linalg.hpp"

namespace scalemix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_dominant(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    if (!(m(i, i) > off))
      throw Error(ErrorCode::NotDiagonallyDominant,
                  "row " + std::to_string(i) + " is not strictly diagonally dominant");
  }
}

Eigen::MatrixXd block_truth(int q, const BlockTruth& b) {
  if (b.size < 1 || b.size > q) throw Error(ErrorCode::InvalidParams, "block size out of range");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(q, q) * b.diagonal;
  int k = 0;
  for (int i = 0; i < b.size; ++i)
    for (int j = i + 1; j < b.size; ++j, ++k) m(i, j) = m(j, i) = (k % 2 == 0 ? 1.0 : -1.0) * b.magnitude;
  require_dominant(m);
  return m;
}

Eigen::MatrixXd random_sparse_truth(int q, const RandomSparseTruth& s, Rng& rng) {
  if (!(s.pos_frac >= 0.0) || !(s.neg_frac >= 0.0) || s.pos_frac + s.neg_frac > 1.0)
    throw Error(ErrorCode::InvalidParams, "sparse fractions must be nonnegative and sum to <= 1");
  if (!(s.magnitude > 0.0)) throw Error(ErrorCode::InvalidParams, "magnitude must be positive");
  const long pairs = static_cast<long>(q) * (q - 1) / 2;
  const long n_pos = std::lround(s.pos_frac * pairs);
  const long n_neg = std::lround(s.neg_frac * pairs);

  // Grow the support one legal edge addition at a time, so every
  // intermediate graph stays decomposable.
  DecomposableGraph g(q);
  MoveSet moves = legal_moves(g);
  while (g.num_edges() < n_pos + n_neg) {
    if (moves.additions.empty())
      throw Error(ErrorCode::InvalidParams, "requested density exceeds what the sampler reached");
    const Edge e = moves.additions[uniform_index(moves.additions.size(), rng)];
    g = g.with_edge_toggled(e);
    moves = legal_moves(g);
  }

  std::vector<Edge> edges = g.edges();
  // Shuffle so signs are not tied to the edge order.
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[uniform_index(i, rng)]);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, q);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double v = static_cast<long>(k) < n_pos ? s.magnitude : -s.magnitude;
    m(edges[k].u, edges[k].v) = m(edges[k].v, edges[k].u) = v;
  }
  const double diag = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
  m.diagonal().setConstant(diag);
  return m;
}

}  // namespace

Eigen::MatrixXd make_banded_precision(int q, double v, double frac1, double frac2) {
  if (q < 1) throw Error(ErrorCode::InvalidParams, "q must be positive");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) {
    m(i, i) = v;
    if (i + 1 < q) m(i, i + 1) = m(i + 1, i) = frac1 * v;
    if (i + 2 < q) m(i, i + 2) = m(i + 2, i) = frac2 * v;
  }
  require_dominant(m);
  return m;
}

Eigen::MatrixXd add_block(const Eigen::MatrixXd& m, IndexRange rows, IndexRange cols, double value) {
  const int p = static_cast<int>(m.rows());
  if (rows.first < 0 || cols.first < 0 || rows.last >= p || cols.last >= p ||
      rows.first > rows.last || cols.first > cols.last)
    throw Error(ErrorCode::InvalidParams, "block range outside the matrix");
  if (rows.first <= cols.last && cols.first <= rows.last)
    throw Error(ErrorCode::InvalidParams, "blocks overlapping the diagonal are not supported");
  Eigen::MatrixXd out = m;
  out.block(rows.first, cols.first, rows.size(), cols.size()).setConstant(value);
  out.block(cols.first, rows.first, cols.size(), rows.size()).setConstant(value);
  if (!is_positive_definite(out))
    throw Error(ErrorCode::NotPositiveDefinite, "block makes the matrix indefinite");
  return out;
}

Eigen::MatrixXd make_truth(const TruthSpec& spec, Rng& rng) {
  Eigen::MatrixXd m = std::visit(
      overloaded{
          [&](const BandedTruth& b) { return make_banded_precision(spec.dim, b.v, b.frac1, b.frac2); },
          [&](const BlockTruth& b) { return block_truth(spec.dim, b); },
          [&](const RandomSparseTruth& s) { return random_sparse_truth(spec.dim, s, rng); },
      },
      spec.kind);
  for (const auto& blk : spec.extra_blocks) m = add_block(m, blk.rows, blk.cols, blk.value);
  return m;
}

Adjacency precision_support(const Eigen::MatrixXd& precision) {
  const int p = static_cast<int>(precision.rows());
  Adjacency adj = empty_adjacency(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j && precision(i, j) != 0.0) adj[i].insert(j);
  return adj;
}

Eigen::MatrixXd sample_gaussian_rows(int n, const Eigen::MatrixXd& precision, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::NotPositiveDefinite, "precision matrix is not positive definite");
  const Eigen::Index p = precision.rows();
  // With precision = L L', x = L^-T e has covariance precision^-1.
  Eigen::MatrixXd e(p, n);
  for (int r = 0; r < n; ++r)
    for (Eigen::Index j = 0; j < p; ++j) e(j, r) = std_normal(rng);
  const Eigen::MatrixXd x = llt.matrixU().solve(e);
  return x.transpose();
}

GsmSimulation simulate_gsm_data(int n, const Eigen::MatrixXd& precision,
                                const std::vector<MarginSpec>& margins, Rng& rng) {
  const Eigen::Index p = precision.rows();
  if (static_cast<Eigen::Index>(margins.size()) != p)
    throw Error(ErrorCode::DimensionMismatch, "need one margin spec per column");
  GsmSimulation out;
  out.scales.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) out.scales(i) = sample_mixing(margins[i].mixing, rng);
  out.data = sample_gaussian_rows(n, precision, rng);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double d = out.scales(i);
    out.data.col(i) = (out.data.col(i) * std::sqrt(d)).array() + margins[i].skew_alpha +
                      margins[i].skew_beta * d;
  }
  return out;
}

MixedSimulation simulate_mixed_data(int n, const Eigen::MatrixXd& precision_template, int d,
                                    int pg_b, Rng& rng, int max_attempts) {
  const int p = static_cast<int>(precision_template.rows());
  if (d < 0 || d > p) throw Error(ErrorCode::DimensionMismatch, "bad discrete column count");
  MixedSimulation out;
  out.omega.resize(d);
  // A draw is kept once Omega is positive definite and no rounded discrete
  // column is constant; a very small omega_j shrinks column j to all zeros.
  bool constant_column = false;
  for (;;) {
    if (out.attempts >= max_attempts) {
      const std::string tail = " after " + std::to_string(max_attempts) + " Polya-Gamma draws";
      if (constant_column)
        throw Error(ErrorCode::ConstantColumn, "rounded discrete column stays constant" + tail);
      throw Error(ErrorCode::NotPositiveDefinite, "no positive definite precision" + tail);
    }
    ++out.attempts;
    out.precision = precision_template;
    for (int j = 0; j < d; ++j) {
      out.omega(j) = sample_pg(pg_b, rng);
      out.precision(j, j) = 1.0 / out.omega(j);
    }
    if (!is_positive_definite(out.precision)) continue;
    out.data.values = sample_gaussian_rows(n, out.precision, rng);
    out.data.values.leftCols(d) = out.data.values.leftCols(d).array().round();
    constant_column = false;
    for (int j = 0; j < d && n > 0; ++j)
      if ((out.data.values.col(j).array() == out.data.values(0, j)).all()) constant_column = true;
    if (!constant_column) break;
  }
  out.data.num_discrete = d;
  out.data.centering = 0.0;
  return out;
}

}  // namespace scalemix
