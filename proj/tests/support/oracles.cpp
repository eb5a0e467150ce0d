#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

AdjMatrix adjacency(int q, const std::vector<std::pair<int, int>>& edges) {
  AdjMatrix a = AdjMatrix::Zero(q, q);
  for (auto [u, v] : edges) a(u, v) = a(v, u) = 1;
  return a;
}

bool is_chordal_simplicial(const AdjMatrix& adj) {
  const int q = static_cast<int>(adj.rows());
  std::vector<bool> alive(q, true);
  for (int removed = 0; removed < q; ++removed) {
    int found = -1;
    for (int v = 0; v < q && found < 0; ++v) {
      if (!alive[v]) continue;
      std::vector<int> nb;
      for (int u = 0; u < q; ++u)
        if (alive[u] && adj(v, u)) nb.push_back(u);
      bool clique = true;
      for (std::size_t i = 0; i < nb.size() && clique; ++i)
        for (std::size_t j = i + 1; j < nb.size() && clique; ++j) clique = adj(nb[i], nb[j]) != 0;
      if (clique) found = v;
    }
    if (found < 0) return false;
    alive[found] = false;
  }
  return true;
}

bool is_perfect_elimination_order(const AdjMatrix& adj, const std::vector<int>& order) {
  const int q = static_cast<int>(order.size());
  std::vector<int> pos(q);
  for (int i = 0; i < q; ++i) pos[order[i]] = i;
  for (int i = 0; i < q; ++i) {
    const int v = order[i];
    std::vector<int> later;
    for (int u = 0; u < q; ++u)
      if (adj(v, u) && pos[u] > i) later.push_back(u);
    for (std::size_t a = 0; a < later.size(); ++a)
      for (std::size_t b = a + 1; b < later.size(); ++b)
        if (!adj(later[a], later[b])) return false;
  }
  return true;
}

std::vector<std::vector<int>> maximal_cliques(const AdjMatrix& adj) {
  const int q = static_cast<int>(adj.rows());
  std::vector<std::vector<int>> out;
  std::function<void(std::vector<int>, std::vector<int>, std::vector<int>)> bk =
      [&](std::vector<int> r, std::vector<int> p, std::vector<int> x) {
        if (p.empty() && x.empty()) {
          std::sort(r.begin(), r.end());
          out.push_back(r);
          return;
        }
        while (!p.empty()) {
          const int v = p.back();
          std::vector<int> r2 = r, p2, x2;
          r2.push_back(v);
          for (int u : p)
            if (adj(v, u)) p2.push_back(u);
          for (int u : x)
            if (adj(v, u)) x2.push_back(u);
          bk(r2, p2, x2);
          p.pop_back();
          x.push_back(v);
        }
      };
  std::vector<int> all(q);
  for (int i = 0; i < q; ++i) all[i] = i;
  bk({}, all, {});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AdjMatrix> all_decomposable_graphs(int q) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
  std::vector<AdjMatrix> out;
  for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::vector<std::pair<int, int>> e;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (mask >> k & 1u) e.push_back(pairs[k]);
    AdjMatrix a = adjacency(q, e);
    if (is_chordal_simplicial(a)) out.push_back(a);
  }
  return out;
}

double log_multigamma(int p, double a) {
  double s = p * (p - 1) / 4.0 * std::log(M_PI);
  for (int j = 1; j <= p; ++j) s += std::lgamma(a + (1.0 - j) / 2.0);
  return s;
}

double matrix_t_log_density(const Eigen::MatrixXd& x, double nu, const Eigen::MatrixXd& omega) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  const Eigen::MatrixXd inner =
      Eigen::MatrixXd::Identity(n, n) + x * omega.inverse() * x.transpose();
  const double log_det_inner = std::log(inner.determinant());
  const double log_det_omega = std::log(omega.determinant());
  return log_multigamma(n, (nu + n + p - 1) / 2.0) - 0.5 * n * p * std::log(M_PI) -
         log_multigamma(n, (nu + n - 1) / 2.0) - 0.5 * n * log_det_omega -
         0.5 * (nu + n + p - 1) * log_det_inner;
}

double gaussian_rows_log_density(const Eigen::MatrixXd& x, const Eigen::MatrixXd& sigma) {
  const int p = static_cast<int>(sigma.rows());
  const Eigen::MatrixXd inv = sigma.inverse();
  const double log_det = std::log(sigma.determinant());
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Eigen::VectorXd r = x.row(i).transpose();
    s += -0.5 * (p * std::log(2 * M_PI) + log_det + r.dot(inv * r));
  }
  return s;
}

}  // namespace oracle
