#include "scalemix/graph.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "scalemix/error.hpp"

namespace scalemix {

Adjacency empty_adjacency(int num_vertices) {
  return Adjacency(num_vertices, VertexSet(num_vertices));
}

Adjacency adjacency_from_edges(int num_vertices, const std::vector<Edge>& edges) {
  Adjacency adj = empty_adjacency(num_vertices);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v >= num_vertices || e.u == e.v)
      throw Error(ErrorCode::InvalidParams,
                  "edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                      ") is not a valid pair of distinct vertices");
    adj[e.u].insert(e.v);
    adj[e.v].insert(e.u);
  }
  return adj;
}

std::vector<int> maximum_cardinality_search(const Adjacency& adj) {
  const int q = static_cast<int>(adj.size());
  std::vector<int> label(q, 0);
  std::vector<char> visited(q, 0);
  std::vector<int> order;
  order.reserve(q);
  for (int step = 0; step < q; ++step) {
    int best = -1;
    for (int v = 0; v < q; ++v)
      if (!visited[v] && (best < 0 || label[v] > label[best])) best = v;
    visited[best] = 1;
    order.push_back(best);
    adj[best].for_each([&](int w) {
      if (!visited[w]) ++label[w];
    });
  }
  return order;
}

namespace {

// Candidate cliques {v} ∪ (visited neighbours of v) along the MCS order, or an
// empty vector if some candidate is not complete (graph not chordal).
std::vector<VertexSet> mcs_candidates(const Adjacency& adj) {
  const int q = static_cast<int>(adj.size());
  const std::vector<int> order = maximum_cardinality_search(adj);
  VertexSet seen(q);
  std::vector<VertexSet> candidates;
  candidates.reserve(q);
  for (int v : order) {
    VertexSet earlier = adj[v] & seen;
    bool complete = true;
    earlier.for_each([&](int w) {
      if (!complete) return;
      VertexSet rest = earlier;
      rest.erase(w);
      if (!rest.is_subset_of(adj[w])) complete = false;
    });
    if (!complete) return {};
    earlier.insert(v);
    candidates.push_back(std::move(earlier));
    seen.insert(v);
  }
  return candidates;
}

}  // namespace

bool is_decomposable(const Adjacency& adj) {
  return adj.empty() || !mcs_candidates(adj).empty();
}

CliqueDecomposition clique_decomposition(const Adjacency& adj) {
  CliqueDecomposition out;
  if (adj.empty()) return out;
  const int q = static_cast<int>(adj.size());
  std::vector<VertexSet> candidates = mcs_candidates(adj);
  if (candidates.empty())
    throw Error(ErrorCode::NotDecomposable, "graph has a chordless cycle of length >= 4");

  // Candidates in MCS order already satisfy the running intersection
  // property; keeping only the maximal ones preserves it.
  const std::size_t m = candidates.size();
  for (std::size_t i = 0; i < m; ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < m && maximal; ++j) {
      if (i == j) continue;
      if (candidates[i].is_subset_of(candidates[j]) &&
          (candidates[i] != candidates[j] || j < i))
        maximal = false;
    }
    if (maximal) out.cliques.push_back(candidates[i]);
  }
  VertexSet history(q);
  for (const VertexSet& c : out.cliques) {
    out.separators.push_back(c & history);
    history |= c;
  }
  return out;
}

DecomposableGraph::DecomposableGraph(int num_vertices)
    : DecomposableGraph(empty_adjacency(num_vertices)) {}

DecomposableGraph::DecomposableGraph(Adjacency adj)
    : adj_(std::move(adj)), decomposition_(clique_decomposition(adj_)) {
  int twice = 0;
  for (const auto& nb : adj_) twice += nb.size();
  num_edges_ = twice / 2;
}

DecomposableGraph DecomposableGraph::from_edges(int num_vertices, const std::vector<Edge>& edges) {
  return DecomposableGraph(adjacency_from_edges(num_vertices, edges));
}

DecomposableGraph DecomposableGraph::complete(int num_vertices) {
  Adjacency adj = empty_adjacency(num_vertices);
  for (int v = 0; v < num_vertices; ++v) {
    adj[v] = VertexSet::full(num_vertices);
    adj[v].erase(v);
  }
  return DecomposableGraph(std::move(adj));
}

std::vector<Edge> DecomposableGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (int u = 0; u < num_vertices(); ++u)
    adj_[u].for_each([&](int v) {
      if (u < v) out.emplace_back(u, v);
    });
  return out;
}

DecomposableGraph DecomposableGraph::with_edge_toggled(Edge e) const {
  Adjacency adj = adj_;
  if (adj[e.u].contains(e.v)) {
    adj[e.u].erase(e.v);
    adj[e.v].erase(e.u);
  } else {
    adj[e.u].insert(e.v);
    adj[e.v].insert(e.u);
  }
  return DecomposableGraph(std::move(adj));
}

Eigen::MatrixXi DecomposableGraph::adjacency_matrix() const {
  const int q = num_vertices();
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(q, q);
  for (int u = 0; u < q; ++u) adj_[u].for_each([&](int v) { m(u, v) = 1; });
  return m;
}

namespace {

// Vertices reachable from `source` without entering `blocked`.
VertexSet reachable_avoiding(const Adjacency& adj, int source, const VertexSet& blocked) {
  VertexSet reached(static_cast<int>(adj.size()));
  reached.insert(source);
  VertexSet frontier = reached;
  while (!frontier.empty()) {
    VertexSet next(static_cast<int>(adj.size()));
    frontier.for_each([&](int x) { next |= adj[x]; });
    next -= blocked;
    next -= reached;
    reached |= next;
    frontier = std::move(next);
  }
  return reached;
}

std::vector<int> connected_components(const Adjacency& adj) {
  const int q = static_cast<int>(adj.size());
  std::vector<int> comp(q, -1);
  const VertexSet none(q);
  int next_id = 0;
  for (int v = 0; v < q; ++v) {
    if (comp[v] >= 0) continue;
    reachable_avoiding(adj, v, none).for_each([&](int w) { comp[w] = next_id; });
    ++next_id;
  }
  return comp;
}

bool separated_by_common_neighbours(const Adjacency& adj, int u, int v) {
  const VertexSet common = adj[u] & adj[v];
  return !reachable_avoiding(adj, u, common).contains(v);
}

}  // namespace

bool can_add_edge(const Adjacency& adj, int u, int v) {
  if (u == v || adj[u].contains(v)) return false;
  return separated_by_common_neighbours(adj, u, v);
}

bool can_delete_edge(const DecomposableGraph& g, int u, int v) {
  if (u == v || !g.has_edge(u, v)) return false;
  int holders = 0;
  for (const VertexSet& c : g.cliques())
    if (c.contains(u) && c.contains(v)) ++holders;
  return holders == 1;
}

MoveSet legal_moves(const DecomposableGraph& g) {
  const Adjacency& adj = g.adjacency();
  const int q = g.num_vertices();
  MoveSet moves;

  // Edge -> number of maximal cliques containing it.
  std::vector<int> holders(static_cast<std::size_t>(q) * q, 0);
  for (const VertexSet& c : g.cliques()) {
    const std::vector<int> members = c.to_vector();
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        ++holders[static_cast<std::size_t>(members[a]) * q + members[b]];
  }

  const std::vector<int> comp = connected_components(adj);
  for (int u = 0; u < q; ++u) {
    for (int v = u + 1; v < q; ++v) {
      if (adj[u].contains(v)) {
        if (holders[static_cast<std::size_t>(u) * q + v] == 1) moves.deletions.emplace_back(u, v);
      } else if (comp[u] != comp[v] || separated_by_common_neighbours(adj, u, v)) {
        moves.additions.emplace_back(u, v);
      }
    }
  }
  return moves;
}

double log_move_probability(const MoveSet& moves, bool is_addition) {
  const auto& side = is_addition ? moves.additions : moves.deletions;
  const auto& other = is_addition ? moves.deletions : moves.additions;
  if (side.empty()) return -std::numeric_limits<double>::infinity();
  const double side_prob = other.empty() ? 1.0 : 0.5;
  return std::log(side_prob) - std::log(static_cast<double>(side.size()));
}

EdgeProposal propose_edge_move(const DecomposableGraph& g, const MoveSet& moves, Rng& rng) {
  const bool can_add = !moves.additions.empty();
  const bool can_del = !moves.deletions.empty();
  if (!can_add && !can_del)
    throw Error(ErrorCode::NoLegalMove, "no single-edge move preserves decomposability");

  bool add;
  if (can_add && can_del)
    add = uniform01(rng) < 0.5;
  else
    add = can_add;
  const auto& side = add ? moves.additions : moves.deletions;
  const Edge e = side[uniform_index(side.size(), rng)];

  EdgeProposal out;
  out.graph = g.with_edge_toggled(e);
  out.moves = legal_moves(out.graph);
  out.move.edge = e;
  out.move.is_addition = add;
  out.move.log_forward = log_move_probability(moves, add);
  out.move.log_reverse = log_move_probability(out.moves, !add);
  return out;
}

EdgeProposal propose_edge_move(const DecomposableGraph& g, Rng& rng) {
  return propose_edge_move(g, legal_moves(g), rng);
}

EdgePriorWeights::EdgePriorWeights(Eigen::MatrixXd weights) : w_(std::move(weights)) {
  if (w_.rows() != w_.cols())
    throw Error(ErrorCode::DimensionMismatch, "edge prior weights must be square");
  for (int u = 0; u < w_.rows(); ++u) {
    for (int v = 0; v < w_.cols(); ++v) {
      if (u == v) continue;
      if (!(w_(u, v) > 0.0 && w_(u, v) < 1.0))
        throw Error(ErrorCode::InvalidParams, "edge prior weights must lie strictly inside (0, 1)");
      if (w_(u, v) != w_(v, u))
        throw Error(ErrorCode::InvalidParams, "edge prior weights must be symmetric");
    }
  }
}

EdgePriorWeights EdgePriorWeights::constant(int num_vertices, double w) {
  return EdgePriorWeights(Eigen::MatrixXd::Constant(num_vertices, num_vertices, w));
}

double graph_log_prior(const DecomposableGraph& g, const EdgePriorWeights& w) {
  if (w.num_vertices() != g.num_vertices())
    throw Error(ErrorCode::DimensionMismatch, "edge prior weights do not match the graph size");
  double total = 0.0;
  for (int u = 0; u < g.num_vertices(); ++u)
    for (int v = u + 1; v < g.num_vertices(); ++v)
      total += g.has_edge(u, v) ? std::log(w(u, v)) : std::log1p(-w(u, v));
  return total;
}

double graph_log_prior_ratio(const EdgePriorWeights& w, Edge e, bool is_addition) {
  const double delta = std::log(w(e.u, e.v)) - std::log1p(-w(e.u, e.v));
  return is_addition ? delta : -delta;
}

std::vector<Edge> read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int u, v;
    if (!(ls >> u >> v))
      throw Error(ErrorCode::ParseError, "edge list line " + std::to_string(line_no) +
                                             ": expected two vertex indices");
    edges.emplace_back(u, v);
  }
  return edges;
}

void write_edge_list(std::ostream& out, const std::vector<Edge>& edges) {
  for (const Edge& e : edges) out << e.u << ' ' << e.v << '\n';
}

}  // namespace scalemix
