#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scalemix/rng.hpp"
#include "scalemix/vertex_set.hpp"

namespace scalemix {

// Unordered vertex pair, stored with u < v.
struct Edge {
  int u = 0;
  int v = 0;

  Edge() = default;
  Edge(int a, int b) : u(a < b ? a : b), v(a < b ? b : a) {}

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using Adjacency = std::vector<VertexSet>;

Adjacency empty_adjacency(int num_vertices);
Adjacency adjacency_from_edges(int num_vertices, const std::vector<Edge>& edges);

// Maximum cardinality search visit order. Ties go to the lowest vertex index.
std::vector<int> maximum_cardinality_search(const Adjacency& adj);

// True iff the reverse MCS order is a perfect elimination ordering.
bool is_decomposable(const Adjacency& adj);

struct CliqueDecomposition {
  // Perfect sequence of maximal cliques.
  std::vector<VertexSet> cliques;
  // separators[j] = cliques[j] ∩ (cliques[0] ∪ ... ∪ cliques[j-1]); separators[0]
  // is always empty.
  std::vector<VertexSet> separators;
};

// Throws Error(NotDecomposable) for chordless cycles.
CliqueDecomposition clique_decomposition(const Adjacency& adj);

// Immutable-by-value decomposable graph with its perfect clique sequence.
class DecomposableGraph {
 public:
  DecomposableGraph() = default;
  explicit DecomposableGraph(int num_vertices);
  // Throws Error(NotDecomposable).
  explicit DecomposableGraph(Adjacency adj);

  static DecomposableGraph from_edges(int num_vertices, const std::vector<Edge>& edges);
  static DecomposableGraph complete(int num_vertices);

  int num_vertices() const noexcept { return static_cast<int>(adj_.size()); }
  int num_edges() const noexcept { return num_edges_; }
  bool has_edge(int u, int v) const noexcept { return adj_[u].contains(v); }
  const VertexSet& neighbors(int v) const noexcept { return adj_[v]; }
  const Adjacency& adjacency() const noexcept { return adj_; }
  std::vector<Edge> edges() const;

  const std::vector<VertexSet>& cliques() const noexcept { return decomposition_.cliques; }
  const std::vector<VertexSet>& separators() const noexcept { return decomposition_.separators; }

  // Throws Error(NotDecomposable) when the toggle breaks chordality.
  DecomposableGraph with_edge_toggled(Edge e) const;

  Eigen::MatrixXi adjacency_matrix() const;

  friend bool operator==(const DecomposableGraph& a, const DecomposableGraph& b) {
    return a.adj_ == b.adj_;
  }

 private:
  Adjacency adj_;
  CliqueDecomposition decomposition_;
  int num_edges_ = 0;
};

// Adding a non-edge (u, v) to a chordal graph keeps it chordal iff the common
// neighbourhood N(u) ∩ N(v) separates u from v.
bool can_add_edge(const Adjacency& adj, int u, int v);
// Deleting an edge keeps chordality iff it lies in exactly one maximal clique.
bool can_delete_edge(const DecomposableGraph& g, int u, int v);

struct MoveSet {
  std::vector<Edge> additions;
  std::vector<Edge> deletions;
};

// All single-edge perturbations that preserve decomposability, in
// lexicographic edge order.
MoveSet legal_moves(const DecomposableGraph& g);

struct EdgeMove {
  Edge edge;
  bool is_addition = true;
  double log_forward = 0.0;  // log q(g -> g')
  double log_reverse = 0.0;  // log q(g' -> g)
};

struct EdgeProposal {
  DecomposableGraph graph;
  MoveSet moves;  // legal moves out of the proposed graph
  EdgeMove move;
};

// log probability that the proposal picks one particular move of the given
// direction out of `moves`: half the mass to each nonempty side, then uniform.
double log_move_probability(const MoveSet& moves, bool is_addition);

// `moves` must be legal_moves(g); passing it in lets a chain reuse the set
// computed for the previous proposal. Throws Error(NoLegalMove).
EdgeProposal propose_edge_move(const DecomposableGraph& g, const MoveSet& moves, Rng& rng);
EdgeProposal propose_edge_move(const DecomposableGraph& g, Rng& rng);

// Per-pair inclusion probabilities w_uv in (0, 1).
class EdgePriorWeights {
 public:
  EdgePriorWeights() = default;
  explicit EdgePriorWeights(Eigen::MatrixXd weights);
  static EdgePriorWeights constant(int num_vertices, double w);

  int num_vertices() const noexcept { return static_cast<int>(w_.rows()); }
  double operator()(int u, int v) const noexcept { return w_(u, v); }
  const Eigen::MatrixXd& matrix() const noexcept { return w_; }

 private:
  Eigen::MatrixXd w_;
};

// Unnormalised over the decomposable space; only differences are meaningful.
double graph_log_prior(const DecomposableGraph& g, const EdgePriorWeights& w);
// graph_log_prior(g + e) - graph_log_prior(g) for an addition, negated for a
// deletion.
double graph_log_prior_ratio(const EdgePriorWeights& w, Edge e, bool is_addition);

// Edge-list text: one "u v" pair per line, 0-indexed. Blank lines and lines
// starting with '#' are skipped.
std::vector<Edge> read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const std::vector<Edge>& edges);

}  // namespace scalemix
