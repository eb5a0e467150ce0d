#include "scalemix/vertex_set.hpp"

namespace scalemix {

VertexSet VertexSet::from_indices(int universe, const std::vector<int>& indices) {
  VertexSet s(universe);
  for (int v : indices) s.insert(v);
  return s;
}

VertexSet VertexSet::full(int universe) {
  VertexSet s(universe);
  for (int v = 0; v < universe; ++v) s.insert(v);
  return s;
}

std::vector<int> VertexSet::to_vector() const {
  std::vector<int> out;
  out.reserve(size());
  for_each([&](int v) { out.push_back(v); });
  return out;
}

}  // namespace scalemix
