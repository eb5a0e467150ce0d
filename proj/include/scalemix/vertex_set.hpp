#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace scalemix {

// Fixed-universe bitset over vertex indices [0, universe). Graph operations in
// the MCMC inner loop are dominated by set intersections and reachability
// sweeps, which reduce to word-wise bit operations here.
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int universe)
      : universe_(universe), words_((universe + 63) / 64, 0) {}

  static VertexSet from_indices(int universe, const std::vector<int>& indices);
  static VertexSet full(int universe);

  int universe() const noexcept { return universe_; }

  bool contains(int v) const noexcept {
    return (words_[v >> 6] >> (v & 63)) & 1u;
  }
  void insert(int v) noexcept { words_[v >> 6] |= (std::uint64_t{1} << (v & 63)); }
  void erase(int v) noexcept { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  void clear() noexcept {
    for (auto& w : words_) w = 0;
  }

  int size() const noexcept {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
  }
  bool empty() const noexcept {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  bool is_subset_of(const VertexSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }
  bool intersects(const VertexSet& other) const noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & other.words_[i]) return true;
    return false;
  }

  VertexSet& operator&=(const VertexSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  VertexSet& operator|=(const VertexSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  // Set difference.
  VertexSet& operator-=(const VertexSet& o) noexcept {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
  friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
  friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
  friend bool operator==(const VertexSet& a, const VertexSet& b) = default;

  // Ascending vertex indices.
  std::vector<int> to_vector() const;

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        const int bit = std::countr_zero(w);
        f(static_cast<int>(i * 64 + bit));
        w &= w - 1;
      }
    }
  }

 private:
  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace scalemix
