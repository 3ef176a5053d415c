#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

namespace tergm {

// Undirected binary adjacency over local node indices 0..n-1, stored as one
// bitset row per node.  Symmetry and an empty diagonal are maintained by
// construction; degree and edge count are kept incrementally.
class NetworkState {
 public:
  NetworkState() = default;
  explicit NetworkState(int n)
      : n_(n), words_((n + 63) / 64), rows_(static_cast<std::size_t>(n) * words_, 0), degree_(n, 0) {}

  int size() const { return n_; }
  int words() const { return words_; }
  long long edge_count() const { return edges_; }
  int degree(int i) const { return degree_[i]; }

  bool has(int i, int j) const {
    return (row(i)[j >> 6] >> (j & 63)) & 1ULL;
  }

  void set(int i, int j, bool v) {
    assert(i != j);
    if (has(i, j) == v) return;
    toggle(i, j);
  }

  void toggle(int i, int j) {
    assert(i != j);
    uint64_t* ri = mutable_row(i);
    uint64_t* rj = mutable_row(j);
    bool was = (ri[j >> 6] >> (j & 63)) & 1ULL;
    ri[j >> 6] ^= 1ULL << (j & 63);
    rj[i >> 6] ^= 1ULL << (i & 63);
    int d = was ? -1 : 1;
    degree_[i] += d;
    degree_[j] += d;
    edges_ += d;
  }

  void clear() {
    std::fill(rows_.begin(), rows_.end(), 0);
    std::fill(degree_.begin(), degree_.end(), 0);
    edges_ = 0;
  }

  const uint64_t* row(int i) const { return rows_.data() + static_cast<std::size_t>(i) * words_; }

  // |N(i) ∩ N(j)|; the (i,j) tie itself never contributes (no self loops).
  int common_neighbors(int i, int j) const {
    const uint64_t* a = row(i);
    const uint64_t* b = row(j);
    int c = 0;
    for (int w = 0; w < words_; ++w) c += std::popcount(a[w] & b[w]);
    return c;
  }

  template <class F>
  void for_each_neighbor(int i, F&& f) const {
    const uint64_t* r = row(i);
    for (int w = 0; w < words_; ++w) {
      uint64_t bits = r[w];
      while (bits) {
        int b = std::countr_zero(bits);
        f(w * 64 + b);
        bits &= bits - 1;
      }
    }
  }

  template <class F>
  void for_each_edge(F&& f) const {
    for (int i = 0; i < n_; ++i) {
      for_each_neighbor(i, [&](int j) {
        if (j > i) f(i, j);
      });
    }
  }

  friend bool operator==(const NetworkState& a, const NetworkState& b) {
    return a.n_ == b.n_ && a.rows_ == b.rows_;
  }

 private:
  uint64_t* mutable_row(int i) { return rows_.data() + static_cast<std::size_t>(i) * words_; }

  int n_ = 0;
  int words_ = 0;
  std::vector<uint64_t> rows_;
  std::vector<int> degree_;
  long long edges_ = 0;
};

// Packed index of the unordered dyad {i,j}, i < j, within C(n,2) slots.
inline std::size_t dyad_index(int i, int j, int n) {
  assert(i < j);
  return static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}

inline std::size_t dyad_count(int n) { return static_cast<std::size_t>(n) * (n - 1) / 2; }

// All dyads of an n-node roster in canonical (i,j) order.
std::vector<std::pair<int, int>> all_dyads(int n);

}  // namespace tergm
