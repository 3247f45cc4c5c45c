#ifndef CSTSSOS_CHORDAL_HPP
#define CSTSSOS_CHORDAL_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cstssos {

namespace detail {

/// Fixed-size bitset with runtime length; just what the elimination loops need.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const noexcept { return n_; }
  bool test(std::size_t i) const noexcept { return (w_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
  void reset(std::size_t i) noexcept { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  /// |this & ~other|
  std::size_t count_minus(const Bitset& o) const noexcept {
    std::size_t c = 0;
    for (std::size_t k = 0; k < w_.size(); ++k) c += static_cast<std::size_t>(std::popcount(w_[k] & ~o.w_[k]));
    return c;
  }
  bool is_subset_of(const Bitset& o) const noexcept {
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }
  Bitset operator&(const Bitset& o) const {
    Bitset r(*this);
    for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] &= o.w_[k];
    return r;
  }
  Bitset& operator|=(const Bitset& o) noexcept {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
    return *this;
  }
  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      std::uint64_t w = w_[k];
      while (w) {
        const int b = std::countr_zero(w);
        f(k * 64 + static_cast<std::size_t>(b));
        w &= w - 1;
      }
    }
  }
  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace detail

/// Simple undirected graph over an ordered list of node ids.  Algorithms work on
/// node positions; ids are only used for lookup and reporting.
template <typename Node, typename Compare = std::less<Node>>
class Graph {
 public:
  using Edge = std::pair<int, int>;

  Graph() = default;
  explicit Graph(std::vector<Node> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size(), detail::Bitset(nodes_.size())) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!index_.emplace(nodes_[i], static_cast<int>(i)).second)
        throw std::invalid_argument("duplicate graph node");
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

  int index_of(const Node& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw std::out_of_range("node not in graph");
    return it->second;
  }

  void add_edge(int i, int j) {
    if (i == j) throw std::invalid_argument("self-loop");
    adj_.at(static_cast<std::size_t>(i)).set(static_cast<std::size_t>(j));
    adj_.at(static_cast<std::size_t>(j)).set(static_cast<std::size_t>(i));
  }
  void connect(const Node& a, const Node& b) { add_edge(index_of(a), index_of(b)); }

  bool has_edge(int i, int j) const {
    return adj_.at(static_cast<std::size_t>(i)).test(static_cast<std::size_t>(j));
  }
  bool connected(const Node& a, const Node& b) const { return has_edge(index_of(a), index_of(b)); }

  std::size_t degree(int i) const { return adj_.at(static_cast<std::size_t>(i)).count(); }
  std::vector<int> neighbors(int i) const {
    std::vector<int> out;
    adj_.at(static_cast<std::size_t>(i)).for_each([&](std::size_t j) { out.push_back(static_cast<int>(j)); });
    return out;
  }

  /// Edges (i < j) in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < adj_.size(); ++i)
      adj_[i].for_each([&](std::size_t j) {
        if (j > i) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
      });
    return out;
  }
  std::size_t edge_count() const {
    std::size_t c = 0;
    for (const auto& a : adj_) c += a.count();
    return c / 2;
  }

  /// Edge set of this graph is contained in that of `o` (same node list).
  bool edges_subset_of(const Graph& o) const {
    if (o.size() != size()) return false;
    for (std::size_t i = 0; i < adj_.size(); ++i)
      if (!adj_[i].is_subset_of(o.adj_[i])) return false;
    return true;
  }

  /// Connected components, each sorted, listed by smallest member.
  std::vector<std::vector<int>> components() const {
    std::vector<int> comp(size(), -1);
    std::vector<std::vector<int>> out;
    for (std::size_t s = 0; s < size(); ++s) {
      if (comp[s] >= 0) continue;
      std::vector<int> members{static_cast<int>(s)}, stack{static_cast<int>(s)};
      comp[s] = static_cast<int>(out.size());
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        adj_[static_cast<std::size_t>(v)].for_each([&](std::size_t u) {
          if (comp[u] < 0) {
            comp[u] = comp[s];
            members.push_back(static_cast<int>(u));
            stack.push_back(static_cast<int>(u));
          }
        });
      }
      std::sort(members.begin(), members.end());
      out.push_back(std::move(members));
    }
    return out;
  }

  const detail::Bitset& adjacency(int i) const { return adj_.at(static_cast<std::size_t>(i)); }

  friend bool operator==(const Graph& a, const Graph& b) { return a.nodes_ == b.nodes_ && a.adj_ == b.adj_; }

 private:
  std::vector<Node> nodes_;
  std::map<Node, int, Compare> index_;
  std::vector<detail::Bitset> adj_;
};

enum class ExtensionKind { Maximal, MinFill };

/// A graph together with a chordal supergraph, its perfect elimination
/// ordering and its maximal cliques (node positions, sorted).
template <typename Node, typename Compare = std::less<Node>>
struct ChordalGraph {
  Graph<Node, Compare> base;
  Graph<Node, Compare> extended;
  std::vector<std::pair<int, int>> extension_edges;
  std::vector<int> elimination_order;
  std::vector<std::vector<int>> cliques;

  std::size_t clique_number() const {
    std::size_t m = 0;
    for (const auto& c : cliques) m = std::max(m, c.size());
    return m;
  }
};

namespace detail {

template <typename Node, typename Compare>
std::vector<std::pair<int, int>> added_edges(const Graph<Node, Compare>& base, const Graph<Node, Compare>& ext) {
  std::vector<std::pair<int, int>> out;
  for (auto [i, j] : ext.edges())
    if (!base.has_edge(i, j)) out.emplace_back(i, j);
  return out;
}

}  // namespace detail

/// All maximal cliques of a chordal graph read off its perfect elimination
/// ordering.  Throws std::invalid_argument if the ordering is not perfect.
template <typename Node, typename Compare>
std::vector<std::vector<int>> maximal_cliques(const Graph<Node, Compare>& g, const std::vector<int>& order) {
  const std::size_t n = g.size();
  if (order.size() != n) throw std::invalid_argument("elimination ordering has wrong length");
  std::vector<int> pos(n, -1);
  for (std::size_t k = 0; k < n; ++k) {
    const auto v = static_cast<std::size_t>(order[k]);
    if (v >= n || pos[v] >= 0) throw std::invalid_argument("elimination ordering is not a permutation");
    pos[v] = static_cast<int>(k);
  }
  std::vector<detail::Bitset> cand(n, detail::Bitset(n));
  for (std::size_t k = 0; k < n; ++k) {
    const int v = order[k];
    auto& c = cand[k];
    c.set(static_cast<std::size_t>(v));
    int parent = -1;
    g.adjacency(v).for_each([&](std::size_t u) {
      if (pos[u] > static_cast<int>(k)) {
        c.set(u);
        if (parent < 0 || pos[u] < pos[static_cast<std::size_t>(parent)]) parent = static_cast<int>(u);
      }
    });
    if (parent >= 0) {
      // later neighbours of v other than parent must be adjacent to parent
      bool ok = true;
      c.for_each([&](std::size_t u) {
        if (static_cast<int>(u) != v && static_cast<int>(u) != parent && !g.has_edge(parent, static_cast<int>(u))) ok = false;
      });
      if (!ok) throw std::invalid_argument("not a perfect elimination ordering (graph is not chordal)");
    }
  }
  std::vector<std::size_t> sizes(n);
  for (std::size_t k = 0; k < n; ++k) sizes[k] = cand[k].count();
  std::vector<std::vector<int>> out;
  for (std::size_t k = 0; k < n; ++k) {
    bool maximal = true;
    for (std::size_t q = 0; q < n && maximal; ++q)
      if (q != k && sizes[q] > sizes[k] && cand[k].is_subset_of(cand[q])) maximal = false;
    if (!maximal) continue;
    std::vector<int> members;
    cand[k].for_each([&](std::size_t u) { members.push_back(static_cast<int>(u)); });
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Node, typename Compare>
std::vector<std::vector<int>> maximal_cliques(const ChordalGraph<Node, Compare>& cg) {
  return maximal_cliques(cg.extended, cg.elimination_order);
}

/// Completes every connected component.
template <typename Node, typename Compare>
ChordalGraph<Node, Compare> extend_maximal(const Graph<Node, Compare>& g) {
  ChordalGraph<Node, Compare> cg{g, g, {}, {}, {}};
  for (const auto& comp : g.components()) {
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (std::size_t b = a + 1; b < comp.size(); ++b)
        if (!g.has_edge(comp[a], comp[b])) {
          cg.extended.add_edge(comp[a], comp[b]);
          cg.extension_edges.emplace_back(comp[a], comp[b]);
        }
    cg.elimination_order.insert(cg.elimination_order.end(), comp.begin(), comp.end());
    cg.cliques.push_back(comp);
  }
  std::sort(cg.extension_edges.begin(), cg.extension_edges.end());
  std::sort(cg.cliques.begin(), cg.cliques.end());
  return cg;
}

/// Greedy minimum-fill elimination.  At every step the remaining node whose
/// neighbourhood needs the fewest fill edges is eliminated (lowest position on
/// ties) and its neighbourhood is made a clique.
template <typename Node, typename Compare>
ChordalGraph<Node, Compare> extend_greedy_min(const Graph<Node, Compare>& g) {
  const std::size_t n = g.size();
  std::vector<detail::Bitset> adj;
  adj.reserve(n);
  for (std::size_t i = 0; i < n; ++i) adj.push_back(g.adjacency(static_cast<int>(i)));
  detail::Bitset alive(n);
  for (std::size_t i = 0; i < n; ++i) alive.set(i);

  ChordalGraph<Node, Compare> cg{g, g, {}, {}, {}};
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n, best_fill = std::numeric_limits<std::size_t>::max();
    alive.for_each([&](std::size_t v) {
      if (best_fill == 0) return;
      const auto nb = adj[v] & alive;
      std::size_t fill = 0;
      nb.for_each([&](std::size_t u) { fill += nb.count_minus(adj[u]) - 1; });
      fill /= 2;
      if (fill < best_fill) {
        best_fill = fill;
        best = v;
      }
    });
    const auto nb = adj[best] & alive;
    if (best_fill > 0) {
      nb.for_each([&](std::size_t u) {
        nb.for_each([&](std::size_t w) {
          if (w > u && !adj[u].test(w)) {
            adj[u].set(w);
            adj[w].set(u);
            cg.extended.add_edge(static_cast<int>(u), static_cast<int>(w));
          }
        });
      });
    }
    alive.reset(best);
    cg.elimination_order.push_back(static_cast<int>(best));
  }
  cg.extension_edges = detail::added_edges(g, cg.extended);
  cg.cliques = maximal_cliques(cg.extended, cg.elimination_order);
  return cg;
}

template <typename Node, typename Compare>
ChordalGraph<Node, Compare> chordal_extension(const Graph<Node, Compare>& g, ExtensionKind kind) {
  return kind == ExtensionKind::Maximal ? extend_maximal(g) : extend_greedy_min(g);
}

}  // namespace cstssos

#endif  // CSTSSOS_CHORDAL_HPP
