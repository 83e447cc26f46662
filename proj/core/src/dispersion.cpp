#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <optional>

#include "fsdim/dispersion.hpp"
#include "fsdim/error.hpp"

namespace fsdim {

std::string to_string(DeltaMethod m) {
  return m == DeltaMethod::kExactSearch ? "exact-search" : "certificate-upper-bound";
}

namespace {

using Clock = std::chrono::steady_clock;

struct BudgetExhausted {};

// Transportation instance on the positive-mass rows and columns, scaled to
// integers by the common denominator of all masses.
struct Transport {
  std::vector<std::size_t> rows;  // indices with mu > 0
  std::vector<std::size_t> cols;  // indices with pi > 0
  std::vector<BigInt> supply;     // per col, pi·L
  std::vector<BigInt> demand;     // per row, mu·L
  BigInt total;                   // L
};

Transport make_transport(const std::vector<Rational>& pi, const std::vector<Rational>& mu) {
  Transport t;
  BigInt l = 1;
  for (const auto* v : {&pi, &mu}) {
    for (const Rational& x : *v) {
      if (x > 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    }
  }
  t.total = l;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    if (pi[j] > 0) {
      t.cols.push_back(j);
      t.supply.push_back(pi[j].get_num() * (l / pi[j].get_den()));
    }
  }
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0) {
      t.rows.push_back(i);
      t.demand.push_back(mu[i].get_num() * (l / mu[i].get_den()));
    }
  }
  return t;
}

// Max-flow from columns (supplies) to rows (demands) along allowed edges.
// Returns the per-edge flow when every supply is fully routed.
std::optional<std::vector<BigInt>> route(const Transport& t,
                                         const std::vector<std::pair<int, int>>& edges) {
  const int nc = static_cast<int>(t.cols.size());
  const int nr = static_cast<int>(t.rows.size());
  const int source = nc + nr;
  const int sink = source + 1;
  const int nodes = sink + 1;

  struct Arc {
    int to;
    BigInt cap;
    int rev;
  };
  std::vector<std::vector<Arc>> g(static_cast<std::size_t>(nodes));
  auto add_arc = [&](int u, int v, const BigInt& cap) {
    g[u].push_back({v, cap, static_cast<int>(g[v].size())});
    g[v].push_back({u, BigInt(0), static_cast<int>(g[u].size()) - 1});
  };
  for (int c = 0; c < nc; ++c) add_arc(source, c, t.supply[c]);
  std::vector<std::pair<int, int>> edge_arc;  // (node, arc index) per edge
  for (const auto& [r, c] : edges) {
    edge_arc.emplace_back(c, static_cast<int>(g[c].size()));
    add_arc(c, nc + r, t.total);
  }
  for (int r = 0; r < nr; ++r) add_arc(nc + r, sink, t.demand[r]);

  BigInt flow = 0;
  while (true) {
    std::vector<std::pair<int, int>> parent(static_cast<std::size_t>(nodes), {-1, -1});
    std::deque<int> queue{source};
    parent[source] = {source, -1};
    while (!queue.empty() && parent[sink].first < 0) {
      const int u = queue.front();
      queue.pop_front();
      for (int a = 0; a < static_cast<int>(g[u].size()); ++a) {
        const Arc& arc = g[u][a];
        if (arc.cap > 0 && parent[arc.to].first < 0) {
          parent[arc.to] = {u, a};
          queue.push_back(arc.to);
        }
      }
    }
    if (parent[sink].first < 0) break;
    BigInt push = t.total;
    for (int v = sink; v != source; v = parent[v].first) {
      const Arc& arc = g[parent[v].first][parent[v].second];
      if (arc.cap < push) push = arc.cap;
    }
    for (int v = sink; v != source; v = parent[v].first) {
      Arc& arc = g[parent[v].first][parent[v].second];
      arc.cap -= push;
      g[arc.to][arc.rev].cap += push;
    }
    flow += push;
  }
  if (flow != t.total) return std::nullopt;

  std::vector<BigInt> out;
  out.reserve(edges.size());
  for (const auto& [node, arc] : edge_arc) out.push_back(t.total - g[node][arc].cap);
  return out;
}

// Removes cycles from the support of a bipartite flow by shifting mass
// around each cycle until one edge empties; marginals are unchanged and the
// support ends up a forest.
void cancel_cycles(std::size_t nr, std::size_t nc, std::vector<std::pair<int, int>>& edges,
                   std::vector<BigInt>& flow) {
  while (true) {
    // Drop empty edges.
    std::vector<std::pair<int, int>> e2;
    std::vector<BigInt> f2;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (flow[i] > 0) {
        e2.push_back(edges[i]);
        f2.push_back(flow[i]);
      }
    }
    edges.swap(e2);
    flow.swap(f2);

    // Undirected graph: rows 0..nr-1, cols nr..nr+nc-1.
    const std::size_t nodes = nr + nc;
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);  // (neighbor, edge)
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const int r = edges[i].first;
      const int c = static_cast<int>(nr) + edges[i].second;
      adj[r].emplace_back(c, static_cast<int>(i));
      adj[c].emplace_back(r, static_cast<int>(i));
    }
    std::vector<int> parent_edge(nodes, -1);
    std::vector<int> parent_node(nodes, -1);
    std::vector<int> depth(nodes, -1);
    std::vector<int> cycle;
    for (std::size_t root = 0; root < nodes && cycle.empty(); ++root) {
      if (depth[root] >= 0) continue;
      depth[root] = 0;
      std::vector<int> stack{static_cast<int>(root)};
      while (!stack.empty() && cycle.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [v, e] : adj[u]) {
          if (e == parent_edge[u]) continue;
          if (depth[v] < 0) {
            depth[v] = depth[u] + 1;
            parent_node[v] = u;
            parent_edge[v] = e;
            stack.push_back(v);
          } else {
            // Non-tree edge closes a cycle: walk both ends to their meeting point.
            std::vector<int> left, right;
            int a = u, b = v;
            while (depth[a] > depth[b]) { left.push_back(parent_edge[a]); a = parent_node[a]; }
            while (depth[b] > depth[a]) { right.push_back(parent_edge[b]); b = parent_node[b]; }
            while (a != b) {
              left.push_back(parent_edge[a]); a = parent_node[a];
              right.push_back(parent_edge[b]); b = parent_node[b];
            }
            cycle.push_back(e);
            for (auto it = right.begin(); it != right.end(); ++it) cycle.push_back(*it);
            for (auto it = left.rbegin(); it != left.rend(); ++it) cycle.push_back(*it);
            break;
          }
        }
      }
    }
    if (cycle.empty()) return;
    // Consecutive cycle edges share a node, so alternating signs preserve
    // every row and column sum.
    BigInt delta = flow[cycle[1]];
    for (std::size_t i = 1; i < cycle.size(); i += 2) delta = std::min(delta, flow[cycle[i]]);
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i % 2 == 0) {
        flow[cycle[i]] += delta;
      } else {
        flow[cycle[i]] -= delta;
      }
    }
  }
}

class DeltaSearch {
 public:
  DeltaSearch(std::vector<Rational> pi, std::vector<Rational> mu, Clock::time_point deadline)
      : pi_(std::move(pi)), mu_(std::move(mu)), n_(pi_.size()),
        t_(make_transport(pi_, mu_)), deadline_(deadline) {}

  // A witness with every row and column support at most m, if one exists.
  std::optional<SparseStochasticCertificate> feasible(std::uint64_t m) {
    const int nr = static_cast<int>(t_.rows.size());
    const int nc = static_cast<int>(t_.cols.size());
    all_edges_.clear();
    for (int r = 0; r < nr; ++r) {
      for (int c = 0; c < nc; ++c) all_edges_.emplace_back(r, c);
    }
    row_deg_.assign(static_cast<std::size_t>(nr), 0);
    col_deg_.assign(static_cast<std::size_t>(nc), 0);
    chosen_.assign(all_edges_.size(), false);
    m_ = m;
    result_.reset();
    enumerate(0);
    return result_;
  }

  // Places one unit entry per zero-mass column in the least loaded row and
  // builds the certificate; nullopt if some row would exceed m.
  std::optional<SparseStochasticCertificate> build(std::vector<std::pair<int, int>> edges,
                                                   std::vector<BigInt> flow,
                                                   std::uint64_t m) const {
    cancel_cycles(t_.rows.size(), t_.cols.size(), edges, flow);
    SparseStochasticCertificate a;
    a.n = n_;
    a.declared_m = m;
    std::vector<std::uint64_t> row_support(n_, 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const std::size_t i = t_.rows[edges[e].first];
      const std::size_t j = t_.cols[edges[e].second];
      // a_ij = b_ij / pi(j), with b_ij = flow / L.
      const Rational v = make_rational(flow[e], t_.total) / pi_[j];
      a.entries.push_back({i, j, v});
      ++row_support[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (pi_[j] > 0) continue;
      const auto target = static_cast<std::size_t>(
          std::min_element(row_support.begin(), row_support.end()) - row_support.begin());
      if (row_support[target] >= m) return std::nullopt;
      a.entries.push_back({target, j, Rational(1)});
      ++row_support[target];
    }
    a.normalize();
    return a;
  }

  // North-west corner plan on the masses in index order: always feasible,
  // support is a staircase forest.
  SparseStochasticCertificate north_west_corner() const {
    std::vector<std::pair<int, int>> edges;
    std::vector<BigInt> flow;
    std::vector<BigInt> supply = t_.supply;
    std::vector<BigInt> demand = t_.demand;
    std::size_t r = 0, c = 0;
    while (r < demand.size() && c < supply.size()) {
      const BigInt x = std::min(supply[c], demand[r]);
      if (x > 0) {
        edges.emplace_back(static_cast<int>(r), static_cast<int>(c));
        flow.push_back(x);
      }
      supply[c] -= x;
      demand[r] -= x;
      if (supply[c] == 0) ++c;
      if (demand[r] == 0) ++r;
    }
    auto a = build(edges, flow, n_);
    if (!a) throw Error("north-west corner construction failed");
    return *a;
  }

  std::size_t positive_rows() const { return t_.rows.size(); }
  std::size_t positive_cols() const { return t_.cols.size(); }

 private:
  void enumerate(std::size_t e) {
    if (result_) return;
    if ((++steps_ & 0x3ff) == 0 && Clock::now() > deadline_) throw BudgetExhausted{};
    if (e == all_edges_.size()) {
      leaf();
      return;
    }
    const auto [r, c] = all_edges_[e];
    if (row_deg_[r] < m_ && col_deg_[c] < m_) {
      chosen_[e] = true;
      ++row_deg_[r];
      ++col_deg_[c];
      enumerate(e + 1);
      --row_deg_[r];
      --col_deg_[c];
      chosen_[e] = false;
      // Excluding an edge only matters if it can never be added back, i.e.
      // some later choice saturates one of its endpoints.
      if (!can_saturate_later(e, r, c)) return;
    }
    enumerate(e + 1);
  }

  bool can_saturate_later(std::size_t e, int r, int c) const {
    std::uint64_t row_room = 0, col_room = 0;
    for (std::size_t f = e + 1; f < all_edges_.size(); ++f) {
      if (all_edges_[f].first == r) ++row_room;
      if (all_edges_[f].second == c) ++col_room;
    }
    return row_deg_[r] + row_room >= m_ || col_deg_[c] + col_room >= m_;
  }

  void leaf() {
    // Only maximal patterns: any addable edge makes this a sub-case.
    std::vector<std::pair<int, int>> edges;
    for (std::size_t f = 0; f < all_edges_.size(); ++f) {
      const auto [r, c] = all_edges_[f];
      if (chosen_[f]) {
        edges.push_back(all_edges_[f]);
      } else if (row_deg_[r] < m_ && col_deg_[c] < m_) {
        return;
      }
    }
    auto flow = route(t_, edges);
    if (!flow) return;
    result_ = build(edges, *flow, m_);
  }

  std::vector<Rational> pi_;
  std::vector<Rational> mu_;
  std::size_t n_;
  Transport t_;
  Clock::time_point deadline_;

  std::vector<std::pair<int, int>> all_edges_;
  std::vector<std::uint64_t> row_deg_;
  std::vector<std::uint64_t> col_deg_;
  std::vector<bool> chosen_;
  std::uint64_t m_ = 1;
  std::uint64_t steps_ = 0;
  std::optional<SparseStochasticCertificate> result_;
};

std::uint64_t max_support(const SparseStochasticCertificate& a) {
  std::vector<std::uint64_t> rows(a.n, 0), cols(a.n, 0);
  for (const auto& e : a.entries) {
    ++rows[e.row];
    ++cols[e.col];
  }
  return std::max(*std::max_element(rows.begin(), rows.end()),
                  *std::max_element(cols.begin(), cols.end()));
}

DispersionResult finish(SparseStochasticCertificate witness, std::uint64_t m, DeltaMethod method) {
  witness.declared_m = m;
  DispersionResult out;
  out.m_star = m;
  out.delta_bits = std::log2l(static_cast<long double>(m));
  out.witness = std::move(witness);
  out.method = method;
  return out;
}

}  // namespace

DispersionResult delta_exact(const ProbabilityVector& pi_vec, const ProbabilityVector& mu_vec,
                             const DeltaOptions& options) {
  if (pi_vec.size() != mu_vec.size()) throw InvalidArgument("delta_exact: dimension mismatch");
  const std::size_t n = pi_vec.size();
  if (n > options.n_cap) {
    throw InvalidArgument("delta_exact: dimension " + std::to_string(n) + " exceeds cap " +
                          std::to_string(options.n_cap));
  }
  const auto pi = pi_vec.to_dense();
  const auto mu = mu_vec.to_dense();

  // m = 1 forces a permutation matrix (n columns, one nonzero each, in
  // distinct rows), so it is feasible exactly when mu rearranges pi.
  {
    std::vector<std::size_t> pi_order(n), mu_order(n);
    std::iota(pi_order.begin(), pi_order.end(), 0);
    std::iota(mu_order.begin(), mu_order.end(), 0);
    std::stable_sort(pi_order.begin(), pi_order.end(),
                     [&](std::size_t a, std::size_t b) { return pi[a] > pi[b]; });
    std::stable_sort(mu_order.begin(), mu_order.end(),
                     [&](std::size_t a, std::size_t b) { return mu[a] > mu[b]; });
    bool same = true;
    for (std::size_t t = 0; t < n && same; ++t) same = pi[pi_order[t]] == mu[mu_order[t]];
    if (same) {
      SparseStochasticCertificate perm;
      perm.n = n;
      for (std::size_t t = 0; t < n; ++t) perm.entries.push_back({mu_order[t], pi_order[t], Rational(1)});
      perm.normalize();
      return finish(std::move(perm), 1, DeltaMethod::kExactSearch);
    }
  }

  const auto deadline = Clock::now() + options.budget;
  DeltaSearch search(pi, mu, deadline);
  SparseStochasticCertificate upper = search.north_west_corner();
  std::uint64_t upper_m = std::max<std::uint64_t>(max_support(upper), 2);
  // The complete bipartite pattern on the positive parts is always feasible.
  const std::uint64_t full_m = std::max<std::uint64_t>(
      2, std::max(search.positive_rows(), search.positive_cols()));

  try {
    if (full_m < upper_m) {
      if (auto a = search.feasible(full_m)) {
        upper = *a;
        upper_m = full_m;
      }
    }
    for (std::uint64_t m = 2; m < upper_m; ++m) {
      if (auto a = search.feasible(m)) return finish(std::move(*a), m, DeltaMethod::kExactSearch);
    }
  } catch (const BudgetExhausted&) {
    return finish(std::move(upper), upper_m, DeltaMethod::kCertificateUpperBound);
  }
  return finish(std::move(upper), upper_m, DeltaMethod::kExactSearch);
}

}  // namespace fsdim
