#pragma once

#include <algorithm>
#include <cstddef>
#include <queue>
#include <vector>

#include "movelab/rational.hpp"

namespace movelab {

// Dinic max-flow over caller-chosen capacity scalars. With rationals every
// residual comparison is exact; with doubles an admissibility floor keeps the
// search from chasing rounding dust.
template <class T>
class FlowNetwork {
 public:
  explicit FlowNetwork(int nodes) : head_(static_cast<std::size_t>(nodes)) {}

  int node_count() const { return static_cast<int>(head_.size()); }

  // Returns the id of the added edge (order of add_edge calls).
  std::size_t add_edge(int u, int v, T cap) {
    head_[static_cast<std::size_t>(u)].push_back(static_cast<int>(to_.size()));
    to_.push_back(v);
    cap_.push_back(std::move(cap));
    head_[static_cast<std::size_t>(v)].push_back(static_cast<int>(to_.size()));
    to_.push_back(u);
    cap_.push_back(scalar_traits<T>::zero());
    return to_.size() / 2 - 1;
  }

  T max_flow(int s, int t) {
    T total = scalar_traits<T>::zero();
    while (bfs(s, t)) {
      it_.assign(head_.size(), 0);
      for (;;) {
        T pushed = dfs(s, t, T(-1));
        if (!(pushed > eps())) break;
        total += pushed;
      }
    }
    return total;
  }

  // Flow currently on edge `id` (= residual on its reverse arc).
  const T& flow_on(std::size_t id) const { return cap_[2 * id + 1]; }

  // Nodes reachable from s in the residual graph; after max_flow this is the
  // source side of a minimum cut.
  std::vector<char> residual_reachable(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : head_[static_cast<std::size_t>(u)]) {
        int v = to_[static_cast<std::size_t>(e)];
        if (!seen[static_cast<std::size_t>(v)] && cap_[static_cast<std::size_t>(e)] > eps()) {
          seen[static_cast<std::size_t>(v)] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  }

 private:
  static T eps() {
    if constexpr (scalar_traits<T>::exact)
      return T(0);
    else
      return T(1e-14);
  }

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    q.push(s);
    level_[static_cast<std::size_t>(s)] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e : head_[static_cast<std::size_t>(u)]) {
        int v = to_[static_cast<std::size_t>(e)];
        if (level_[static_cast<std::size_t>(v)] < 0 &&
            cap_[static_cast<std::size_t>(e)] > eps()) {
          level_[static_cast<std::size_t>(v)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  // `budget` < 0 means unbounded (path minimum comes purely from capacities).
  T dfs(int u, int t, T budget) {
    if (u == t) return budget;
    for (int& i = it_[static_cast<std::size_t>(u)];
         i < static_cast<int>(head_[static_cast<std::size_t>(u)].size()); ++i) {
      int e = head_[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)];
      int v = to_[static_cast<std::size_t>(e)];
      T& c = cap_[static_cast<std::size_t>(e)];
      if (level_[static_cast<std::size_t>(v)] != level_[static_cast<std::size_t>(u)] + 1 ||
          !(c > eps()))
        continue;
      T next = (budget < 0 || c < budget) ? c : budget;
      T pushed = dfs(v, t, next);
      if (pushed > eps()) {
        c -= pushed;
        cap_[static_cast<std::size_t>(e ^ 1)] += pushed;
        return pushed;
      }
    }
    level_[static_cast<std::size_t>(u)] = -1;
    return scalar_traits<T>::zero();
  }

  std::vector<std::vector<int>> head_;
  std::vector<int> to_;
  std::vector<T> cap_;  // forward at 2*id, reverse at 2*id+1
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace movelab
