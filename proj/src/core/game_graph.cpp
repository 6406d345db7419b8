#include "netgame/core/game_graph.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "netgame/common/error.hpp"

namespace netgame {

GameGraph::GameGraph(int n_players, std::vector<Edge> edges, std::map<Edge, double> weights)
    : n_players_(n_players), edges_(std::move(edges)), weights_(std::move(weights)) {
  require(n_players_ > 0, "GameGraph: n_players must be positive");
  for (const auto& [i, j] : edges_) {
    require(i >= 0 && i < n_players_ && j >= 0 && j < n_players_,
            "GameGraph: edge (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    require(i != j, "GameGraph: self-loop at " + std::to_string(i));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (const auto& [edge, w] : weights_) {
    require(std::binary_search(edges_.begin(), edges_.end(), edge),
            "GameGraph: weight given for a missing edge");
    require(w >= 0.0, "GameGraph: edge weights must be nonnegative");
  }
}

GameGraph GameGraph::undirected(int n_players, const std::vector<Edge>& pairs,
                                const std::vector<double>& weights) {
  require(weights.empty() || weights.size() == pairs.size(),
          "GameGraph::undirected: one weight per pair expected");
  std::vector<Edge> edges;
  std::map<Edge, double> w;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    edges.emplace_back(i, j);
    edges.emplace_back(j, i);
    if (!weights.empty()) {
      w[{i, j}] = weights[k];
      w[{j, i}] = weights[k];
    }
  }
  return GameGraph(n_players, std::move(edges), std::move(w));
}

void GameGraph::check_player(int i) const {
  if (i < 0 || i >= n_players_)
    throw ArgumentError("player index " + std::to_string(i) + " out of range [0, " +
                        std::to_string(n_players_) + ")");
}

bool GameGraph::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

double GameGraph::weight(int i, int j) const {
  if (auto it = weights_.find({i, j}); it != weights_.end()) return it->second;
  if (auto it = weights_.find({j, i}); it != weights_.end()) return it->second;
  return 1.0;
}

std::vector<int> GameGraph::neighbors(int i) const {
  check_player(i);
  std::set<int> out;
  for (const auto& [a, b] : edges_) {
    if (a == i) out.insert(b);
    if (b == i) out.insert(a);
  }
  return {out.begin(), out.end()};
}

std::vector<int> GameGraph::successors(int i) const {
  check_player(i);
  std::vector<int> out;
  for (const auto& [a, b] : edges_)
    if (a == i) out.push_back(b);
  return out;
}

std::vector<int> GameGraph::predecessors(int i) const {
  check_player(i);
  std::vector<int> out;
  for (const auto& [a, b] : edges_)
    if (b == i) out.push_back(a);
  std::sort(out.begin(), out.end());
  return out;
}

bool GameGraph::is_symmetric() const {
  for (const auto& [i, j] : edges_) {
    if (!has_edge(j, i)) return false;
    if (weight(i, j) != weight(j, i)) return false;
  }
  return true;
}

bool GameGraph::is_acyclic() const {
  // Kahn's algorithm.
  std::vector<int> indegree(n_players_, 0);
  for (const auto& e : edges_) ++indegree[e.second];
  std::vector<int> ready;
  for (int i = 0; i < n_players_; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  int visited = 0;
  while (!ready.empty()) {
    const int i = ready.back();
    ready.pop_back();
    ++visited;
    for (int j : successors(i))
      if (--indegree[j] == 0) ready.push_back(j);
  }
  return visited == n_players_;
}

}  // namespace netgame
