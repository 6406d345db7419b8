#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace netgame {

/// Directed coupling graph over players [0, n_players). An edge (i, j) means
/// i and j interact; environments attach their own meaning to the direction
/// (for the supply chain, i supplies j).
class GameGraph {
 public:
  using Edge = std::pair<int, int>;

  GameGraph() = default;
  GameGraph(int n_players, std::vector<Edge> edges, std::map<Edge, double> weights = {});

  /// Adds both (i, j) and (j, i) with the same weight for every listed pair.
  static GameGraph undirected(int n_players, const std::vector<Edge>& pairs,
                              const std::vector<double>& weights = {});

  int n_players() const { return n_players_; }
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const;

  /// Weight of (i, j), falling back to (j, i), then to 1 when unweighted.
  double weight(int i, int j) const;
  bool has_weights() const { return !weights_.empty(); }

  /// Players adjacent to i through an edge in either direction, ascending.
  std::vector<int> neighbors(int i) const;
  /// j with (i, j) in edges, ascending.
  std::vector<int> successors(int i) const;
  /// j with (j, i) in edges, ascending.
  std::vector<int> predecessors(int i) const;

  /// (i, j) present iff (j, i) present, with equal weights.
  bool is_symmetric() const;
  bool is_acyclic() const;

 private:
  void check_player(int i) const;

  int n_players_ = 0;
  std::vector<Edge> edges_;
  std::map<Edge, double> weights_;
};

}  // namespace netgame
