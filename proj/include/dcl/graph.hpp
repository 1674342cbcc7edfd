#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcl/linalg.hpp"

namespace dcl {

/// Edge between 1-based vertex ids. For digraphs `from -> to`.
struct Edge {
  int from = 0;
  int to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Communication topology: simple graph or digraph on vertices 1..n.
///
/// Immutable after construction. Undirected edges are stored once with
/// `from < to`; edges are kept sorted.
class Graph {
 public:
  /// Validates and canonicalizes. Throws SelfLoop, DuplicateEdge, VertexOutOfRange.
  Graph(int n, std::vector<Edge> edges, bool directed, std::string name = {});

  int order() const { return n_; }
  bool directed() const { return directed_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& name() const { return name_; }

  bool has_edge(int from, int to) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.directed_ == b.directed_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  bool directed_;
  std::string name_;
};

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges, bool directed,
                  std::string name = {});

enum class FamilyKind {
  Path,
  Cycle,
  MaryTree,
  Wheel,
  Hypercube,
  Petersen,
  Complete,
  CompleteBipartite,
  Star,
  DirectedPath,
  DirectedCycle,
};

/// A named graph family with its size parameters.
///
/// Parameter meaning per kind:
///   Path/Cycle/Wheel/Complete/DirectedPath/DirectedCycle: a = n (vertex count)
///   MaryTree: a = m (arity), b = depth
///   Hypercube: a = m (dimension), n = 2^m
///   CompleteBipartite: a = m = |V1|, b = n = |V2|
///   Star: a = number of leaves (n + 1 vertices in total)
///   Petersen: no parameters
struct GraphFamily {
  FamilyKind kind = FamilyKind::Path;
  int a = 0;
  int b = 0;

  static GraphFamily path(int n) { return {FamilyKind::Path, n, 0}; }
  static GraphFamily cycle(int n) { return {FamilyKind::Cycle, n, 0}; }
  static GraphFamily mary_tree(int m, int depth) { return {FamilyKind::MaryTree, m, depth}; }
  static GraphFamily wheel(int n) { return {FamilyKind::Wheel, n, 0}; }
  static GraphFamily hypercube(int m) { return {FamilyKind::Hypercube, m, 0}; }
  static GraphFamily petersen() { return {FamilyKind::Petersen, 0, 0}; }
  static GraphFamily complete(int n) { return {FamilyKind::Complete, n, 0}; }
  static GraphFamily complete_bipartite(int m, int n) {
    return {FamilyKind::CompleteBipartite, m, n};
  }
  static GraphFamily star(int leaves) { return {FamilyKind::Star, leaves, 0}; }
  static GraphFamily directed_path(int n) { return {FamilyKind::DirectedPath, n, 0}; }
  static GraphFamily directed_cycle(int n) { return {FamilyKind::DirectedCycle, n, 0}; }

  /// Number of vertices of the generated graph.
  int order() const;
  bool directed() const {
    return kind == FamilyKind::DirectedPath || kind == FamilyKind::DirectedCycle;
  }

  /// Throws ParameterOutOfRange when outside the family's valid range.
  void validate() const;

  /// Mini-syntax `name:params`, e.g. `cycle:8`, `mtree:2:3`, `kbip:2:3`.
  std::string spec() const;
  static GraphFamily parse(const std::string& spec);

  friend bool operator==(const GraphFamily&, const GraphFamily&) = default;
};

/// Canonical labelings: Path/Cycle along the walk; m-ary tree in BFS order
/// (root 1); Wheel center 1 with rim 2..n in cycle order; Hypercube vertex
/// i+1 <-> binary expansion of i; CompleteBipartite V1 then V2; Star center 1;
/// Petersen outer cycle 1..5, inner pentagram 6..10, spokes i <-> i+5;
/// DirectedCycle i -> i+1 and n -> 1; DirectedPath i -> i+1.
Graph generate_family(const GraphFamily& family);

struct MatrixBundle {
  Matrix adjacency;  ///< a_ij = 1 iff {i,j} is an edge (undirected) or (j,i) in E (directed)
  Matrix degree;     ///< diagonal; in-degree for digraphs
  Matrix laplacian;  ///< D - A
  Matrix signless;   ///< D + A
};

MatrixBundle matrices(const Graph& g);

/// (D - I) s^2 - A s + I
Matrix deformed_laplacian(const Graph& g, double s);
Matrix deformed_laplacian(const MatrixBundle& m, double s);

struct StructureReport {
  bool connected = false;  ///< undirected connectivity (disoriented version for digraphs)
  bool bipartite = false;
  std::optional<std::pair<std::vector<int>, std::vector<int>>> partition;
  std::optional<int> regular_degree;
  bool strongly_connected = false;
  bool weakly_connected = false;
  bool balanced = false;
  bool has_rooted_out_branching = false;  ///< digraph contains a spanning rooted out-branching
  int max_degree = 0;                     ///< max in-degree for digraphs
};

StructureReport structure_probe(const Graph& g);

/// Degree per vertex (0-based index); in-degree for digraphs.
std::vector<int> degrees(const Graph& g);

}  // namespace dcl
