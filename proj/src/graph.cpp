#include "dcl/graph.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <queue>
#include <sstream>

#include "dcl/error.hpp"

namespace dcl {

Graph::Graph(int n, std::vector<Edge> edges, bool directed, std::string name)
    : n_(n), edges_(std::move(edges)), directed_(directed), name_(std::move(name)) {
  if (n_ < 1) throw Error(ErrorCode::VertexOutOfRange, "graph needs at least one vertex");
  for (auto& e : edges_) {
    if (e.from < 1 || e.from > n_ || e.to < 1 || e.to > n_) {
      throw Error(ErrorCode::VertexOutOfRange, "edge (" + std::to_string(e.from) + "," +
                                                   std::to_string(e.to) + ") outside 1.." +
                                                   std::to_string(n_));
    }
    if (e.from == e.to) {
      throw Error(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(e.from));
    }
    if (!directed_ && e.from > e.to) std::swap(e.from, e.to);
  }
  std::sort(edges_.begin(), edges_.end());
  auto dup = std::adjacent_find(edges_.begin(), edges_.end());
  if (dup != edges_.end()) {
    throw Error(ErrorCode::DuplicateEdge,
                "edge (" + std::to_string(dup->from) + "," + std::to_string(dup->to) + ")");
  }
}

bool Graph::has_edge(int from, int to) const {
  if (!directed_ && from > to) std::swap(from, to);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
}

Graph build_graph(int n, const std::vector<std::pair<int, int>>& edges, bool directed,
                  std::string name) {
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [i, j] : edges) list.push_back({i, j});
  return Graph(n, std::move(list), directed, std::move(name));
}

// ---------------------------------------------------------------------------
// Families

int GraphFamily::order() const {
  switch (kind) {
    case FamilyKind::Path:
    case FamilyKind::Cycle:
    case FamilyKind::Wheel:
    case FamilyKind::Complete:
    case FamilyKind::DirectedPath:
    case FamilyKind::DirectedCycle:
      return a;
    case FamilyKind::MaryTree: {
      int total = 0;
      int level = 1;
      for (int d = 0; d <= b; ++d) {
        total += level;
        level *= a;
      }
      return total;
    }
    case FamilyKind::Hypercube: return 1 << a;
    case FamilyKind::Petersen: return 10;
    case FamilyKind::CompleteBipartite: return a + b;
    case FamilyKind::Star: return a + 1;
  }
  return 0;
}

namespace {

void require(bool ok, const GraphFamily& f, const char* rule) {
  if (!ok) throw Error(ErrorCode::ParameterOutOfRange, f.spec() + " requires " + rule);
}

}  // namespace

void GraphFamily::validate() const {
  constexpr int kMaxOrder = 2048;
  switch (kind) {
    case FamilyKind::Path: require(a >= 2, *this, "n >= 2"); break;
    case FamilyKind::Cycle: require(a > 2, *this, "n > 2"); break;
    case FamilyKind::MaryTree:
      require(a >= 2 && b >= 1, *this, "m >= 2 and depth >= 1");
      require(b <= 11, *this, "depth <= 11");
      break;
    case FamilyKind::Wheel: require(a > 3, *this, "n > 3"); break;
    case FamilyKind::Hypercube: require(a >= 3 && a <= 11, *this, "n = 2^m > 4 (3 <= m <= 11)"); break;
    case FamilyKind::Petersen: break;
    case FamilyKind::Complete: require(a > 2, *this, "n > 2"); break;
    case FamilyKind::CompleteBipartite: require(a >= 2 && b >= 2, *this, "m, n >= 2"); break;
    case FamilyKind::Star: require(a >= 3, *this, "n >= 3"); break;
    case FamilyKind::DirectedPath: require(a >= 2, *this, "n >= 2"); break;
    case FamilyKind::DirectedCycle: require(a > 2, *this, "n > 2"); break;
  }
  require(order() <= kMaxOrder, *this, "at most 2048 vertices");
}

std::string GraphFamily::spec() const {
  auto s = [](int v) { return std::to_string(v); };
  switch (kind) {
    case FamilyKind::Path: return "path:" + s(a);
    case FamilyKind::Cycle: return "cycle:" + s(a);
    case FamilyKind::MaryTree: return "mtree:" + s(a) + ":" + s(b);
    case FamilyKind::Wheel: return "wheel:" + s(a);
    case FamilyKind::Hypercube: return "hypercube:" + s(a);
    case FamilyKind::Petersen: return "petersen";
    case FamilyKind::Complete: return "complete:" + s(a);
    case FamilyKind::CompleteBipartite: return "kbip:" + s(a) + ":" + s(b);
    case FamilyKind::Star: return "star:" + s(a);
    case FamilyKind::DirectedPath: return "directed-path:" + s(a);
    case FamilyKind::DirectedCycle: return "directed-cycle:" + s(a);
  }
  return {};
}

GraphFamily GraphFamily::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw Error(ErrorCode::ParseError, "empty family spec");

  static const std::map<std::string, std::pair<FamilyKind, int>> kNames = {
      {"path", {FamilyKind::Path, 1}},
      {"cycle", {FamilyKind::Cycle, 1}},
      {"mtree", {FamilyKind::MaryTree, 2}},
      {"mary-tree", {FamilyKind::MaryTree, 2}},
      {"wheel", {FamilyKind::Wheel, 1}},
      {"hypercube", {FamilyKind::Hypercube, 1}},
      {"cube", {FamilyKind::Hypercube, 1}},
      {"petersen", {FamilyKind::Petersen, 0}},
      {"complete", {FamilyKind::Complete, 1}},
      {"kbip", {FamilyKind::CompleteBipartite, 2}},
      {"complete-bipartite", {FamilyKind::CompleteBipartite, 2}},
      {"star", {FamilyKind::Star, 1}},
      {"directed-path", {FamilyKind::DirectedPath, 1}},
      {"dpath", {FamilyKind::DirectedPath, 1}},
      {"directed-cycle", {FamilyKind::DirectedCycle, 1}},
      {"dcycle", {FamilyKind::DirectedCycle, 1}},
  };
  auto it = kNames.find(parts[0]);
  if (it == kNames.end()) throw Error(ErrorCode::ParseError, "unknown family '" + parts[0] + "'");
  const auto [kind, arity] = it->second;
  if (static_cast<int>(parts.size()) != arity + 1) {
    throw Error(ErrorCode::ParseError, "family '" + parts[0] + "' takes " +
                                           std::to_string(arity) + " parameter(s)");
  }
  int params[2] = {0, 0};
  for (int i = 0; i < arity; ++i) {
    const auto& p = parts[i + 1];
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), params[i]);
    if (ec != std::errc() || ptr != p.data() + p.size()) {
      throw Error(ErrorCode::ParseError, "bad integer '" + p + "' in family spec");
    }
  }
  return {kind, params[0], params[1]};
}

Graph generate_family(const GraphFamily& f) {
  f.validate();
  const int n = f.order();
  std::vector<Edge> e;
  switch (f.kind) {
    case FamilyKind::Path:
      for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
      break;
    case FamilyKind::Cycle:
      for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
      e.push_back({1, n});
      break;
    case FamilyKind::MaryTree:
      // BFS order: children of vertex v are m(v-1)+2 .. m(v-1)+m+1.
      for (int child = 2; child <= n; ++child) e.push_back({(child - 2) / f.a + 1, child});
      break;
    case FamilyKind::Wheel:
      for (int i = 2; i <= n; ++i) e.push_back({1, i});
      for (int i = 2; i < n; ++i) e.push_back({i, i + 1});
      e.push_back({2, n});
      break;
    case FamilyKind::Hypercube:
      for (int i = 0; i < n; ++i) {
        for (int bit = 0; bit < f.a; ++bit) {
          const int j = i ^ (1 << bit);
          if (i < j) e.push_back({i + 1, j + 1});
        }
      }
      break;
    case FamilyKind::Petersen:
      for (int i = 0; i < 5; ++i) {
        e.push_back({i + 1, (i + 1) % 5 + 1});      // outer cycle
        e.push_back({i + 6, (i + 2) % 5 + 6});      // inner pentagram
        e.push_back({i + 1, i + 6});                // spokes
      }
      break;
    case FamilyKind::Complete:
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) e.push_back({i, j});
      break;
    case FamilyKind::CompleteBipartite:
      for (int i = 1; i <= f.a; ++i)
        for (int j = f.a + 1; j <= n; ++j) e.push_back({i, j});
      break;
    case FamilyKind::Star:
      for (int i = 2; i <= n; ++i) e.push_back({1, i});
      break;
    case FamilyKind::DirectedPath:
      for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
      break;
    case FamilyKind::DirectedCycle:
      for (int i = 1; i < n; ++i) e.push_back({i, i + 1});
      e.push_back({n, 1});
      break;
  }
  return Graph(n, std::move(e), f.directed(), f.spec());
}

// ---------------------------------------------------------------------------
// Matrices

MatrixBundle matrices(const Graph& g) {
  const int n = g.order();
  MatrixBundle m;
  m.adjacency = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    if (g.directed()) {
      m.adjacency(e.to - 1, e.from - 1) = 1.0;
    } else {
      m.adjacency(e.from - 1, e.to - 1) = 1.0;
      m.adjacency(e.to - 1, e.from - 1) = 1.0;
    }
  }
  m.degree = m.adjacency.rowwise().sum().asDiagonal();
  m.laplacian = m.degree - m.adjacency;
  m.signless = m.degree + m.adjacency;
  return m;
}

Matrix deformed_laplacian(const MatrixBundle& m, double s) {
  const auto n = m.adjacency.rows();
  const Matrix identity = Matrix::Identity(n, n);
  return (m.degree - identity) * (s * s) - m.adjacency * s + identity;
}

Matrix deformed_laplacian(const Graph& g, double s) { return deformed_laplacian(matrices(g), s); }

std::vector<int> degrees(const Graph& g) {
  std::vector<int> deg(g.order(), 0);
  for (const auto& e : g.edges()) {
    ++deg[e.to - 1];
    if (!g.directed()) ++deg[e.from - 1];
  }
  return deg;
}

// ---------------------------------------------------------------------------
// Structure

namespace {

using AdjList = std::vector<std::vector<int>>;

std::vector<bool> reachable(const AdjList& adj, int start) {
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> q;
  q.push(start);
  seen[start] = true;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        q.push(w);
      }
    }
  }
  return seen;
}

bool all_true(const std::vector<bool>& v) {
  return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
}

}  // namespace

StructureReport structure_probe(const Graph& g) {
  const int n = g.order();
  AdjList out(n), in(n), both(n);
  std::vector<int> din(n, 0), dout(n, 0);
  for (const auto& e : g.edges()) {
    const int i = e.from - 1, j = e.to - 1;
    both[i].push_back(j);
    both[j].push_back(i);
    if (g.directed()) {
      out[i].push_back(j);
      in[j].push_back(i);
      ++dout[i];
      ++din[j];
    } else {
      out[i].push_back(j);
      out[j].push_back(i);
      ++din[i];
      ++din[j];
    }
  }
  if (!g.directed()) dout = din;

  StructureReport r;
  r.weakly_connected = all_true(reachable(both, 0));
  r.connected = r.weakly_connected;
  r.max_degree = *std::max_element(din.begin(), din.end());
  if (std::all_of(din.begin(), din.end(), [&](int d) { return d == din[0]; })) {
    r.regular_degree = din[0];
  }
  r.balanced = din == dout;

  // A spanning rooted out-branching exists iff some vertex reaches every other.
  for (int v = 0; v < n && !r.has_rooted_out_branching; ++v) {
    r.has_rooted_out_branching = all_true(reachable(out, v));
  }
  r.strongly_connected = all_true(reachable(out, 0)) && all_true(reachable(g.directed() ? in : out, 0));

  // BFS 2-coloring over the disoriented graph, every component.
  std::vector<int> color(n, -1);
  bool bipartite = true;
  for (int start = 0; start < n && bipartite; ++start) {
    if (color[start] != -1) continue;
    color[start] = 0;
    std::queue<int> q;
    q.push(start);
    while (!q.empty() && bipartite) {
      const int v = q.front();
      q.pop();
      for (int w : both[v]) {
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          q.push(w);
        } else if (color[w] == color[v]) {
          bipartite = false;
          break;
        }
      }
    }
  }
  r.bipartite = bipartite;
  if (bipartite) {
    std::pair<std::vector<int>, std::vector<int>> part;
    for (int v = 0; v < n; ++v) (color[v] == 0 ? part.first : part.second).push_back(v + 1);
    r.partition = std::move(part);
  }
  return r;
}

}  // namespace dcl
