// Enumerates connected nonbipartite graphs on five vertices and lists those
// whose stability breakpoints come close to the given target values.
#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <set>
#include <vector>

#include "CLI11.hpp"
#include "dcl/error.hpp"
#include "dcl/io.hpp"
#include "dcl/qep.hpp"

namespace {

constexpr int kN = 5;

using EdgeList = std::vector<std::pair<int, int>>;

std::vector<std::pair<int, int>> all_pairs() {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= kN; ++i) {
    for (int j = i + 1; j <= kN; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

// Smallest edge mask over all vertex relabelings.
unsigned canonical_mask(unsigned mask, const std::vector<std::pair<int, int>>& pairs) {
  std::array<int, kN> perm{0, 1, 2, 3, 4};
  unsigned best = ~0u;
  do {
    unsigned m = 0;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (!(mask & (1u << e))) continue;
      int a = perm[pairs[e].first - 1] + 1;
      int b = perm[pairs[e].second - 1] + 1;
      if (a > b) std::swap(a, b);
      const auto it = std::find(pairs.begin(), pairs.end(), std::make_pair(a, b));
      m |= 1u << static_cast<unsigned>(it - pairs.begin());
    }
    best = std::min(best, m);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Search five-vertex graphs for given stability thresholds"};
  std::vector<double> targets{0.7022, 0.4396, 0.3804};
  double tolerance = 1e-3;
  app.add_option("--target", targets, "Threshold values to look for");
  app.add_option("--tol", tolerance, "Match tolerance");
  CLI11_PARSE(app, argc, argv);

  const auto pairs = all_pairs();
  std::set<unsigned> seen;
  int examined = 0;
  int matches = 0;
  for (unsigned mask = 1; mask < (1u << pairs.size()); ++mask) {
    const unsigned canon = canonical_mask(mask, pairs);
    if (!seen.insert(canon).second) continue;
    EdgeList edges;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      if (canon & (1u << e)) edges.push_back(pairs[e]);
    }
    const dcl::Graph g = dcl::build_graph(kN, edges, false, "g" + std::to_string(canon));
    const auto probe = dcl::structure_probe(g);
    if (!probe.connected || probe.bipartite) continue;
    ++examined;

    dcl::StabilityReport report;
    try {
      report = dcl::stability_intervals(g);
    } catch (const dcl::Error& e) {
      std::cerr << g.name() << ": " << e.what() << "\n";
      continue;
    }
    std::vector<double> hits;
    for (const auto& m : report.marginal) {
      for (double t : targets) {
        if (std::abs(m.s - t) <= tolerance) hits.push_back(m.s);
      }
    }
    if (hits.empty()) continue;
    ++matches;
    std::cout << dcl::graph_to_json(g).dump() << "\n  thresholds:";
    for (const auto& m : report.marginal) std::cout << " " << dcl::format_number(m.s);
    std::cout << "\n  matched:";
    for (double h : hits) std::cout << " " << dcl::format_number(h);
    std::cout << "\n";
  }
  std::cout << examined << " connected nonbipartite graphs examined, " << matches << " with a match\n";
  return 0;
}
