#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "scriptsim/cluster.hpp"
#include "scriptsim/error.hpp"
#include "scriptsim/format.hpp"

namespace scriptsim {

using ojson = nlohmann::ordered_json;

ClusterGraph book_graph(const Partition& partition, const std::vector<RowLabel>& labels) {
  if (labels.size() != partition.assign.size()) {
    throw Error(ErrorCode::LengthMismatch, "partition and row labels differ in length");
  }
  ClusterGraph g;
  g.k = partition.k;

  // counts[book][cluster]
  std::vector<std::vector<std::size_t>> counts(kBookCount, std::vector<std::size_t>(partition.k, 0));
  std::vector<std::size_t> totals(kBookCount, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++counts[index_of(labels[i].book)][partition.assign[i]];
    ++totals[index_of(labels[i].book)];
  }
  for (BookLabel b : kAllBooks) {
    if (totals[index_of(b)] > 0) g.nodes.push_back(b);
  }

  const std::size_t m = g.nodes.size();
  g.weight.assign(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ia = index_of(g.nodes[a]);
    for (std::size_t b = a + 1; b < m; ++b) {
      const std::size_t ib = index_of(g.nodes[b]);
      std::size_t same = 0;
      for (std::size_t c = 0; c < partition.k; ++c) same += counts[ia][c] * counts[ib][c];
      const double w = static_cast<double>(same) /
                       (static_cast<double>(totals[ia]) * static_cast<double>(totals[ib]));
      g.weight[a * m + b] = w;
      g.weight[b * m + a] = w;
    }
  }
  return g;
}

std::string graph_dot(const ClusterGraph& g) {
  std::ostringstream out;
  out << "graph k" << g.k << " {\n";
  out << "  // edge weight: share of cross-book chapter pairs in the same cluster\n";
  for (BookLabel b : g.nodes) {
    out << "  " << abbreviation(b) << " [label=\"" << abbreviation(b) << "\", tooltip=\""
        << display_name(b) << "\"];\n";
  }
  const std::size_t m = g.nodes.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double w = g.at(a, b);
      if (w <= 0) continue;
      out << "  " << abbreviation(g.nodes[a]) << " -- " << abbreviation(g.nodes[b])
          << " [weight=" << format_double(w) << ", penwidth=" << format_double(1.0 + 9.0 * w)
          << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string graph_json(const ClusterGraph& g) {
  ojson j;
  j["k"] = g.k;
  j["nodes"] = ojson::array();
  for (BookLabel b : g.nodes) j["nodes"].push_back(abbreviation(b));
  j["edges"] = ojson::array();
  const std::size_t m = g.nodes.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      j["edges"].push_back(
          {{"a", abbreviation(g.nodes[a])}, {"b", abbreviation(g.nodes[b])}, {"weight", g.at(a, b)}});
    }
  }
  return j.dump(2) + "\n";
}

std::string partition_json(const Partition& p, const std::vector<RowLabel>& labels) {
  ojson j;
  j["k"] = p.k;
  j["measure"] = to_string(p.measure);
  j["seed"] = p.seed;
  j["restart"] = p.restart;
  j["iterations"] = p.iterations;
  j["objective"] = p.objective;
  j["plain_objective"] = p.plain_objective;
  j["objective_history"] = p.objective_history;
  j["assign"] = ojson::array();
  for (std::size_t i = 0; i < p.assign.size(); ++i) {
    j["assign"].push_back({{"row", row_name(labels.at(i))}, {"cluster", p.assign[i]}});
  }
  j["centroids"] = ojson::array();
  for (const auto& c : p.centroids) {
    ojson sparse = ojson::array();
    for (std::size_t t = 0; t < c.size(); ++t) {
      if (c[t] != 0) sparse.push_back({t, c[t]});
    }
    j["centroids"].push_back(std::move(sparse));
  }
  return j.dump(2) + "\n";
}

Dendrogram book_dendrogram(const BookDistanceMatrix& delta) {
  const std::size_t m = delta.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const auto& v = delta.at(a, b);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorCode::NonFiniteInput, "delta cell (" + std::string(abbreviation(delta.books[a])) +
                                                   ", " + std::string(abbreviation(delta.books[b])) +
                                                   ") is missing or not finite");
      }
    }
  }

  struct Node {
    std::size_t id;
    std::vector<std::size_t> leaves;  // sorted
  };
  std::vector<Node> active;
  for (std::size_t i = 0; i < m; ++i) active.push_back({i, {i}});

  auto linkage = [&](const Node& x, const Node& y) {
    double sum = 0;
    for (std::size_t a : x.leaves) {
      for (std::size_t b : y.leaves) sum += *delta.at(a, b);
    }
    return sum / static_cast<double>(x.leaves.size() * y.leaves.size());
  };

  Dendrogram d;
  d.leaves = delta.books;
  while (active.size() > 1) {
    std::size_t bi = 0;
    std::size_t bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const auto& [lo, hi] = active[i].leaves < active[j].leaves
                                   ? std::tie(active[i], active[j])
                                   : std::tie(active[j], active[i]);
        const double h = linkage(lo, hi);
        bool better = h < best;
        if (h == best) {
          const auto& [blo, bhi] = active[bi].leaves < active[bj].leaves
                                       ? std::tie(active[bi], active[bj])
                                       : std::tie(active[bj], active[bi]);
          better = std::tie(lo.leaves, hi.leaves) < std::tie(blo.leaves, bhi.leaves);
        }
        if (better) {
          best = h;
          bi = i;
          bj = j;
        }
      }
    }
    Node& x = active[bi];
    Node& y = active[bj];
    const bool x_first = x.leaves < y.leaves;
    Merge mg;
    mg.a = x_first ? x.id : y.id;
    mg.b = x_first ? y.id : x.id;
    mg.height = best;
    mg.size = x.leaves.size() + y.leaves.size();
    d.merges.push_back(mg);

    Node merged{m + d.merges.size() - 1, x.leaves};
    merged.leaves.insert(merged.leaves.end(), y.leaves.begin(), y.leaves.end());
    std::sort(merged.leaves.begin(), merged.leaves.end());
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active[bi] = std::move(merged);
  }
  return d;
}

std::string to_newick(const Dendrogram& d) {
  const std::size_t m = d.leaves.size();
  if (m == 0) return ";";
  if (d.merges.empty()) return std::string(abbreviation(d.leaves[0])) + ";";
  auto height = [&](std::size_t id) { return id < m ? 0.0 : d.merges[id - m].height; };
  std::function<std::string(std::size_t)> emit = [&](std::size_t id) -> std::string {
    if (id < m) return std::string(abbreviation(d.leaves[id]));
    const auto& mg = d.merges[id - m];
    return "(" + emit(mg.a) + ":" + format_double(mg.height - height(mg.a)) + "," + emit(mg.b) + ":" +
           format_double(mg.height - height(mg.b)) + ")";
  };
  return emit(m + d.merges.size() - 1) + ";";
}

std::string dendrogram_json(const Dendrogram& d) {
  ojson j;
  j["linkage"] = "average";
  j["leaves"] = ojson::array();
  for (BookLabel b : d.leaves) j["leaves"].push_back(abbreviation(b));
  j["merges"] = ojson::array();
  for (const auto& mg : d.merges) {
    j["merges"].push_back({{"a", mg.a}, {"b", mg.b}, {"height", mg.height}, {"size", mg.size}});
  }
  j["newick"] = to_newick(d);
  return j.dump(2) + "\n";
}

}  // namespace scriptsim
