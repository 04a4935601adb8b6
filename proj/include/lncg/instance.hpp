#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lncg/common.hpp"
#include "lncg/orthlin.hpp"

namespace lncg {

// Simple undirected graph on vertices 0..m-1 with edges stored as u < v.
struct Graph {
  int m = 0;
  std::vector<std::pair<int, int>> edges;

  void validate() const {
    for (auto [u, v] : edges)
      if (u < 0 || v <= u || v >= m) throw std::invalid_argument("graph: bad edge");
  }

  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<std::size_t>(m), 0);
    for (auto [u, v] : edges) {
      d[u]++;
      d[v]++;
    }
    return d;
  }
};

inline Graph path_graph(int m) {
  Graph g;
  g.m = m;
  for (int v = 0; v + 1 < m; ++v) g.edges.push_back({v, v + 1});
  return g;
}

inline Graph complete_graph(int m) {
  Graph g;
  g.m = m;
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) g.edges.push_back({u, v});
  return g;
}

// Pairing-model sampler: m*degree half-edges are matched uniformly and the
// draw is rejected until it forms a simple graph.
inline Graph random_regular_graph(int m, int degree, Rng& rng, int max_retries = 1000) {
  if (degree >= m || degree < 1 || m < 1 || (m * degree) % 2 != 0)
    throw std::invalid_argument("random_regular_graph: infeasible (need m*degree even, degree < m)");
  std::vector<int> stubs(static_cast<std::size_t>(m) * degree);
  for (int v = 0; v < m; ++v)
    for (int k = 0; k < degree; ++k) stubs[static_cast<std::size_t>(v) * degree + k] = v;
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    // Fisher-Yates shuffle, then pair consecutive stubs.
    std::vector<int> s = stubs;
    for (std::size_t i = s.size() - 1; i > 0; --i)
      std::swap(s[i], s[rng.uniform_int(i + 1)]);
    std::vector<std::pair<int, int>> edges;
    std::vector<char> seen(static_cast<std::size_t>(m) * m, 0);
    bool ok = true;
    for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
      int u = s[i], v = s[i + 1];
      if (u == v) {
        ok = false;
        break;
      }
      if (u > v) std::swap(u, v);
      auto& flag = seen[static_cast<std::size_t>(u) * m + v];
      if (flag) {
        ok = false;
        break;
      }
      flag = 1;
      edges.push_back({u, v});
    }
    if (ok) {
      Graph g;
      g.m = m;
      std::sort(edges.begin(), edges.end());
      g.edges = std::move(edges);
      return g;
    }
  }
  throw ConvergenceError("random_regular_graph: pairing model exhausted retries", max_retries);
}

struct ProblemInstance {
  Graph graph;
  int n = 0;
  Group group = Group::SO;
  std::vector<MatrixXd> blocks;  // parallel to graph.edges, block for (u,v) with u < v
  std::optional<std::vector<MatrixXd>> planted;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int degree = 0;  // 0 when the graph is not a sampled regular graph
  std::string rng_algorithm = Rng::kAlgorithm;

  const MatrixXd& block(std::size_t edge_index) const { return blocks[edge_index]; }

  // C_uv for an arbitrary ordered pair on an existing edge (transposing when
  // the stored orientation is (v,u)).
  MatrixXd block_for(int u, int v) const {
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      if (graph.edges[e].first == u && graph.edges[e].second == v) return blocks[e];
      if (graph.edges[e].first == v && graph.edges[e].second == u) return blocks[e].transpose();
    }
    throw std::invalid_argument("block_for: no such edge");
  }

  void validate() const {
    graph.validate();
    if (blocks.size() != graph.edges.size())
      throw std::invalid_argument("instance: one block per edge required");
    for (const auto& b : blocks)
      if (b.rows() != n || b.cols() != n || !b.allFinite())
        throw std::invalid_argument("instance: bad block");
    if (planted && static_cast<int>(planted->size()) != graph.m)
      throw std::invalid_argument("instance: planted list size mismatch");
  }
};

inline ProblemInstance gen_group_sync(int m, int degree, int n, double sigma, Group group,
                                      std::uint64_t seed) {
  Rng rng(seed);
  ProblemInstance inst;
  inst.graph = random_regular_graph(m, degree, rng);
  inst.n = n;
  inst.group = group;
  inst.noise_sigma = sigma;
  inst.seed = seed;
  inst.degree = degree;
  std::vector<MatrixXd> g;
  g.reserve(static_cast<std::size_t>(m));
  for (int v = 0; v < m; ++v) g.push_back(orthlin::haar_sample(n, group, rng));
  inst.blocks.reserve(inst.graph.edges.size());
  for (auto [u, v] : inst.graph.edges) {
    MatrixXd c = g[u] * g[v].transpose();
    if (sigma > 0.0) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) += sigma * rng.gaussian();
    }
    inst.blocks.push_back(std::move(c));
  }
  inst.planted = std::move(g);
  return inst;
}

// Generalized orthogonal Procrustes data: K Gaussian points per cloud,
// C_uv = sum_k x_{u,k} x_{v,k}^T on the complete graph. The Gram diagonal
// blocks C_vv (not part of the edge objective) are exposed for callers that
// need the full PSD matrix.
inline ProblemInstance gen_procrustes(int m, int k_points, int n, Group group,
                                      std::uint64_t seed,
                                      std::vector<MatrixXd>* diag_blocks = nullptr) {
  if (k_points < 1) throw std::invalid_argument("gen_procrustes: K must be >= 1");
  Rng rng(seed);
  ProblemInstance inst;
  inst.graph = complete_graph(m);
  inst.n = n;
  inst.group = group;
  inst.seed = seed;
  std::vector<MatrixXd> points(static_cast<std::size_t>(m));  // n x K per cloud
  for (int v = 0; v < m; ++v) {
    points[v].resize(n, k_points);
    for (int j = 0; j < k_points; ++j)
      for (int i = 0; i < n; ++i) points[v](i, j) = rng.gaussian();
  }
  for (auto [u, v] : inst.graph.edges) inst.blocks.push_back(points[u] * points[v].transpose());
  if (diag_blocks) {
    diag_blocks->clear();
    for (int v = 0; v < m; ++v) diag_blocks->push_back(points[v] * points[v].transpose());
  }
  return inst;
}

inline double objective(const ProblemInstance& inst, const std::vector<MatrixXd>& r_list) {
  if (static_cast<int>(r_list.size()) != inst.graph.m)
    throw std::invalid_argument("objective: wrong number of matrices");
  for (const auto& r : r_list) {
    if (!orthlin::is_orthogonal(r, 1e-8))
      throw std::invalid_argument("objective: entry not orthogonal");
    if (inst.group == Group::SO && std::abs(r.determinant() - 1.0) > 1e-8)
      throw std::invalid_argument("objective: determinant -1 under group SO");
  }
  double acc = 0.0;
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    auto [u, v] = inst.graph.edges[e];
    acc += (inst.blocks[e].transpose() * (r_list[u] * r_list[v].transpose())).trace();
  }
  return acc;
}

namespace detail {

inline nlohmann::json matrix_to_json(const MatrixXd& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
  return nlohmann::json(flat);
}

inline MatrixXd matrix_from_json(const nlohmann::json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n * n)
    throw IoError("instance file: block has wrong length");
  MatrixXd m(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int jj = 0; jj < n; ++jj) m(i, jj) = j[k++].get<double>();
  return m;
}

}  // namespace detail

inline constexpr int kInstanceFileVersion = 1;

inline void save_instance(const ProblemInstance& inst, const std::string& path) {
  nlohmann::json j;
  j["version"] = kInstanceFileVersion;
  j["kind"] = "lncg-instance";
  j["m"] = inst.graph.m;
  j["n"] = inst.n;
  j["group"] = to_string(inst.group);
  j["degree"] = inst.degree;
  j["noise_sigma"] = inst.noise_sigma;
  j["seed"] = inst.seed;
  j["rng_algorithm"] = inst.rng_algorithm;
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    edges.push_back({inst.graph.edges[e].first, inst.graph.edges[e].second});
    blocks.push_back(detail::matrix_to_json(inst.blocks[e]));
  }
  j["edges"] = std::move(edges);
  j["blocks"] = std::move(blocks);
  if (inst.planted) {
    nlohmann::json planted = nlohmann::json::array();
    for (const auto& g : *inst.planted) planted.push_back(detail::matrix_to_json(g));
    j["planted"] = std::move(planted);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed instance file '" + path + "': " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kInstanceFileVersion)
      throw IoError("instance file version mismatch in '" + path + "'");
    ProblemInstance inst;
    inst.graph.m = j.at("m").get<int>();
    inst.n = j.at("n").get<int>();
    inst.group = group_from_string(j.at("group").get<std::string>());
    inst.degree = j.value("degree", 0);
    inst.noise_sigma = j.at("noise_sigma").get<double>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.rng_algorithm = j.value("rng_algorithm", std::string(Rng::kAlgorithm));
    for (const auto& e : j.at("edges"))
      inst.graph.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    for (const auto& b : j.at("blocks"))
      inst.blocks.push_back(detail::matrix_from_json(b, inst.n));
    if (j.contains("planted")) {
      std::vector<MatrixXd> planted;
      for (const auto& g : j.at("planted"))
        planted.push_back(detail::matrix_from_json(g, inst.n));
      inst.planted = std::move(planted);
    }
    inst.validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid instance file '" + path + "': " + e.what());
  }
}

}  // namespace lncg
