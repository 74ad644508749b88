#include "sparse_lingam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "sparse_lingam/errors.hpp"
#include "sparse_lingam/postprocess.hpp"

namespace sparse_lingam {

namespace {

std::vector<Index> random_order(Index d, std::mt19937_64& rng) {
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

const char* to_string(GraphKind kind) noexcept {
  return kind == GraphKind::er ? "er" : "sf";
}

const char* to_string(NoiseDist dist) noexcept {
  switch (dist) {
    case NoiseDist::laplace: return "laplace";
    case NoiseDist::uniform: return "uniform";
    case NoiseDist::exponential: return "exponential";
  }
  return "unknown";
}

GraphKind parse_graph_kind(const std::string& text) {
  if (text == "er") return GraphKind::er;
  if (text == "sf") return GraphKind::sf;
  throw Error(ErrorKind::parameter, "unknown graph kind '" + text + "'");
}

NoiseDist parse_noise_dist(const std::string& text) {
  if (text == "laplace") return NoiseDist::laplace;
  if (text == "uniform") return NoiseDist::uniform;
  if (text == "exponential") return NoiseDist::exponential;
  throw Error(ErrorKind::parameter, "unknown noise distribution '" + text + "'");
}

Index GraphTruth::n_edges() const { return (b.array() != 0.0).count(); }

GraphTruth gen_er_graph(Index d, double expected_edges, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorKind::parameter, "graph needs d >= 2");
  const double slots = static_cast<double>(d) * static_cast<double>(d - 1) / 2.0;
  if (!(expected_edges >= 0.0) || expected_edges > slots) {
    throw Error(ErrorKind::parameter,
                "expected edge count must lie in [0, d(d-1)/2]");
  }
  std::mt19937_64 rng(seed);
  const auto order = random_order(d, rng);
  const double p = expected_edges / slots;

  GraphTruth truth;
  truth.kind = GraphKind::er;
  truth.seed = seed;
  truth.b = Matrix::Zero(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index c = a + 1; c < d; ++c) {
      if (uniform01(rng) < p) {
        truth.b(order[static_cast<std::size_t>(c)],
                order[static_cast<std::size_t>(a)]) = 1.0;
      }
    }
  }
  return truth;
}

GraphTruth gen_sf_graph(Index d, int attachment, std::uint64_t seed) {
  if (d < 2) throw Error(ErrorKind::parameter, "graph needs d >= 2");
  if (attachment < 1 || attachment >= d) {
    throw Error(ErrorKind::parameter, "attachment must satisfy 1 <= m < d");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> degree(static_cast<std::size_t>(d), 0.0);
  std::vector<std::pair<Index, Index>> edges;  // (earlier, later)

  for (Index t = 1; t < d; ++t) {
    const Index picks = std::min<Index>(attachment, t);
    std::vector<char> taken(static_cast<std::size_t>(t), 0);
    for (Index p = 0; p < picks; ++p) {
      double total = 0.0;
      for (Index s = 0; s < t; ++s) {
        if (!taken[static_cast<std::size_t>(s)]) total += degree[static_cast<std::size_t>(s)];
      }
      Index chosen = -1;
      if (total > 0.0) {
        double r = uniform01(rng) * total;
        for (Index s = 0; s < t; ++s) {
          const auto ss = static_cast<std::size_t>(s);
          if (taken[ss] || degree[ss] == 0.0) continue;
          chosen = s;
          r -= degree[ss];
          if (r < 0.0) break;
        }
      } else {
        // Only zero-degree candidates left: pick uniformly.
        std::vector<Index> free;
        for (Index s = 0; s < t; ++s) {
          if (!taken[static_cast<std::size_t>(s)]) free.push_back(s);
        }
        chosen = free[std::uniform_int_distribution<std::size_t>(
            0, free.size() - 1)(rng)];
      }
      taken[static_cast<std::size_t>(chosen)] = 1;
      edges.emplace_back(chosen, t);
    }
    for (Index s = 0; s < t; ++s) {
      if (taken[static_cast<std::size_t>(s)]) {
        degree[static_cast<std::size_t>(s)] += 1.0;
        degree[static_cast<std::size_t>(t)] += 1.0;
      }
    }
  }

  const auto label = random_order(d, rng);
  GraphTruth truth;
  truth.kind = GraphKind::sf;
  truth.seed = seed;
  truth.b = Matrix::Zero(d, d);
  for (const auto& [from, to] : edges) {
    truth.b(label[static_cast<std::size_t>(to)],
            label[static_cast<std::size_t>(from)]) = 1.0;
  }
  return truth;
}

GraphTruth assign_weights_and_noises(const GraphTruth& skeleton,
                                     std::uint64_t seed,
                                     std::optional<NoiseDist> fixed) {
  if (!is_acyclic(skeleton.b).acyclic) {
    throw Error(ErrorKind::parameter, "skeleton is not acyclic");
  }
  std::mt19937_64 rng(seed);
  GraphTruth truth = skeleton;
  for (Index k = 0; k < truth.b.cols(); ++k) {
    for (Index j = 0; j < truth.b.rows(); ++j) {
      if (truth.b(j, k) == 0.0) continue;
      const double magnitude = 0.5 + uniform01(rng);
      truth.b(j, k) = uniform01(rng) < 0.5 ? -magnitude : magnitude;
    }
  }
  truth.noises.clear();
  for (Index j = 0; j < truth.b.rows(); ++j) {
    NoiseSpec spec;
    const auto pick = std::uniform_int_distribution<int>(0, 2)(rng);
    spec.dist = fixed ? *fixed : static_cast<NoiseDist>(pick);
    spec.variance = 1.0 + 2.0 * uniform01(rng);
    truth.noises.push_back(spec);
  }
  return truth;
}

double draw_noise(const NoiseSpec& spec, std::mt19937_64& rng) {
  const double sd = std::sqrt(spec.variance);
  switch (spec.dist) {
    case NoiseDist::laplace: {
      // Inverse CDF with scale sd / sqrt(2).
      while (true) {
        const double u = uniform01(rng) - 0.5;
        const double tail = 1.0 - 2.0 * std::abs(u);
        if (tail <= 0.0) continue;
        const double mag = -std::log(tail) * sd / std::sqrt(2.0);
        return u < 0.0 ? -mag : mag;
      }
    }
    case NoiseDist::uniform:
      return (2.0 * uniform01(rng) - 1.0) * std::sqrt(3.0) * sd;
    case NoiseDist::exponential:
      // Mean sd, variance sd^2; centered.
      return -std::log1p(-uniform01(rng)) * sd - sd;
  }
  return 0.0;
}

Dataset sample_data(const GraphTruth& truth, Index n, std::uint64_t seed) {
  const Index d = truth.n_vars();
  if (static_cast<Index>(truth.noises.size()) != d) {
    throw Error(ErrorKind::parameter, "truth has no noise specification");
  }
  const auto acyclic = is_acyclic(truth.b);
  if (!acyclic.acyclic) throw Error(ErrorKind::parameter, "truth is not acyclic");

  std::mt19937_64 rng(seed);
  Matrix s(n, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < n; ++i) {
      s(i, j) = draw_noise(truth.noises[static_cast<std::size_t>(j)], rng);
    }
  }
  Matrix x = s;
  for (const Index k : acyclic.order) {
    for (Index j = 0; j < d; ++j) {
      if (truth.b(k, j) != 0.0) x.col(k) += truth.b(k, j) * x.col(j);
    }
  }
  return Dataset::from_values(std::move(x));
}

std::vector<double> simulate_ar1(std::size_t length, double coef,
                                 std::uint64_t seed, NoiseDist dist) {
  if (!(std::abs(coef) < 1.0)) {
    throw Error(ErrorKind::parameter, "AR(1) coefficient must satisfy |coef| < 1");
  }
  std::mt19937_64 rng(seed);
  const NoiseSpec spec{dist, 1.0};
  double x = 0.0;
  for (int burn = 0; burn < 1000; ++burn) x = coef * x + draw_noise(spec, rng);
  std::vector<double> out(length);
  for (auto& v : out) {
    x = coef * x + draw_noise(spec, rng);
    v = x;
  }
  return out;
}

std::string truth_to_json(const GraphTruth& truth) {
  nlohmann::ordered_json doc;
  doc["format"] = "sparse-lingam/graph-truth";
  doc["version"] = 1;
  doc["n_vars"] = truth.n_vars();
  doc["graph_kind"] = to_string(truth.kind);
  doc["seed"] = truth.seed;
  auto edges = nlohmann::ordered_json::array();
  for (Index j = 0; j < truth.b.rows(); ++j) {
    for (Index k = 0; k < truth.b.cols(); ++k) {
      if (truth.b(j, k) != 0.0) edges.push_back({j, k, truth.b(j, k)});
    }
  }
  doc["edges"] = std::move(edges);
  auto noises = nlohmann::ordered_json::array();
  for (const auto& spec : truth.noises) {
    noises.push_back({{"distribution", to_string(spec.dist)},
                      {"variance", spec.variance}});
  }
  doc["noises"] = std::move(noises);
  return doc.dump(2) + "\n";
}

GraphTruth truth_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    GraphTruth truth;
    const Index d = doc.at("n_vars").get<Index>();
    if (d < 1) throw Error(ErrorKind::parse, "n_vars must be positive");
    truth.kind = parse_graph_kind(doc.at("graph_kind").get<std::string>());
    truth.seed = doc.at("seed").get<std::uint64_t>();
    truth.b = Matrix::Zero(d, d);
    for (const auto& e : doc.at("edges")) {
      const auto row = e.at(0).get<Index>();
      const auto col = e.at(1).get<Index>();
      if (row < 0 || row >= d || col < 0 || col >= d) {
        throw Error(ErrorKind::parse, "edge index out of range");
      }
      truth.b(row, col) = e.at(2).get<double>();
    }
    for (const auto& n : doc.at("noises")) {
      truth.noises.push_back({parse_noise_dist(n.at("distribution").get<std::string>()),
                              n.at("variance").get<double>()});
    }
    return truth;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("graph truth JSON: ") + e.what());
  }
}

}  // namespace sparse_lingam
