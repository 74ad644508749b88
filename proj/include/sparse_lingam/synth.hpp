#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparse_lingam/data.hpp"
#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

enum class GraphKind { er, sf };
enum class NoiseDist { laplace, uniform, exponential };

const char* to_string(GraphKind kind) noexcept;
const char* to_string(NoiseDist dist) noexcept;
GraphKind parse_graph_kind(const std::string& text);
NoiseDist parse_noise_dist(const std::string& text);

struct NoiseSpec {
  NoiseDist dist = NoiseDist::laplace;
  double variance = 1.0;
};

/// Ground-truth linear SEM x = B x + s. B(k, j) != 0 is an edge j -> k.
/// A skeleton has unit weights and no noise specs yet.
struct GraphTruth {
  Matrix b;
  GraphKind kind = GraphKind::er;
  std::vector<NoiseSpec> noises;
  std::uint64_t seed = 0;

  Index n_vars() const { return b.rows(); }
  Index n_edges() const;
};

/// Erdos-Renyi DAG: a random topological order, then each of the
/// d(d-1)/2 order-respecting edges independently with probability
/// expected_edges / (d(d-1)/2).
GraphTruth gen_er_graph(Index d, double expected_edges, std::uint64_t seed);

/// Scale-free DAG by preferential attachment: node t attaches min(m, t)
/// edges to distinct earlier nodes with probability proportional to
/// degree + 1, oriented earlier -> later. Node labels are shuffled.
GraphTruth gen_sf_graph(Index d, int attachment, std::uint64_t seed);

/// Weights uniform on [-1.5, -0.5] U [0.5, 1.5]; noise variances uniform
/// on [1, 3]; each noise distribution drawn uniformly from the three
/// candidates unless `fixed` is given.
GraphTruth assign_weights_and_noises(const GraphTruth& skeleton,
                                     std::uint64_t seed,
                                     std::optional<NoiseDist> fixed = std::nullopt);

/// Zero-mean draw with the given variance.
double draw_noise(const NoiseSpec& spec, std::mt19937_64& rng);

/// Samples N rows of x = (I - B)^{-1} s, variables filled in causal order.
Dataset sample_data(const GraphTruth& truth, Index n, std::uint64_t seed);

/// Stationary AR(1) path x_t = coef x_{t-1} + e_t with zero-mean noise of
/// the given distribution and unit variance (after a burn-in).
std::vector<double> simulate_ar1(std::size_t length, double coef,
                                 std::uint64_t seed,
                                 NoiseDist dist = NoiseDist::laplace);

/// JSON layout (see docs/formats.md).
std::string truth_to_json(const GraphTruth& truth);
GraphTruth truth_from_json(const std::string& text);

}  // namespace sparse_lingam
