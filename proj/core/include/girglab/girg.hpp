#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "girglab/rng.hpp"

namespace girglab::girg {

using VertexId = std::int32_t;

struct GirgParams {
    int d = 2;
    double tau = 3.0;
    double k = 1.0;
    std::int64_t n = 1000;
    std::uint64_t seed = 0;

    // torus side n^{1/d}
    double side_length() const;
    // throws std::invalid_argument
    void validate() const;
};

class Graph {
public:
    Graph() = default;
    Graph(GirgParams params, std::vector<double> weights, std::vector<double> coords,
          std::vector<std::int64_t> offsets, std::vector<VertexId> neighbors);

    const GirgParams& params() const { return params_; }
    std::size_t order() const { return weights_.size(); }
    std::size_t edge_count() const { return neighbors_.size() / 2; }
    int dim() const { return params_.d; }

    double weight(VertexId v) const { return weights_[static_cast<std::size_t>(v)]; }
    std::span<const double> position(VertexId v) const {
        return {coords_.data() + static_cast<std::size_t>(v) * params_.d,
                static_cast<std::size_t>(params_.d)};
    }
    std::span<const VertexId> neighbors(VertexId v) const {
        const auto i = static_cast<std::size_t>(v);
        return {neighbors_.data() + offsets_[i],
                static_cast<std::size_t>(offsets_[i + 1] - offsets_[i])};
    }
    std::size_t degree(VertexId v) const { return neighbors(v).size(); }

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& coordinates() const { return coords_; }
    const std::vector<std::int64_t>& offsets() const { return offsets_; }
    const std::vector<VertexId>& adjacency() const { return neighbors_; }

    bool operator==(const Graph& o) const;

private:
    GirgParams params_;
    std::vector<double> weights_;
    std::vector<double> coords_; // n * d, row-major
    std::vector<std::int64_t> offsets_;
    std::vector<VertexId> neighbors_;
};

// Pareto(tau - 1) weights on [1, inf) by inverse CDF
double weight_from_uniform(double u, double tau);
std::vector<double> sample_weights(const GirgParams& params, const CounterRng& rng);
// n * d coordinates, uniform on [-L/2, L/2)^d
std::vector<double> sample_positions(const GirgParams& params, const CounterRng& rng);

double torus_distance(std::span<const double> x, std::span<const double> y, double L);
// ||x - y||^d on the torus, from the squared distance without going through sqrt for even d
double torus_distance_pow(std::span<const double> x, std::span<const double> y, double L, int d);
// the edge rule: dist^d <= k * (w_u * w_v)
bool is_edge(std::span<const double> xu, std::span<const double> xv, double wu, double wv,
             double k, double L, int d);

// Samples weights and positions from params.seed, then connects.
Graph build_graph(const GirgParams& params);
// Exact construction for given vertex data using a cell grid split by weight layers.
Graph build_graph_from(const GirgParams& params, std::vector<double> weights,
                       std::vector<double> coords);

double ball_of_influence_radius(double w, const GirgParams& params);

struct DegreeSplit {
    double near = 0.0;
    double far = 0.0;
    double total() const { return near + far; }
};
DegreeSplit expected_degree(double w, const GirgParams& params);
double calibrate_k(double target_mean_degree, int d, double tau);

struct WeightBucket {
    double w_lo = 0.0, w_hi = 0.0; // [w_lo, w_hi)
    std::size_t count = 0;
    double mean_weight = 0.0;
    double mean_degree = 0.0;
    double mean_near = 0.0;
    double mean_far = 0.0;
};

struct DegreeReport {
    double mean_degree = 0.0;
    double mean_near = 0.0;
    double mean_far = 0.0;
    double degree_stddev = 0.0;
    std::vector<WeightBucket> buckets; // by weight decade
};
DegreeReport degree_report(const Graph& graph);

} // namespace girglab::girg
