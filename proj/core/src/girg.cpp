#include "girglab/girg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "girglab/numerics.hpp"
#include "girglab/parallel.hpp"

namespace girglab::girg {

double GirgParams::side_length() const {
    const auto nd = static_cast<double>(n);
    if (d == 1)
        return nd;
    if (d == 2)
        return std::sqrt(nd);
    if (d == 3)
        return std::cbrt(nd);
    return std::pow(nd, 1.0 / d);
}

void GirgParams::validate() const {
    if (d < 1)
        throw std::invalid_argument("dimension d must be >= 1");
    if (!(tau > 2.0) || !std::isfinite(tau))
        throw std::invalid_argument("tau must satisfy tau > 2 (power-law exponent), got " +
                                    std::to_string(tau));
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::invalid_argument("k must be a finite number > 0");
    if (n < 1)
        throw std::invalid_argument("n must be >= 1");
    if (n > std::numeric_limits<VertexId>::max())
        throw std::invalid_argument("n exceeds the 32-bit vertex id range");
}

Graph::Graph(GirgParams params, std::vector<double> weights, std::vector<double> coords,
             std::vector<std::int64_t> offsets, std::vector<VertexId> neighbors)
    : params_(params), weights_(std::move(weights)), coords_(std::move(coords)),
      offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {}

bool Graph::operator==(const Graph& o) const {
    return params_.d == o.params_.d && params_.tau == o.params_.tau && params_.k == o.params_.k &&
           params_.n == o.params_.n && weights_ == o.weights_ && coords_ == o.coords_ &&
           offsets_ == o.offsets_ && neighbors_ == o.neighbors_;
}

double weight_from_uniform(double u, double tau) { return std::pow(u, -1.0 / (tau - 1.0)); }

std::vector<double> sample_weights(const GirgParams& params, const CounterRng& rng) {
    params.validate();
    const CounterRng stream = rng.split(1);
    std::vector<double> w(static_cast<std::size_t>(params.n));
    for (std::size_t v = 0; v < w.size(); ++v) {
        CounterRng r = stream.at(v);
        w[v] = weight_from_uniform(r.uniform_open_closed(), params.tau);
    }
    return w;
}

std::vector<double> sample_positions(const GirgParams& params, const CounterRng& rng) {
    params.validate();
    const CounterRng stream = rng.split(2);
    const double L = params.side_length();
    std::vector<double> x(static_cast<std::size_t>(params.n) * params.d);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CounterRng r = stream.at(i);
        double c = -0.5 * L + L * r.uniform01();
        if (c >= 0.5 * L)
            c = -0.5 * L;
        x[i] = c;
    }
    return x;
}

namespace {

inline double wrap_diff(double a, double b, double L) {
    double t = std::abs(a - b);
    if (t > 0.5 * L)
        t = L - t;
    return t;
}

inline double power_from_square(double s, int d) {
    switch (d) {
    case 2:
        return s;
    case 3:
        return s * std::sqrt(s);
    case 4:
        return s * s;
    default: {
        double p = 1.0;
        for (int i = 0; i < d / 2; ++i)
            p *= s;
        if (d % 2 == 1)
            p *= std::sqrt(s);
        return p;
    }
    }
}

inline double dist_pow(const double* x, const double* y, double L, int d) {
    if (d == 1)
        return wrap_diff(x[0], y[0], L);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double t = wrap_diff(x[i], y[i], L);
        s += t * t;
    }
    return power_from_square(s, d);
}

} // namespace

double torus_distance(std::span<const double> x, std::span<const double> y, double L) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = wrap_diff(x[i], y[i], L);
        s += t * t;
    }
    return std::sqrt(s);
}

double torus_distance_pow(std::span<const double> x, std::span<const double> y, double L, int d) {
    return dist_pow(x.data(), y.data(), L, d);
}

bool is_edge(std::span<const double> xu, std::span<const double> xv, double wu, double wv,
             double k, double L, int d) {
    return dist_pow(xu.data(), xv.data(), L, d) <= k * (wu * wv);
}

namespace {

// Vertices bucketed by weight layer [2^j, 2^{j+1}) and, inside a layer, by cell.
// Each layer gets its own cell side, close to the edge radius of a weight-1 vertex
// against the heaviest member, so light queries into heavy layers stay cheap.
struct CellIndex {
    int d = 0;
    double L = 0.0;
    struct Layer {
        double w_max = 0.0;
        int m = 1; // cells per dimension
        double side = 0.0;
        std::size_t cells = 1;
        std::vector<std::size_t> start; // cells + 1
        std::vector<VertexId> ids;
        std::vector<double> w;
        std::vector<double> x; // ids.size() * d
    };
    std::vector<Layer> layers;

    static int cell_coord(const Layer& l, double c, double L) {
        auto i = static_cast<long long>(std::floor((c + 0.5 * L) / l.side));
        return static_cast<int>(std::clamp<long long>(i, 0, l.m - 1));
    }
};

CellIndex make_index(const GirgParams& p, const std::vector<double>& w,
                     const std::vector<double>& x) {
    CellIndex ix;
    ix.d = p.d;
    ix.L = p.side_length();
    // keep the cell count within a small multiple of n
    const double cap = std::floor(std::pow(4.0 * static_cast<double>(p.n), 1.0 / p.d));

    const std::size_t n = w.size();
    std::vector<int> layer_of(n);
    int max_layer = 0;
    for (std::size_t v = 0; v < n; ++v) {
        const int j = std::max(0, static_cast<int>(std::floor(std::log2(w[v]))));
        layer_of[v] = j;
        max_layer = std::max(max_layer, j);
    }
    ix.layers.resize(static_cast<std::size_t>(max_layer) + 1);
    for (std::size_t v = 0; v < n; ++v) {
        auto& l = ix.layers[layer_of[v]];
        l.w_max = std::max(l.w_max, w[v]);
    }
    for (auto& l : ix.layers) {
        const double target = std::max(std::pow(p.k * std::max(l.w_max, 1.0), 1.0 / p.d), 1.0);
        l.m = static_cast<int>(std::clamp(std::floor(ix.L / target), 1.0, std::max(1.0, cap)));
        l.side = ix.L / l.m;
        for (int i = 0; i < p.d; ++i)
            l.cells *= static_cast<std::size_t>(l.m);
        l.start.assign(l.cells + 1, 0);
    }
    std::vector<std::size_t> cell_of(n);
    for (std::size_t v = 0; v < n; ++v) {
        auto& l = ix.layers[layer_of[v]];
        std::size_t c = 0;
        for (int i = 0; i < p.d; ++i)
            c = c * l.m + static_cast<std::size_t>(CellIndex::cell_coord(l, x[v * p.d + i], ix.L));
        cell_of[v] = c;
        ++l.start[c + 1];
    }
    for (auto& l : ix.layers) {
        for (std::size_t c = 0; c < l.cells; ++c)
            l.start[c + 1] += l.start[c];
        l.ids.resize(l.start[l.cells]);
        l.w.resize(l.ids.size());
        l.x.resize(l.ids.size() * p.d);
    }
    std::vector<std::vector<std::size_t>> fill(ix.layers.size());
    for (std::size_t j = 0; j < ix.layers.size(); ++j)
        fill[j].assign(ix.layers[j].start.begin(), ix.layers[j].start.end() - 1);
    for (std::size_t v = 0; v < n; ++v) {
        auto& l = ix.layers[layer_of[v]];
        const std::size_t pos = fill[layer_of[v]][cell_of[v]]++;
        l.ids[pos] = static_cast<VertexId>(v);
        l.w[pos] = w[v];
        for (int i = 0; i < p.d; ++i)
            l.x[pos * p.d + i] = x[v * p.d + i];
    }
    return ix;
}

// Appends every neighbour of u (unsorted) to out.
void collect_row(const CellIndex& ix, const GirgParams& p, std::size_t u, double wu,
                 const double* xu, std::vector<VertexId>& out, std::vector<int>& lo,
                 std::vector<int>& span, std::vector<int>& cur) {
    const int d = p.d;
    const double L = ix.L;
    for (const auto& layer : ix.layers) {
        if (layer.ids.empty())
            continue;
        const double bound = p.k * (wu * layer.w_max) * (1.0 + 1e-12);
        const double R = std::pow(bound, 1.0 / d);
        bool all = true;
        for (int i = 0; i < d; ++i) {
            const double c = xu[i] + 0.5 * L;
            const auto a = static_cast<long long>(std::floor((c - R) / layer.side)) - 1;
            const auto b = static_cast<long long>(std::floor((c + R) / layer.side)) + 1;
            if (b - a + 1 >= layer.m) {
                lo[i] = 0;
                span[i] = layer.m;
            } else {
                lo[i] = static_cast<int>(((a % layer.m) + layer.m) % layer.m);
                span[i] = static_cast<int>(b - a + 1);
                all = false;
            }
        }
        auto scan = [&](std::size_t from, std::size_t to) {
            for (std::size_t q = from; q < to; ++q) {
                if (static_cast<std::size_t>(layer.ids[q]) == u)
                    continue;
                if (dist_pow(xu, layer.x.data() + q * d, L, d) <= p.k * (wu * layer.w[q]))
                    out.push_back(layer.ids[q]);
            }
        };
        if (all) {
            scan(0, layer.ids.size()); // hub pass: whole layer
            continue;
        }
        // odometer over the box of cells
        std::fill(cur.begin(), cur.end(), 0);
        while (true) {
            std::size_t c = 0;
            for (int i = 0; i < d; ++i)
                c = c * layer.m + static_cast<std::size_t>((lo[i] + cur[i]) % layer.m);
            scan(layer.start[c], layer.start[c + 1]);
            int i = d - 1;
            while (i >= 0 && ++cur[i] == span[i]) {
                cur[i] = 0;
                --i;
            }
            if (i < 0)
                break;
        }
    }
}

} // namespace

Graph build_graph_from(const GirgParams& params, std::vector<double> weights,
                       std::vector<double> coords) {
    params.validate();
    const auto n = static_cast<std::size_t>(params.n);
    if (weights.size() != n || coords.size() != n * params.d)
        throw std::invalid_argument("build_graph_from: weights/coordinates do not match n and d");
    const CellIndex ix = make_index(params, weights, coords);

    constexpr std::size_t kChunk = 2048;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<VertexId>> chunk_adj(chunks);
    std::vector<std::vector<std::int64_t>> chunk_deg(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<int> lo(params.d), span(params.d), cur(params.d);
        std::vector<VertexId> row;
        auto& adj = chunk_adj[c];
        auto& deg = chunk_deg[c];
        const std::size_t first = c * kChunk, last = std::min(n, first + kChunk);
        for (std::size_t u = first; u < last; ++u) {
            row.clear();
            collect_row(ix, params, u, weights[u], coords.data() + u * params.d, row, lo, span,
                        cur);
            std::sort(row.begin(), row.end());
            adj.insert(adj.end(), row.begin(), row.end());
            deg.push_back(static_cast<std::int64_t>(row.size()));
        }
    });

    std::vector<std::int64_t> offsets(n + 1, 0);
    std::size_t v = 0;
    for (const auto& deg : chunk_deg)
        for (std::int64_t dv : deg) {
            offsets[v + 1] = offsets[v] + dv;
            ++v;
        }
    std::vector<VertexId> nbrs;
    nbrs.reserve(static_cast<std::size_t>(offsets[n]));
    for (auto& adj : chunk_adj) {
        nbrs.insert(nbrs.end(), adj.begin(), adj.end());
        std::vector<VertexId>().swap(adj);
    }
    return Graph(params, std::move(weights), std::move(coords), std::move(offsets),
                 std::move(nbrs));
}

Graph build_graph(const GirgParams& params) {
    params.validate();
    const CounterRng root(params.seed);
    return build_graph_from(params, sample_weights(params, root), sample_positions(params, root));
}

double ball_of_influence_radius(double w, const GirgParams& params) {
    return std::pow(params.k * w, 1.0 / params.d);
}

DegreeSplit expected_degree(double w, const GirgParams& params) {
    if (!(params.tau > 2.0))
        throw std::invalid_argument("expected_degree: tau must be > 2");
    DegreeSplit s;
    s.near = unit_ball_volume(params.d) * params.k * w;
    s.far = s.near / (params.tau - 2.0);
    return s;
}

double calibrate_k(double target_mean_degree, int d, double tau) {
    if (!(tau > 2.0))
        throw std::invalid_argument("calibrate_k: tau must be > 2");
    if (!(target_mean_degree > 0.0))
        throw std::invalid_argument("calibrate_k: target mean degree must be > 0");
    const double mean_w = (tau - 1.0) / (tau - 2.0);
    return target_mean_degree / (unit_ball_volume(d) * mean_w * (1.0 + 1.0 / (tau - 2.0)));
}

DegreeReport degree_report(const Graph& g) {
    DegreeReport rep;
    const std::size_t n = g.order();
    if (n == 0)
        return rep;
    const auto& p = g.params();
    const double L = p.side_length();
    double sum = 0.0, sum2 = 0.0, near_sum = 0.0;
    std::vector<WeightBucket> buckets;
    for (std::size_t v = 0; v < n; ++v) {
        const auto vid = static_cast<VertexId>(v);
        const double wv = g.weight(vid);
        const auto xv = g.position(vid);
        std::size_t near = 0;
        for (VertexId u : g.neighbors(vid))
            if (dist_pow(xv.data(), g.position(u).data(), L, p.d) <= p.k * wv)
                ++near;
        const auto deg = static_cast<double>(g.degree(vid));
        sum += deg;
        sum2 += deg * deg;
        near_sum += static_cast<double>(near);

        const auto dec = static_cast<std::size_t>(std::max(0.0, std::floor(std::log10(wv))));
        if (buckets.size() <= dec) {
            const std::size_t old = buckets.size();
            buckets.resize(dec + 1);
            for (std::size_t j = old; j <= dec; ++j) {
                buckets[j].w_lo = std::pow(10.0, static_cast<double>(j));
                buckets[j].w_hi = std::pow(10.0, static_cast<double>(j + 1));
            }
        }
        auto& b = buckets[dec];
        ++b.count;
        b.mean_weight += wv;
        b.mean_degree += deg;
        b.mean_near += static_cast<double>(near);
        b.mean_far += deg - static_cast<double>(near);
    }
    const auto nd = static_cast<double>(n);
    rep.mean_near = near_sum / nd;
    rep.mean_far = (sum - near_sum) / nd;
    rep.mean_degree = rep.mean_near + rep.mean_far;
    const double m = sum / nd;
    rep.degree_stddev = std::sqrt(std::max(0.0, sum2 / nd - m * m));
    for (auto& b : buckets) {
        if (b.count == 0)
            continue;
        const auto c = static_cast<double>(b.count);
        b.mean_weight /= c;
        b.mean_degree /= c;
        b.mean_near /= c;
        b.mean_far /= c;
    }
    rep.buckets = std::move(buckets);
    return rep;
}

} // namespace girglab::girg
