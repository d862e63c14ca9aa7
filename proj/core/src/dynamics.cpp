#include "girglab/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace girglab::dynamics {

OpinionConfig::OpinionConfig(const Graph& g, std::vector<std::int8_t> spins)
    : spins_(std::move(spins)) {
    const std::size_t n = g.order();
    if (spins_.size() != n)
        throw std::invalid_argument("OpinionConfig: spin vector does not match graph order");
    field_.assign(n, 0);
    pos_.assign(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        if (spins_[v] != kBlue && spins_[v] != kRed)
            throw std::invalid_argument("OpinionConfig: spins must be +1 or -1");
        blue_ += spins_[v] == kBlue;
        std::int32_t f = 0;
        for (VertexId u : g.neighbors(static_cast<VertexId>(v)))
            f += spins_[static_cast<std::size_t>(u)];
        field_[v] = f;
    }
    for (std::size_t v = 0; v < n; ++v)
        refresh(static_cast<VertexId>(v));
}

void OpinionConfig::refresh(VertexId v) {
    const auto i = static_cast<std::size_t>(v);
    const bool want = unstable_rule(spins_[i], field_[i]);
    const bool have = pos_[i] >= 0;
    if (want == have)
        return;
    if (want) {
        pos_[i] = static_cast<std::int32_t>(unstable_.size());
        unstable_.push_back(v);
    } else {
        const auto p = static_cast<std::size_t>(pos_[i]);
        const VertexId last = unstable_.back();
        unstable_[p] = last;
        pos_[static_cast<std::size_t>(last)] = static_cast<std::int32_t>(p);
        unstable_.pop_back();
        pos_[i] = -1;
    }
}

bool OpinionConfig::step(const Graph& g, VertexId v) {
    const auto i = static_cast<std::size_t>(v);
    if (pos_[i] < 0)
        return false;
    // unstable means the field has the opposite sign: flip
    const std::int8_t next = field_[i] > 0 ? kBlue : kRed;
    spins_[i] = next;
    if (next == kBlue)
        ++blue_;
    else
        --blue_;
    refresh(v);
    const std::int32_t delta = 2 * next;
    for (VertexId u : g.neighbors(v)) {
        field_[static_cast<std::size_t>(u)] += delta;
        refresh(u);
    }
    return true;
}

bool step(const Graph& g, OpinionConfig& config, VertexId v) { return config.step(g, v); }

bool in_shape(std::span<const double> x, const InitialShape& shape) {
    return std::visit(
        [&](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Square>) {
                for (double c : x)
                    if (std::abs(c) > 0.5 * s.side)
                        return false;
                return true;
            } else if constexpr (std::is_same_v<S, Ball>) {
                double r2 = 0.0;
                for (double c : x)
                    r2 += c * c;
                return r2 <= s.radius * s.radius;
            } else if constexpr (std::is_same_v<S, HalfSpace>) {
                return x[0] >= 0.0;
            } else {
                throw std::logic_error("in_shape: UniformRandom has no region");
            }
        },
        shape);
}

OpinionConfig init_opinions(const Graph& g, const InitialShape& shape) {
    const double L = g.params().side_length();
    const std::size_t n = g.order();
    std::vector<std::int8_t> spins(n, kRed);
    if (const auto* s = std::get_if<Square>(&shape)) {
        if (!(s->side > 0.0) || s->side > L)
            throw std::invalid_argument("Square side must be in (0, L]");
    } else if (const auto* b = std::get_if<Ball>(&shape)) {
        if (!(b->radius > 0.0) || 2.0 * b->radius >= L)
            throw std::invalid_argument("Ball diameter must be in (0, L)");
    } else if (const auto* u = std::get_if<UniformRandom>(&shape)) {
        if (!(u->p_blue >= 0.0 && u->p_blue <= 1.0))
            throw std::invalid_argument("UniformRandom p_blue must be in [0, 1]");
        const CounterRng r(u->seed);
        for (std::size_t v = 0; v < n; ++v)
            spins[v] = r.at(v).uniform01() < u->p_blue ? kBlue : kRed;
        return OpinionConfig(g, std::move(spins));
    }
    for (std::size_t v = 0; v < n; ++v)
        if (in_shape(g.position(static_cast<VertexId>(v)), shape))
            spins[v] = kBlue;
    return OpinionConfig(g, std::move(spins));
}

std::vector<VertexId> unstable_from_scratch(const Graph& g, std::span<const std::int8_t> spins) {
    std::vector<VertexId> out;
    for (std::size_t v = 0; v < g.order(); ++v) {
        std::int32_t f = 0;
        for (VertexId u : g.neighbors(static_cast<VertexId>(v)))
            f += spins[static_cast<std::size_t>(u)];
        if (f != 0 && ((f > 0) != (spins[v] > 0)))
            out.push_back(static_cast<VertexId>(v));
    }
    return out;
}

std::int64_t default_max_steps(std::size_t n) {
    const auto nd = static_cast<double>(std::max<std::size_t>(n, 2));
    return std::max<std::int64_t>(1000, static_cast<std::int64_t>(100.0 * nd * std::log(nd)));
}

std::size_t SurvivalCriterion::threshold(std::size_t n) const {
    const auto frac = static_cast<std::size_t>(std::ceil(min_fraction * static_cast<double>(n)));
    // never more than the whole graph
    return std::min(n, std::max(min_component, frac));
}

RunStats run_until_stable(const Graph& g, OpinionConfig& config, CounterRng& rng,
                          const RunOptions& options, const SurvivalCriterion& criterion) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = g.order();
    const std::int64_t max_steps =
        options.max_steps > 0 ? options.max_steps : default_max_steps(n);
    RunStats st;
    if (options.on_snapshot)
        options.on_snapshot(0, config);
    while (config.unstable_count() > 0 && st.steps_taken < max_steps) {
        const auto v = static_cast<VertexId>(rng.below(n));
        ++st.steps_taken;
        if (config.step(g, v))
            ++st.flips;
        if (options.snapshot_every > 0 && options.on_snapshot &&
            st.steps_taken % options.snapshot_every == 0)
            options.on_snapshot(st.steps_taken, config);
    }
    st.converged = config.unstable_count() == 0;
    st.final_blue_count = config.blue_count();
    st.survived = classify_survival(g, config, criterion);
    st.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return st;
}

std::size_t largest_blue_component(const Graph& g, const OpinionConfig& config) {
    const std::size_t n = g.order();
    std::vector<char> seen(n, 0);
    std::vector<VertexId> stack;
    std::size_t best = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s] || config.spin(static_cast<VertexId>(s)) != kBlue)
            continue;
        std::size_t size = 0;
        seen[s] = 1;
        stack.push_back(static_cast<VertexId>(s));
        while (!stack.empty()) {
            const VertexId v = stack.back();
            stack.pop_back();
            ++size;
            for (VertexId u : g.neighbors(v)) {
                const auto ui = static_cast<std::size_t>(u);
                if (!seen[ui] && config.spin(u) == kBlue) {
                    seen[ui] = 1;
                    stack.push_back(u);
                }
            }
        }
        best = std::max(best, size);
    }
    return best;
}

bool classify_survival(const Graph& g, const OpinionConfig& config,
                       const SurvivalCriterion& criterion) {
    return largest_blue_component(g, config) >= criterion.threshold(g.order());
}

} // namespace girglab::dynamics
