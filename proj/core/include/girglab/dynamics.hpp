#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "girglab/girg.hpp"
#include "girglab/rng.hpp"

namespace girglab::dynamics {

using girg::Graph;
using girg::VertexId;

inline constexpr std::int8_t kBlue = 1;
inline constexpr std::int8_t kRed = -1;

struct Square {
    double side = 0.0;
};
struct Ball {
    double radius = 0.0;
};
struct HalfSpace {};
struct UniformRandom {
    double p_blue = 0.5;
    std::uint64_t seed = 0;
};
using InitialShape = std::variant<Square, Ball, HalfSpace, UniformRandom>;

class OpinionConfig {
public:
    // spins must be +-1 and match graph order
    OpinionConfig(const Graph& g, std::vector<std::int8_t> spins);

    std::span<const std::int8_t> spins() const { return spins_; }
    std::int8_t spin(VertexId v) const { return spins_[static_cast<std::size_t>(v)]; }
    // sum of neighbour spins
    std::int32_t field(VertexId v) const { return field_[static_cast<std::size_t>(v)]; }
    std::size_t size() const { return spins_.size(); }

    bool is_unstable(VertexId v) const { return pos_[static_cast<std::size_t>(v)] >= 0; }
    std::size_t unstable_count() const { return unstable_.size(); }
    std::span<const VertexId> unstable_vertices() const { return unstable_; }
    std::size_t blue_count() const { return blue_; }

    // majority rule at v; true if v flipped
    bool step(const Graph& g, VertexId v);

private:
    static bool unstable_rule(std::int8_t s, std::int32_t f) {
        return f != 0 && ((f > 0) != (s > 0));
    }
    void refresh(VertexId v);

    std::vector<std::int8_t> spins_;
    std::vector<std::int32_t> field_;
    std::vector<VertexId> unstable_;
    std::vector<std::int32_t> pos_; // index in unstable_ or -1
    std::size_t blue_ = 0;
};

// blue inside the shape (boundary inclusive), red elsewhere
OpinionConfig init_opinions(const Graph& g, const InitialShape& shape);
bool in_shape(std::span<const double> x, const InitialShape& shape);

// recomputed from scratch; for cross-checking the incremental set
std::vector<VertexId> unstable_from_scratch(const Graph& g, std::span<const std::int8_t> spins);

// in-place step; returns whether v flipped
bool step(const Graph& g, OpinionConfig& config, VertexId v);

struct RunOptions {
    std::int64_t max_steps = 0; // 0: 100 * n * ln n (at least 1000)
    std::int64_t snapshot_every = 0;
    std::function<void(std::int64_t step, const OpinionConfig&)> on_snapshot;
};

struct SurvivalCriterion {
    std::size_t min_component = 50;
    double min_fraction = 0.005;
    std::size_t threshold(std::size_t n) const;
};

struct RunStats {
    std::int64_t steps_taken = 0;
    std::int64_t flips = 0;
    std::size_t final_blue_count = 0;
    bool converged = false; // unstable set empty at the end
    bool survived = false;
    double elapsed_seconds = 0.0;
};

std::int64_t default_max_steps(std::size_t n);

// uniform vertex selection with replacement until stable or max_steps
RunStats run_until_stable(const Graph& g, OpinionConfig& config, CounterRng& rng,
                          const RunOptions& options = {},
                          const SurvivalCriterion& criterion = {});

std::size_t largest_blue_component(const Graph& g, const OpinionConfig& config);
bool classify_survival(const Graph& g, const OpinionConfig& config,
                       const SurvivalCriterion& criterion = {});

} // namespace girglab::dynamics
