#pragma once

#include <cstdint>
#include <vector>

#include "npinf/graph.hpp"

namespace npinf {

/// The set of nodes active by definition at time zero.
using SeedSet = std::vector<NodeId>;

/// Half-open activity interval [start, end).
struct Interval {
    double start;
    double end;
    bool operator==(const Interval&) const = default;
};

/// Per-node activity intervals over a horizon; intervals are disjoint,
/// sorted, and clipped to [0, horizon].
struct Trace {
    std::vector<std::vector<Interval>> intervals;
    double horizon = 0.0;

    bool active_at(NodeId u, double t) const {
        for (const Interval& iv : intervals[u]) {
            if (iv.start <= t && t < iv.end) return true;
        }
        return false;
    }
};

/// Total active time summed over all nodes.
inline double spread(const Trace& trace) {
    double total = 0.0;
    for (const auto& node_intervals : trace.intervals) {
        for (const Interval& iv : node_intervals) total += iv.end - iv.start;
    }
    return total;
}

/// Discrete-time activity record: per-node count of active steps, plus the
/// per-step activity sequences when requested.
struct StepTrace {
    std::vector<std::uint32_t> active_steps;
    std::uint32_t total_steps = 0;
    std::vector<std::vector<bool>> sequences;  // empty unless recorded

    double spread() const {
        double total = 0.0;
        for (std::uint32_t c : active_steps) total += c;
        return total;
    }
};

}  // namespace npinf
