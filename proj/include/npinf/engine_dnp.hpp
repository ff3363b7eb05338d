#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "npinf/engine_cnp.hpp"
#include "npinf/graph.hpp"
#include "npinf/rng.hpp"
#include "npinf/trace.hpp"

namespace npinf {

/// Synchronous discrete-time simulation without graph replication: the state
/// at step t is computed from step t-1 alone. A node is active at step t if
/// it was active and its deactivation draw failed, OR any in-neighbor active
/// at t-1 succeeded its attempt on the connecting edge, OR (for nodes
/// inactive at t-1) the ambient draw succeeded. The OR means a successful
/// attempt overrides a same-step deactivation.
///
/// Every active node makes one attempt per out-edge per step, in a fixed
/// order (ascending node id, deactivation draw first, then out-edges by
/// destination; afterwards one ambient draw per inactive node, ascending),
/// so runs are reproducible under a seeded generator. Per-step work is
/// O(#active + out-degrees of active nodes), plus O(#inactive) only when
/// ambient influence is enabled.
inline StepTrace simulate_dnp(const DnpGraph& g, const SeedSet& seeds, std::uint32_t T_steps,
                              std::mt19937_64& gen, bool record_sequences = false) {
    if (T_steps == 0) throw std::invalid_argument("simulate_dnp: step horizon must be at least 1");
    const SeedSet norm = detail::normalize_seeds(seeds, g.num_nodes());
    const NodeId n = g.num_nodes();

    StepTrace trace;
    trace.total_steps = T_steps;
    trace.active_steps.assign(n, 0);
    if (record_sequences) trace.sequences.assign(n, std::vector<bool>(T_steps, false));

    std::vector<char> prev(n, false);
    std::vector<char> next(n, false);
    std::vector<NodeId> active_list(norm.begin(), norm.end());
    for (NodeId s : active_list) prev[s] = true;

    const auto record_step = [&](std::uint32_t step) {
        for (NodeId u : active_list) {
            ++trace.active_steps[u];
            if (record_sequences) trace.sequences[u][step] = true;
        }
    };
    record_step(0);

    std::vector<NodeId> next_list;
    for (std::uint32_t step = 1; step < T_steps; ++step) {
        next_list.clear();
        const auto mark = [&](NodeId v) {
            if (!next[v]) {
                next[v] = true;
                next_list.push_back(v);
            }
        };
        for (NodeId u : active_list) {
            const bool deactivates = uniform01(gen) < g.node_weight(u);
            if (!deactivates) mark(u);
            for (std::uint32_t idx : g.out_edges(u)) {
                const auto& e = g.edge(idx);
                if (uniform01(gen) < e.weight) mark(e.dst);
            }
        }
        if (g.ambient() > 0.0) {
            for (NodeId v = 0; v < n; ++v) {
                if (!prev[v] && uniform01(gen) < g.ambient()) mark(v);
            }
        }
        std::sort(next_list.begin(), next_list.end());
        for (NodeId u : active_list) prev[u] = false;
        for (NodeId u : next_list) prev[u] = true;
        for (NodeId u : next_list) next[u] = false;
        active_list.swap(next_list);
        record_step(step);
    }
    return trace;
}

/// Converts a step trace into interval form (unit-length steps), for the
/// shared trace-dump format.
inline Trace step_trace_to_intervals(const StepTrace& t) {
    if (t.sequences.empty()) {
        throw std::invalid_argument("step_trace_to_intervals: step trace was recorded without sequences");
    }
    Trace out;
    out.horizon = t.total_steps;
    out.intervals.resize(t.sequences.size());
    for (std::size_t u = 0; u < t.sequences.size(); ++u) {
        const auto& seq = t.sequences[u];
        std::uint32_t run_start = 0;
        bool in_run = false;
        for (std::uint32_t step = 0; step < t.total_steps; ++step) {
            if (seq[step] && !in_run) {
                run_start = step;
                in_run = true;
            } else if (!seq[step] && in_run) {
                out.intervals[u].push_back({static_cast<double>(run_start), static_cast<double>(step)});
                in_run = false;
            }
        }
        if (in_run) {
            out.intervals[u].push_back({static_cast<double>(run_start), static_cast<double>(t.total_steps)});
        }
    }
    return out;
}

}  // namespace npinf
