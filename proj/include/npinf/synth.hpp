#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "npinf/graph.hpp"
#include "npinf/learner.hpp"
#include "npinf/rng.hpp"

namespace npinf {

struct SynthConfig {
    NodeId nodes = 500;
    double forward_prob = 0.35;
    double backward_prob = 0.32;
    std::uint64_t cascades = 0;
    std::uint64_t deactivations = 0;
    double horizon = 100.0;
    double follow_prob = 0.5;     // chance of passing a cascade along an out-edge
    double delay_min = 0.0;       // uniform cascade delay range, so the generated
    double delay_max = 5.0;       // data does not presuppose exponential clocks
    double deactivation_gap = 25.0;  // silence enforced after an injected deactivation
    std::uint64_t seed = 1;
};

namespace detail {

/// Geometric burn count: P(X = j) = (1 - p) p^j, mean p / (1 - p).
inline std::uint64_t geometric_count(std::mt19937_64& gen, double p) {
    if (p <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::log(uniform01_open_closed(gen)) / std::log(p));
}

}  // namespace detail

/// Forest-fire growth: each new node links to a uniformly chosen ambassador
/// and then burns outward, linking to a geometrically distributed number of
/// out- and in-neighbors of every burned node. Returns the directed topology
/// as a unit-rate graph. Deterministic for a fixed config.
inline CnpGraph forest_fire(const SynthConfig& cfg) {
    if (!(cfg.forward_prob >= 0.0 && cfg.forward_prob < 1.0) ||
        !(cfg.backward_prob >= 0.0 && cfg.backward_prob < 1.0)) {
        throw std::invalid_argument("forest_fire: burn probabilities must lie in [0, 1)");
    }
    const NodeId n = cfg.nodes;
    std::mt19937_64 gen(splitmix64(cfg.seed));
    std::vector<std::vector<NodeId>> out_adj(n), in_adj(n);
    std::vector<GraphEdge<double>> edges;
    std::vector<char> visited(n, false);
    std::vector<NodeId> touched, frontier, candidates;

    for (NodeId v = 1; v < n; ++v) {
        const NodeId ambassador = static_cast<NodeId>(uniform_index(gen, v));
        touched.clear();
        frontier.clear();
        const auto link = [&](NodeId target) {
            edges.push_back({v, target, 1.0});
            out_adj[v].push_back(target);
            in_adj[target].push_back(v);
            visited[target] = true;
            touched.push_back(target);
            frontier.push_back(target);
        };
        link(ambassador);
        while (!frontier.empty()) {
            const NodeId w = frontier.back();
            frontier.pop_back();
            const auto burn = [&](const std::vector<NodeId>& neighbors, std::uint64_t want) {
                if (want == 0) return;
                candidates.clear();
                for (NodeId z : neighbors) {
                    if (!visited[z] && z != v) candidates.push_back(z);
                }
                for (std::uint64_t picked = 0; picked < want && !candidates.empty(); ++picked) {
                    const std::size_t at = uniform_index(gen, candidates.size());
                    const NodeId z = candidates[at];
                    candidates[at] = candidates.back();
                    candidates.pop_back();
                    link(z);
                }
            };
            const std::uint64_t fwd = detail::geometric_count(gen, cfg.forward_prob);
            const std::uint64_t bwd = detail::geometric_count(gen, cfg.backward_prob);
            burn(out_adj[w], fwd);
            burn(in_adj[w], bwd);
        }
        for (NodeId t : touched) visited[t] = false;
    }
    return CnpGraph(n, std::move(edges), std::vector<double>(n, 0.0), 0.0);
}

/// Timestamped actions plus the deactivation events that were injected while
/// generating them.
struct SynthLog {
    std::vector<std::pair<double, NodeId>> actions;        // sorted by (time, user)
    std::vector<std::pair<double, NodeId>> injected_deactivations;
};

/// Cascade generation: each cascade starts at a random node at a random
/// time and spreads recursively over out-edges with uniform delays, visiting
/// each node at most once per cascade. Injected deactivations silence the
/// chosen node for `deactivation_gap` time units from the chosen timestamp
/// by discarding its actions in that window.
inline SynthLog gen_cascades(const CnpGraph& topology, const SynthConfig& cfg) {
    if (cfg.horizon <= 0.0) throw std::invalid_argument("gen_cascades: horizon must be positive");
    if (cfg.delay_max < cfg.delay_min || cfg.delay_min < 0.0) {
        throw std::invalid_argument("gen_cascades: bad delay range");
    }
    const NodeId n = topology.num_nodes();
    std::mt19937_64 gen(splitmix64(cfg.seed ^ 0x9e3779b97f4a7c15ULL));
    SynthLog log;
    if (n == 0) return log;

    std::vector<std::pair<double, NodeId>> raw;
    std::vector<char> in_cascade(n, false);
    std::vector<NodeId> visited;
    std::vector<std::pair<NodeId, double>> stack;
    for (std::uint64_t c = 0; c < cfg.cascades; ++c) {
        const NodeId root = static_cast<NodeId>(uniform_index(gen, n));
        const double t0 = uniform_real(gen, 0.0, cfg.horizon);
        visited.clear();
        stack.clear();
        stack.emplace_back(root, t0);
        in_cascade[root] = true;
        visited.push_back(root);
        while (!stack.empty()) {
            const auto [u, t] = stack.back();
            stack.pop_back();
            raw.emplace_back(t, u);
            for (std::uint32_t idx : topology.out_edges(u)) {
                const NodeId w = topology.edge(idx).dst;
                if (in_cascade[w]) continue;
                if (uniform01(gen) < cfg.follow_prob) {
                    const double tw = t + uniform_real(gen, cfg.delay_min, cfg.delay_max);
                    if (tw < cfg.horizon) {
                        in_cascade[w] = true;
                        visited.push_back(w);
                        stack.emplace_back(w, tw);
                    }
                }
            }
        }
        for (NodeId u : visited) in_cascade[u] = false;
    }

    for (std::uint64_t d = 0; d < cfg.deactivations; ++d) {
        const NodeId u = static_cast<NodeId>(uniform_index(gen, n));
        const double t = uniform_real(gen, 0.0, cfg.horizon);
        log.injected_deactivations.emplace_back(t, u);
    }

    for (const auto& [t, u] : raw) {
        bool silenced = false;
        for (const auto& [td, ud] : log.injected_deactivations) {
            if (ud == u && t >= td && t < td + cfg.deactivation_gap) {
                silenced = true;
                break;
            }
        }
        if (!silenced) log.actions.emplace_back(t, u);
    }
    std::sort(log.actions.begin(), log.actions.end());
    std::sort(log.injected_deactivations.begin(), log.injected_deactivations.end());
    return log;
}

/// Repackages a synthetic log as an ActionLog whose dense ids equal the
/// topology's node ids.
inline ActionLog to_action_log(const SynthLog& log, NodeId n) {
    ActionLog out;
    out.users.reserve(n);
    for (NodeId u = 0; u < n; ++u) out.users.push_back(std::to_string(u));
    out.actions.resize(n);
    for (const auto& [t, u] : log.actions) out.actions[u].push_back(t);
    for (auto& times : out.actions) detail::sort_and_collapse(times);
    return out;
}

/// Writes the learner's CSV format.
inline void save_action_log_csv(const SynthLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open file for writing");
    out << "user,timestamp\n";
    for (const auto& [t, u] : log.actions) {
        out << u << ',' << detail::format_weight(t) << '\n';
    }
}

}  // namespace npinf
