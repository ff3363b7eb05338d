#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "npinf/graph.hpp"
#include "npinf/rng.hpp"
#include "npinf/shard_sampler.hpp"
#include "npinf/trace.hpp"

namespace npinf {

struct EngineStats {
    std::uint64_t events_fired = 0;
    double t_final = 0.0;
};

/// Pre-sampled realization of the continuous-time process: per-edge
/// activation schedules, per-node deactivation schedules, and per-node
/// ambient (global-influence) schedules, each sorted within (0, horizon].
/// Propagation under a fixed world is deterministic.
struct PossibleWorld {
    std::vector<std::vector<double>> edge_schedules;
    std::vector<std::vector<double>> deact_schedules;
    std::vector<std::vector<double>> ambient_schedules;
    double horizon = 0.0;
};

namespace detail {

inline void check_horizon(double T) {
    if (!std::isfinite(T) || T <= 0.0) throw std::invalid_argument("horizon must be positive and finite");
}

inline SeedSet normalize_seeds(const SeedSet& seeds, NodeId n) {
    SeedSet out(seeds);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (!out.empty() && out.back() >= n) throw std::invalid_argument("seed id out of range");
    return out;
}

// Sampler keys: a 2-bit tag above the id keeps the three event kinds apart.
constexpr EventKey kEdgeTag = EventKey{1} << 62;
constexpr EventKey kDeactTag = EventKey{2} << 62;
constexpr EventKey kGlobalKey = EventKey{3} << 62;

inline EventKey edge_key(std::uint32_t edge_idx) { return kEdgeTag | edge_idx; }
inline EventKey deact_key(NodeId u) { return kDeactTag | u; }

/// Event-driven simulation state: activity flags, a dense inactive list for
/// uniform global-target draws, and the live-event sampler.
class EventDrivenRun {
public:
    EventDrivenRun(const CnpGraph& g, int precision)
        : g_(g),
          sampler_(precision),
          active_(g.num_nodes(), false),
          open_since_(g.num_nodes(), 0.0),
          inactive_pos_(g.num_nodes()) {
        inactive_.reserve(g.num_nodes());
        for (NodeId u = 0; u < g.num_nodes(); ++u) {
            inactive_pos_[u] = static_cast<std::uint32_t>(inactive_.size());
            inactive_.push_back(u);
        }
        trace_.intervals.resize(g.num_nodes());
    }

    Trace run(const SeedSet& seeds, double T, std::mt19937_64& gen, EngineStats* stats,
              std::uint64_t audit_every) {
        trace_.horizon = T;
        for (NodeId s : seeds) {
            if (!active_[s]) activate(s, 0.0);
        }
        refresh_global();

        double t = 0.0;
        std::uint64_t fired = 0;
        while (sampler_.total_quanta() != 0) {
            const double total = sampler_.total_mass();
            t += exp_sample(gen, total);
            if (t >= T) break;
            const EventKey key = sampler_.sample(uniform01_open_closed(gen) * total);
            fire(key, t, gen);
            ++fired;
            if (stats) stats->t_final = t;
            if (audit_every != 0 && fired % audit_every == 0) audit_live_set();
        }
        if (stats) stats->events_fired = fired;

        for (NodeId u = 0; u < g_.num_nodes(); ++u) {
            if (active_[u] && open_since_[u] < T) trace_.intervals[u].push_back({open_since_[u], T});
        }
        return std::move(trace_);
    }

private:
    void fire(EventKey key, double t, std::mt19937_64& gen) {
        if (key == kGlobalKey) {
            const NodeId v = inactive_[uniform_index(gen, inactive_.size())];
            activate(v, t);
        } else if (key & kDeactTag) {
            if (key & kEdgeTag) throw std::logic_error("engine: unknown event tag");
            deactivate(static_cast<NodeId>(key & 0xffffffffu), t);
        } else {
            const auto& e = g_.edge(key & 0xffffffffu);
            activate(e.dst, t);
        }
        refresh_global();
    }

    /// A node becoming active arms its own deactivation clock and fresh
    /// clocks toward its inactive out-neighbors, and disarms the clocks of
    /// in-neighbors that were racing to activate it. Zero-rate clocks can
    /// never fire and are never inserted.
    void activate(NodeId v, double t) {
        active_[v] = true;
        open_since_[v] = t;
        drop_inactive(v);
        for (std::uint32_t idx : g_.in_edges(v)) {
            const auto& e = g_.edge(idx);
            if (active_[e.src] && e.weight > 0.0) sampler_.remove(edge_key(idx));
        }
        if (g_.node_weight(v) > 0.0) sampler_.insert(deact_key(v), g_.node_weight(v));
        for (std::uint32_t idx : g_.out_edges(v)) {
            const auto& e = g_.edge(idx);
            if (!active_[e.dst] && e.weight > 0.0) sampler_.insert(edge_key(idx), e.weight);
        }
    }

    /// Deactivation disarms the node's own clocks and re-arms the clocks of
    /// active in-neighbors from scratch (valid because exponential clocks
    /// are memoryless).
    void deactivate(NodeId u, double t) {
        active_[u] = false;
        if (open_since_[u] < t) trace_.intervals[u].push_back({open_since_[u], t});
        push_inactive(u);
        sampler_.remove(deact_key(u));
        for (std::uint32_t idx : g_.out_edges(u)) {
            const auto& e = g_.edge(idx);
            if (!active_[e.dst] && e.weight > 0.0) sampler_.remove(edge_key(idx));
        }
        for (std::uint32_t idx : g_.in_edges(u)) {
            const auto& e = g_.edge(idx);
            if (active_[e.src] && e.weight > 0.0) sampler_.insert(edge_key(idx), e.weight);
        }
    }

    /// The global influencer is one aggregate event whose rate scales with
    /// the inactive population; on firing, the target is drawn uniformly.
    void refresh_global() {
        if (g_.ambient() <= 0.0) return;
        if (sampler_.contains(kGlobalKey)) sampler_.remove(kGlobalKey);
        if (!inactive_.empty()) {
            sampler_.insert(kGlobalKey, g_.ambient() * static_cast<double>(inactive_.size()));
        }
    }

    void drop_inactive(NodeId v) {
        const std::uint32_t pos = inactive_pos_[v];
        const NodeId last = inactive_.back();
        inactive_[pos] = last;
        inactive_pos_[last] = pos;
        inactive_.pop_back();
    }

    void push_inactive(NodeId v) {
        inactive_pos_[v] = static_cast<std::uint32_t>(inactive_.size());
        inactive_.push_back(v);
    }

    /// Debug check: recompute the expected live-event set from scratch and
    /// compare against the sampler's contents, quantized weights included.
    void audit_live_set() const {
        sampler_.audit();
        std::vector<std::pair<EventKey, std::uint64_t>> expected;
        for (NodeId u = 0; u < g_.num_nodes(); ++u) {
            if (active_[u] && g_.node_weight(u) > 0.0) {
                expected.emplace_back(deact_key(u), sampler_.quantize(g_.node_weight(u)));
            }
        }
        for (std::uint32_t idx = 0; idx < g_.num_edges(); ++idx) {
            const auto& e = g_.edge(idx);
            if (active_[e.src] && !active_[e.dst] && e.weight > 0.0) {
                expected.emplace_back(edge_key(idx), sampler_.quantize(e.weight));
            }
        }
        if (g_.ambient() > 0.0 && !inactive_.empty()) {
            expected.emplace_back(kGlobalKey,
                                  sampler_.quantize(g_.ambient() * static_cast<double>(inactive_.size())));
        }
        auto actual = sampler_.live_events();
        std::sort(expected.begin(), expected.end());
        std::sort(actual.begin(), actual.end());
        if (expected != actual) throw std::logic_error("engine audit: live event set diverged");
    }

    const CnpGraph& g_;
    ShardSampler sampler_;
    std::vector<char> active_;
    std::vector<double> open_since_;
    std::vector<std::uint32_t> inactive_pos_;
    std::vector<NodeId> inactive_;
    Trace trace_;
};

}  // namespace detail

/// Event-driven continuous-time simulation over horizon T. Seeds are active
/// at time zero; each step draws the time to the next event from the total
/// live rate and picks the firing event proportionally to its rate. Pass
/// audit_every > 0 to re-derive the live-event set from scratch every k
/// events (debug mode; throws std::logic_error on divergence).
inline Trace simulate_event_driven(const CnpGraph& g, const SeedSet& seeds, double T,
                                   std::mt19937_64& gen, EngineStats* stats = nullptr,
                                   std::uint64_t audit_every = 0, int sampler_precision = 20) {
    detail::check_horizon(T);
    const SeedSet norm = detail::normalize_seeds(seeds, g.num_nodes());
    detail::EventDrivenRun run(g, sampler_precision);
    return run.run(norm, T, gen, stats, audit_every);
}

/// Samples one possible world: every edge gets a Poisson activation schedule
/// at its rate, every node a deactivation schedule, and, when the graph has
/// global influence, every node an independent ambient schedule.
inline PossibleWorld sample_world(const CnpGraph& g, double T, std::mt19937_64& gen) {
    detail::check_horizon(T);
    const auto poisson_schedule = [&](double rate) {
        std::vector<double> times;
        if (rate > 0.0) {
            for (double t = exp_sample(gen, rate); t <= T; t += exp_sample(gen, rate)) {
                times.push_back(t);
            }
        }
        return times;
    };
    PossibleWorld w;
    w.horizon = T;
    w.edge_schedules.reserve(g.num_edges());
    for (const auto& e : g.edges()) w.edge_schedules.push_back(poisson_schedule(e.weight));
    w.deact_schedules.reserve(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) w.deact_schedules.push_back(poisson_schedule(g.node_weight(u)));
    if (g.ambient() > 0.0) {
        w.ambient_schedules.reserve(g.num_nodes());
        for (NodeId u = 0; u < g.num_nodes(); ++u) w.ambient_schedules.push_back(poisson_schedule(g.ambient()));
    } else {
        w.ambient_schedules.assign(g.num_nodes(), {});
    }
    return w;
}

/// Deterministic propagation under a fixed world: schedule timestamps are
/// replayed in time order; an edge timestamp activates the target if the
/// source is active and the target is not, an ambient timestamp activates an
/// inactive target, and a deactivation timestamp deactivates an active node.
/// Equal timestamps apply activations before deactivations, then by id.
inline Trace simulate_possible_world(const CnpGraph& g, const PossibleWorld& w, const SeedSet& seeds,
                                     double T) {
    detail::check_horizon(T);
    if (w.edge_schedules.size() != g.num_edges() || w.deact_schedules.size() != g.num_nodes()) {
        throw std::invalid_argument("possible world does not match graph");
    }
    const SeedSet norm = detail::normalize_seeds(seeds, g.num_nodes());

    enum Kind : std::uint8_t { kEdge = 0, kAmbient = 1, kDeact = 2 };
    struct Ev {
        double t;
        std::uint8_t kind;
        std::uint32_t id;
    };
    std::vector<Ev> events;
    std::size_t total = 0;
    for (const auto& s : w.edge_schedules) total += s.size();
    for (const auto& s : w.deact_schedules) total += s.size();
    for (const auto& s : w.ambient_schedules) total += s.size();
    events.reserve(total);
    const auto add_schedule = [&](const std::vector<double>& times, Kind kind, std::uint32_t id) {
        for (double t : times) {
            if (t > T) throw std::invalid_argument("possible world: schedule timestamp beyond horizon");
            events.push_back({t, kind, id});
        }
    };
    for (std::uint32_t idx = 0; idx < w.edge_schedules.size(); ++idx) {
        add_schedule(w.edge_schedules[idx], kEdge, idx);
    }
    for (std::uint32_t u = 0; u < w.ambient_schedules.size(); ++u) {
        add_schedule(w.ambient_schedules[u], kAmbient, u);
    }
    for (std::uint32_t u = 0; u < w.deact_schedules.size(); ++u) {
        add_schedule(w.deact_schedules[u], kDeact, u);
    }
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.id < b.id;
    });

    Trace trace;
    trace.horizon = T;
    trace.intervals.resize(g.num_nodes());
    std::vector<char> active(g.num_nodes(), false);
    std::vector<double> open_since(g.num_nodes(), 0.0);
    for (NodeId s : norm) {
        active[s] = true;
        open_since[s] = 0.0;
    }
    const auto activate = [&](NodeId v, double t) {
        active[v] = true;
        open_since[v] = t;
    };
    for (const Ev& ev : events) {
        switch (ev.kind) {
            case kEdge: {
                const auto& e = g.edge(ev.id);
                if (active[e.src] && !active[e.dst]) activate(e.dst, ev.t);
                break;
            }
            case kAmbient:
                if (!active[ev.id]) activate(ev.id, ev.t);
                break;
            case kDeact:
                if (active[ev.id]) {
                    active[ev.id] = false;
                    if (open_since[ev.id] < ev.t) {
                        trace.intervals[ev.id].push_back({open_since[ev.id], ev.t});
                    }
                }
                break;
        }
    }
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        if (active[u] && open_since[u] < T) trace.intervals[u].push_back({open_since[u], T});
    }
    return trace;
}

}  // namespace npinf
