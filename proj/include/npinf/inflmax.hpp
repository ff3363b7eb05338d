#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "npinf/engine_cnp.hpp"
#include "npinf/graph.hpp"
#include "npinf/parallel.hpp"
#include "npinf/rng.hpp"
#include "npinf/trace.hpp"

namespace npinf {

struct SpreadEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t runs = 0;
};

struct SeedSelection {
    std::vector<NodeId> seeds;
    std::vector<double> marginal_gains;
    double spread_mean = 0.0;
    double spread_std_err = 0.0;
    std::uint64_t runs = 0;
};

namespace detail {

inline SpreadEstimate summarize(const std::vector<double>& samples) {
    SpreadEstimate est;
    est.runs = samples.size();
    if (samples.empty()) return est;
    double sum = 0.0;
    for (double s : samples) sum += s;
    est.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double s : samples) ss += (s - est.mean) * (s - est.mean);
        const double variance = ss / static_cast<double>(samples.size() - 1);
        est.std_err = std::sqrt(variance / static_cast<double>(samples.size()));
    }
    return est;
}

}  // namespace detail

/// Monte Carlo estimate of the expected spread over `runs` independent
/// event-driven simulations. Run r uses the generator derived from
/// (master_seed, r), so results do not depend on `jobs`.
inline SpreadEstimate estimate_spread(const CnpGraph& g, const SeedSet& seeds, double T,
                                      std::uint64_t runs, std::uint64_t master_seed,
                                      unsigned jobs = 1) {
    if (runs == 0) throw std::invalid_argument("estimate_spread: need at least one run");
    std::vector<double> samples(runs);
    parallel_chunks(runs, jobs, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            auto gen = derive_rng(master_seed, r);
            samples[r] = spread(simulate_event_driven(g, seeds, T, gen));
        }
    });
    return detail::summarize(samples);
}

namespace detail {

inline std::vector<PossibleWorld> sample_worlds(const CnpGraph& g, double T, std::uint64_t count,
                                                std::uint64_t master_seed, std::uint64_t salt,
                                                unsigned jobs) {
    std::vector<PossibleWorld> worlds(count);
    parallel_chunks(count, jobs, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            auto gen = derive_rng(master_seed, salt + i);
            worlds[i] = sample_world(g, T, gen);
        }
    });
    return worlds;
}

inline std::vector<double> world_spreads(const CnpGraph& g, const std::vector<PossibleWorld>& worlds,
                                         const SeedSet& seeds, double T, unsigned jobs) {
    std::vector<double> out(worlds.size());
    parallel_chunks(worlds.size(), jobs, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            out[i] = spread(simulate_possible_world(g, worlds[i], seeds, T));
        }
    });
    return out;
}

inline double mean_of(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

}  // namespace detail

/// Exact average spread of a fixed seed set over fixed worlds.
inline double average_world_spread(const CnpGraph& g, const std::vector<PossibleWorld>& worlds,
                                   const SeedSet& seeds, double T, unsigned jobs = 1) {
    return detail::mean_of(detail::world_spreads(g, worlds, seeds, T, jobs));
}

/// Lazy greedy (CELF) seed selection. Marginal gains are evaluated against a
/// common set of pre-sampled worlds, which keeps the objective exactly
/// monotone and submodular during one pass, so a stale queue entry is a
/// valid upper bound and only the queue top needs re-evaluation. Ties break
/// toward the smaller node id. With fresh_worlds_per_round the worlds are
/// re-sampled before each selection (the bounds argument no longer applies,
/// so every candidate is re-evaluated that round).
inline SeedSelection greedy_celf(const CnpGraph& g, std::uint32_t k, double T,
                                 std::uint64_t n_worlds, std::uint64_t master_seed,
                                 bool fresh_worlds_per_round = false, unsigned jobs = 1) {
    if (k > g.num_nodes()) throw std::invalid_argument("greedy_celf: k exceeds node count");
    if (n_worlds == 0) throw std::invalid_argument("greedy_celf: need at least one world");

    std::vector<PossibleWorld> worlds = detail::sample_worlds(g, T, n_worlds, master_seed, 0, jobs);

    SeedSelection sel;
    SeedSet chosen;
    double current = detail::mean_of(detail::world_spreads(g, worlds, chosen, T, jobs));
    const auto gain_of = [&](NodeId v) {
        SeedSet with(chosen);
        with.push_back(v);
        return detail::mean_of(detail::world_spreads(g, worlds, with, T, jobs)) - current;
    };

    struct Entry {
        double gain;
        NodeId node;
        std::uint32_t round;
    };
    struct Worse {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.gain != b.gain) return a.gain < b.gain;
            return a.node > b.node;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Worse> queue;

    std::vector<double> initial_gains(g.num_nodes());
    parallel_chunks(g.num_nodes(), jobs, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t v = begin; v < end; ++v) {
            SeedSet with{static_cast<NodeId>(v)};
            initial_gains[v] =
                detail::mean_of(detail::world_spreads(g, worlds, with, T, 1)) - current;
        }
    });
    for (NodeId v = 0; v < g.num_nodes(); ++v) queue.push({initial_gains[v], v, 0});

    for (std::uint32_t round = 0; round < k; ++round) {
        if (fresh_worlds_per_round && round > 0) {
            worlds = detail::sample_worlds(g, T, n_worlds, master_seed, (round + 1) * n_worlds, jobs);
            current = detail::mean_of(detail::world_spreads(g, worlds, chosen, T, jobs));
            std::priority_queue<Entry, std::vector<Entry>, Worse> rebuilt;
            while (!queue.empty()) {
                const Entry e = queue.top();
                queue.pop();
                rebuilt.push({gain_of(e.node), e.node, round});
            }
            queue = std::move(rebuilt);
        }
        while (queue.top().round != round) {
            Entry e = queue.top();
            queue.pop();
            e.gain = gain_of(e.node);
            e.round = round;
            queue.push(e);
        }
        const Entry best = queue.top();
        queue.pop();
        chosen.push_back(best.node);
        current += best.gain;
        sel.seeds.push_back(best.node);
        sel.marginal_gains.push_back(best.gain);
    }

    const SpreadEstimate final_est = detail::summarize(detail::world_spreads(g, worlds, chosen, T, jobs));
    sel.spread_mean = final_est.mean;
    sel.spread_std_err = final_est.std_err;
    sel.runs = n_worlds;
    return sel;
}

/// Plain greedy with full re-evaluation every round, over the same derived
/// worlds as greedy_celf; reference for the lazy-evaluation equivalence.
inline SeedSelection greedy_naive(const CnpGraph& g, std::uint32_t k, double T,
                                  std::uint64_t n_worlds, std::uint64_t master_seed,
                                  unsigned jobs = 1) {
    if (k > g.num_nodes()) throw std::invalid_argument("greedy_naive: k exceeds node count");
    if (n_worlds == 0) throw std::invalid_argument("greedy_naive: need at least one world");
    const std::vector<PossibleWorld> worlds = detail::sample_worlds(g, T, n_worlds, master_seed, 0, jobs);

    SeedSelection sel;
    SeedSet chosen;
    std::vector<char> taken(g.num_nodes(), false);
    double current = detail::mean_of(detail::world_spreads(g, worlds, chosen, T, jobs));
    for (std::uint32_t round = 0; round < k; ++round) {
        double best_gain = -1.0;
        NodeId best_node = 0;
        bool found = false;
        for (NodeId v = 0; v < g.num_nodes(); ++v) {
            if (taken[v]) continue;
            SeedSet with(chosen);
            with.push_back(v);
            const double gain = detail::mean_of(detail::world_spreads(g, worlds, with, T, jobs)) - current;
            if (!found || gain > best_gain) {
                best_gain = gain;
                best_node = v;
                found = true;
            }
        }
        taken[best_node] = true;
        chosen.push_back(best_node);
        current += best_gain;
        sel.seeds.push_back(best_node);
        sel.marginal_gains.push_back(best_gain);
    }
    const SpreadEstimate final_est = detail::summarize(detail::world_spreads(g, worlds, chosen, T, jobs));
    sel.spread_mean = final_est.mean;
    sel.spread_std_err = final_est.std_err;
    sel.runs = n_worlds;
    return sel;
}

/// Exhaustive optimum over the given fixed worlds; the oracle for the greedy
/// approximation guarantee. Refuses instances with more than a million
/// k-subsets. Ties break toward the lexicographically smallest subset.
inline SeedSelection brute_force_opt(const CnpGraph& g, std::uint32_t k, double T,
                                     const std::vector<PossibleWorld>& worlds, unsigned jobs = 1) {
    const NodeId n = g.num_nodes();
    if (k > n) throw std::invalid_argument("brute_force_opt: k exceeds node count");
    double combos = 1.0;
    for (std::uint32_t i = 0; i < k; ++i) combos = combos * (n - i) / (i + 1);
    if (combos > 1e6) throw std::invalid_argument("brute_force_opt: too many subsets to enumerate");

    SeedSelection sel;
    SeedSet subset(k);
    for (std::uint32_t i = 0; i < k; ++i) subset[i] = i;
    double best = -1.0;
    bool found = false;
    while (true) {
        const double value = average_world_spread(g, worlds, subset, T, jobs);
        if (!found || value > best) {
            best = value;
            sel.seeds = subset;
            found = true;
        }
        if (k == 0) break;
        // next lexicographic k-combination of [0, n)
        std::int64_t pos = static_cast<std::int64_t>(k) - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] ==
                               n - k + static_cast<std::uint32_t>(pos)) {
            --pos;
        }
        if (pos < 0) break;
        ++subset[static_cast<std::size_t>(pos)];
        for (auto i = static_cast<std::size_t>(pos) + 1; i < k; ++i) subset[i] = subset[i - 1] + 1;
    }
    sel.spread_mean = best < 0.0 ? 0.0 : best;
    sel.runs = worlds.size();
    return sel;
}

}  // namespace npinf
