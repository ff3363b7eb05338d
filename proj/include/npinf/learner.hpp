#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "npinf/graph.hpp"
#include "npinf/trace.hpp"

namespace npinf {

/// Timestamped user actions with dense user ids. `users` maps each dense id
/// back to its external id; per-user action lists are sorted and duplicate
/// timestamps are collapsed.
struct ActionLog {
    std::vector<std::string> users;
    std::vector<std::vector<double>> actions;

    NodeId num_users() const { return static_cast<NodeId>(users.size()); }
};

/// Active intervals of one user within the observation period, plus the
/// number of observed deactivations (timer expiries).
struct UserTimeline {
    std::vector<Interval> intervals;
    std::uint32_t deactivations = 0;

    double active_time() const {
        double total = 0.0;
        for (const Interval& iv : intervals) total += iv.end - iv.start;
        return total;
    }

    /// Whether the user was active immediately before time t.
    bool covers_before(double t) const {
        for (const Interval& iv : intervals) {
            if (iv.start < t && t <= iv.end) return true;
            if (iv.start >= t) break;
        }
        return false;
    }
};

namespace detail {

inline void sort_and_collapse(std::vector<double>& times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
}

}  // namespace detail

/// Builds an ActionLog from raw (external id, timestamp) records. Dense ids
/// are assigned in lexicographic order of the external ids; `extra_ids`
/// reserves ids for users that appear in the social graph but not in the
/// log, so both share one id space.
inline ActionLog build_action_log(const std::vector<std::pair<std::string, double>>& records,
                                  const std::vector<std::string>& extra_ids = {}) {
    ActionLog log;
    log.users.reserve(records.size() + extra_ids.size());
    for (const auto& [user, t] : records) {
        if (!std::isfinite(t)) throw io_error("action log: non-finite timestamp for user '" + user + "'");
        log.users.push_back(user);
    }
    log.users.insert(log.users.end(), extra_ids.begin(), extra_ids.end());
    std::sort(log.users.begin(), log.users.end());
    log.users.erase(std::unique(log.users.begin(), log.users.end()), log.users.end());
    log.actions.resize(log.users.size());
    for (const auto& [user, t] : records) {
        const auto it = std::lower_bound(log.users.begin(), log.users.end(), user);
        log.actions[static_cast<std::size_t>(it - log.users.begin())].push_back(t);
    }
    for (auto& times : log.actions) detail::sort_and_collapse(times);
    return log;
}

/// Reads `user_id,timestamp` CSV (header line optional).
inline ActionLog load_action_log(const std::string& path, const std::vector<std::string>& extra_ids = {}) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open file");
    std::vector<std::pair<std::string, double>> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) detail::fail_line(path, lineno, "expected 'user,timestamp'");
        const std::string user = line.substr(0, comma);
        const std::string ts = line.substr(comma + 1);
        double t = 0.0;
        if (!detail::parse_double(ts, t)) {
            if (lineno == 1) continue;  // header row
            detail::fail_line(path, lineno, "bad timestamp '" + ts + "'");
        }
        if (user.empty()) detail::fail_line(path, lineno, "empty user id");
        records.emplace_back(user, t);
    }
    return build_action_log(records, extra_ids);
}

/// Mean gap between consecutive actions of the same user, pooled over all
/// users, ignoring gaps of one day or less (multiple actions in a single
/// session would otherwise bias the mean downward).
inline double compute_window(const ActionLog& log) {
    double sum = 0.0;
    std::uint64_t count = 0;
    for (const auto& times : log.actions) {
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double gap = times[i] - times[i - 1];
            if (gap > 1.0) {
                sum += gap;
                ++count;
            }
        }
    }
    if (count == 0) throw io_error("compute_window: no action gaps longer than one day");
    return sum / static_cast<double>(count);
}

/// Timer rule: each action (re)starts a timer of length `window`; the user
/// is active from an action until the timer expires or the next action
/// arrives first. A timer expiring before `observation_end` is a
/// deactivation; a timer still running at the cutoff censors the interval
/// (clipped, not counted as a deactivation). Actions at or after the cutoff
/// are ignored.
inline std::vector<UserTimeline> derive_timelines(const ActionLog& log, double window,
                                                  double observation_end) {
    if (!std::isfinite(window) || window <= 0.0) {
        throw std::invalid_argument("derive_timelines: window must be positive and finite");
    }
    std::vector<UserTimeline> out(log.actions.size());
    for (std::size_t u = 0; u < log.actions.size(); ++u) {
        const auto& times = log.actions[u];
        UserTimeline& tl = out[u];
        std::size_t i = 0;
        while (i < times.size() && times[i] < observation_end) {
            const double start = times[i];
            double last = start;
            ++i;
            while (i < times.size() && times[i] < observation_end && times[i] - last <= window) {
                last = times[i];
                ++i;
            }
            const double expiry = last + window;
            if (expiry < observation_end) {
                tl.intervals.push_back({start, expiry});
                ++tl.deactivations;
            } else {
                tl.intervals.push_back({start, observation_end});
            }
        }
    }
    return out;
}

/// Credit assignment for the activation instants of all users: each
/// activation splits one unit of score equally among the in-neighbors active
/// just before it, or credits the global influencer when there are none.
struct Attribution {
    std::vector<double> edge_scores;                // by topology edge index
    double global_score = 0.0;                      // integer-valued by construction
    std::vector<std::uint32_t> activation_counts;   // per node
    std::uint64_t total_activations = 0;

    struct Instant {
        NodeId node;
        double time;
        std::uint32_t active_neighbors;
    };
    std::vector<Instant> instants;
};

/// `topology` supplies the directed edges; its weights are ignored. A
/// neighbor counts as active at an activation instant t when its timeline
/// covers t from the left, so a node never contributes to its own
/// simultaneous activation.
inline Attribution attribute_activations(const std::vector<UserTimeline>& timelines,
                                         const CnpGraph& topology) {
    if (timelines.size() != topology.num_nodes()) {
        throw std::invalid_argument("attribute_activations: timeline count does not match topology");
    }
    Attribution attr;
    attr.edge_scores.assign(topology.num_edges(), 0.0);
    attr.activation_counts.assign(topology.num_nodes(), 0);
    std::vector<std::uint32_t> credited;
    for (NodeId v = 0; v < topology.num_nodes(); ++v) {
        for (const Interval& iv : timelines[v].intervals) {
            const double t = iv.start;
            ++attr.activation_counts[v];
            ++attr.total_activations;
            credited.clear();
            for (std::uint32_t idx : topology.in_edges(v)) {
                if (timelines[topology.edge(idx).src].covers_before(t)) credited.push_back(idx);
            }
            const auto k = static_cast<std::uint32_t>(credited.size());
            if (k == 0) {
                attr.global_score += 1.0;
            } else {
                const double share = 1.0 / static_cast<double>(k);
                for (std::uint32_t idx : credited) attr.edge_scores[idx] += share;
            }
            attr.instants.push_back({v, t, k});
        }
    }
    return attr;
}

struct LearnedRates {
    std::vector<double> gamma_minus;  // per node
    std::vector<double> gamma_plus;   // per topology edge index
    double global_rate = 0.0;
};

/// Deactivation rate = deactivations / active time; edge activation rate =
/// accumulated contribution score / active time of the source; global rate =
/// unattributed score / (horizon x node count). Nodes with no observed
/// active time get zero rates here (see apply_default_rate).
inline LearnedRates learn_rates(const std::vector<UserTimeline>& timelines, const CnpGraph& topology,
                                double horizon) {
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw std::invalid_argument("learn_rates: horizon must be positive and finite");
    }
    const Attribution attr = attribute_activations(timelines, topology);
    LearnedRates rates;
    rates.gamma_minus.assign(topology.num_nodes(), 0.0);
    rates.gamma_plus.assign(topology.num_edges(), 0.0);
    for (NodeId u = 0; u < topology.num_nodes(); ++u) {
        const double at = timelines[u].active_time();
        if (at > 0.0) rates.gamma_minus[u] = timelines[u].deactivations / at;
    }
    for (std::uint32_t idx = 0; idx < topology.num_edges(); ++idx) {
        if (attr.edge_scores[idx] == 0.0) continue;
        const double at = timelines[topology.edge(idx).src].active_time();
        rates.gamma_plus[idx] = attr.edge_scores[idx] / at;
    }
    rates.global_rate = attr.global_score / (horizon * static_cast<double>(topology.num_nodes()));
    return rates;
}

/// Independent-cascade style edge probability: accumulated contribution
/// score / number of activations of the source (zero when the source never
/// activates).
inline std::vector<double> learn_ic_weights(const std::vector<UserTimeline>& timelines,
                                            const CnpGraph& topology) {
    const Attribution attr = attribute_activations(timelines, topology);
    std::vector<double> probs(topology.num_edges(), 0.0);
    for (std::uint32_t idx = 0; idx < topology.num_edges(); ++idx) {
        const std::uint32_t acts = attr.activation_counts[topology.edge(idx).src];
        if (acts != 0) probs[idx] = attr.edge_scores[idx] / static_cast<double>(acts);
    }
    return probs;
}

/// Nearest-rank percentile of the distinct values in `rates`.
inline double default_rate(std::vector<double> rates, double percentile) {
    if (rates.empty()) throw std::invalid_argument("default_rate: empty rate multiset");
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
        throw std::invalid_argument("default_rate: percentile must be in [0, 100]");
    }
    std::sort(rates.begin(), rates.end());
    rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
    const auto n = static_cast<double>(rates.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * n));
    if (rank < 1) rank = 1;
    if (rank > rates.size()) rank = rates.size();
    return rates[rank - 1];
}

/// Overwrites the deactivation rate of every node with zero observed active
/// time (typically nodes absent from the training data).
inline void apply_default_rate(std::vector<double>& gamma_minus,
                               const std::vector<UserTimeline>& timelines, double rate) {
    for (std::size_t u = 0; u < gamma_minus.size(); ++u) {
        if (timelines[u].active_time() == 0.0) gamma_minus[u] = rate;
    }
}

/// Users active just before `t` (the seed set for simulations starting at
/// the end of the training period).
inline SeedSet seeds_active_at(const std::vector<UserTimeline>& timelines, double t) {
    SeedSet seeds;
    for (std::size_t u = 0; u < timelines.size(); ++u) {
        if (timelines[u].covers_before(t)) seeds.push_back(static_cast<NodeId>(u));
    }
    return seeds;
}

/// Total active time of all users inside [test_start, test_end), with
/// timelines derived from the full log so activity straddling the boundary
/// counts.
inline double ground_truth_spread(const ActionLog& log, double window, double test_start,
                                  double test_end) {
    if (!(test_start < test_end)) {
        throw std::invalid_argument("ground_truth_spread: test window must be non-empty");
    }
    const auto timelines = derive_timelines(log, window, test_end);
    double total = 0.0;
    for (const auto& tl : timelines) {
        for (const Interval& iv : tl.intervals) {
            const double lo = std::max(iv.start, test_start);
            const double hi = std::min(iv.end, test_end);
            if (hi > lo) total += hi - lo;
        }
    }
    return total;
}

}  // namespace npinf
