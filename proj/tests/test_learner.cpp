#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "npinf/graph.hpp"
#include "npinf/learner.hpp"
#include "npinf/rng.hpp"
#include "support/oracle_learner.hpp"
#include "support/tmpdir.hpp"

using namespace npinf;

namespace {

ActionLog single_user_log(std::vector<double> times) {
    ActionLog log;
    log.users = {"u"};
    detail::sort_and_collapse(times);
    log.actions = {std::move(times)};
    return log;
}

}  // namespace

TEST_CASE("window is the mean of gaps above one day") {
    const ActionLog log = single_user_log({0.0, 0.5, 3.0, 10.0});
    // gaps 0.5, 2.5, 7; the sub-day gap is dropped
    CHECK(compute_window(log) == (2.5 + 7.0) / 2.0);
}

TEST_CASE("window requires at least one qualifying gap") {
    ActionLog log;
    log.users = {"a", "b"};
    log.actions = {{1.0}, {5.0}};
    CHECK_THROWS_AS(compute_window(log), io_error);
    const ActionLog dense = single_user_log({0.0, 0.2, 0.4, 1.0});
    CHECK_THROWS_AS(compute_window(dense), io_error);
}

TEST_CASE("timer rule timeline fixture") {
    const ActionLog log = single_user_log({1.2, 1.4, 21.3, 81.0});
    const auto timelines = derive_timelines(log, 20.0, 120.0);
    REQUIRE(timelines.size() == 1);
    const UserTimeline& tl = timelines[0];
    REQUIRE(tl.intervals.size() == 2);
    CHECK(tl.intervals[0].start == 1.2);
    CHECK(tl.intervals[0].end == 21.3 + 20.0);
    CHECK(tl.intervals[1].start == 81.0);
    CHECK(tl.intervals[1].end == 101.0);
    CHECK(tl.deactivations == 2);
}

TEST_CASE("empty timeline for users without actions") {
    ActionLog log;
    log.users = {"quiet"};
    log.actions = {{}};
    const auto timelines = derive_timelines(log, 20.0, 100.0);
    CHECK(timelines[0].intervals.empty());
    CHECK(timelines[0].deactivations == 0);
    CHECK(timelines[0].active_time() == 0.0);
}

TEST_CASE("unexpired timers censor instead of deactivating") {
    const double end = 100.0;
    const ActionLog log = single_user_log({end - 0.5});
    const auto timelines = derive_timelines(log, 20.0, end);
    REQUIRE(timelines[0].intervals.size() == 1);
    CHECK(timelines[0].intervals[0] == Interval{end - 0.5, end});
    CHECK(timelines[0].deactivations == 0);

    // expiry exactly at the cutoff is also censored
    const ActionLog boundary = single_user_log({end - 20.0});
    const auto tl2 = derive_timelines(boundary, 20.0, end);
    CHECK(tl2[0].intervals[0] == Interval{end - 20.0, end});
    CHECK(tl2[0].deactivations == 0);
}

TEST_CASE("gaps exactly equal to the window still merge") {
    const ActionLog log = single_user_log({0.0, 20.0});
    const auto timelines = derive_timelines(log, 20.0, 100.0);
    REQUIRE(timelines[0].intervals.size() == 1);
    CHECK(timelines[0].intervals[0] == Interval{0.0, 40.0});
    CHECK(timelines[0].deactivations == 1);
}

TEST_CASE("actions at or after the cutoff are ignored") {
    const ActionLog log = single_user_log({5.0, 100.0, 130.0});
    const auto timelines = derive_timelines(log, 10.0, 100.0);
    REQUIRE(timelines[0].intervals.size() == 1);
    CHECK(timelines[0].intervals[0] == Interval{5.0, 15.0});
}

TEST_CASE("deactivation rate from a hand-built timeline") {
    std::vector<UserTimeline> timelines(1);
    timelines[0].intervals = {{0.0, 4.0}, {6.0, 12.0}};
    timelines[0].deactivations = 2;
    const CnpGraph topo(1, {}, {0.0}, 0.0);
    const LearnedRates rates = learn_rates(timelines, topo, 12.0);
    CHECK(rates.gamma_minus[0] == 0.2);
}

TEST_CASE("activation credit splits over active in-neighbors") {
    // a and b are active when v activates at t=2; each edge gets half a
    // unit, and the activations of a and b themselves credit the global
    // influencer.
    std::vector<UserTimeline> timelines(3);
    timelines[0].intervals = {{0.0, 5.0}};  // a
    timelines[1].intervals = {{0.0, 5.0}};  // b
    timelines[2].intervals = {{2.0, 4.0}};  // v
    const CnpGraph topo(3, {{0, 2, 1.0}, {1, 2, 1.0}}, {0.0, 0.0, 0.0}, 0.0);
    const Attribution attr = attribute_activations(timelines, topo);
    CHECK(attr.edge_scores[0] == 0.5);
    CHECK(attr.edge_scores[1] == 0.5);
    CHECK(attr.global_score == 2.0);
    CHECK(attr.total_activations == 3);

    const LearnedRates rates = learn_rates(timelines, topo, 10.0);
    CHECK(rates.gamma_plus[0] == 0.5 / 5.0);
    CHECK(rates.global_rate == 2.0 / (10.0 * 3.0));
}

TEST_CASE("a neighbor activating at the same instant gets no credit") {
    std::vector<UserTimeline> timelines(2);
    timelines[0].intervals = {{2.0, 5.0}};
    timelines[1].intervals = {{2.0, 6.0}};
    const CnpGraph topo(2, {{0, 1, 1.0}}, {0.0, 0.0}, 0.0);
    const Attribution attr = attribute_activations(timelines, topo);
    CHECK(attr.edge_scores[0] == 0.0);
    CHECK(attr.global_score == 2.0);
}

TEST_CASE("a neighbor whose interval ends exactly at the instant gets credit") {
    std::vector<UserTimeline> timelines(2);
    timelines[0].intervals = {{0.0, 2.0}};
    timelines[1].intervals = {{2.0, 6.0}};
    const CnpGraph topo(2, {{0, 1, 1.0}}, {0.0, 0.0}, 0.0);
    const Attribution attr = attribute_activations(timelines, topo);
    CHECK(attr.edge_scores[0] == 1.0);
}

TEST_CASE("contribution scores balance activation counts structurally") {
    std::mt19937_64 gen(splitmix64(2024));
    for (int trial = 0; trial < 10; ++trial) {
        const NodeId n = 12;
        std::vector<GraphEdge<double>> edges;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                if (u != v && uniform01(gen) < 0.25) edges.push_back({u, v, 1.0});
            }
        }
        const CnpGraph topo(n, edges, std::vector<double>(n, 0.0), 0.0);
        ActionLog log;
        for (NodeId u = 0; u < n; ++u) {
            log.users.push_back(std::to_string(u));
            std::vector<double> times;
            const auto count = uniform_index(gen, 8);
            for (std::uint64_t i = 0; i < count; ++i) times.push_back(uniform_real(gen, 0.0, 90.0));
            detail::sort_and_collapse(times);
            log.actions.push_back(times);
        }
        const auto timelines = derive_timelines(log, 7.0, 100.0);
        const Attribution attr = attribute_activations(timelines, topo);

        std::uint64_t expected_instants = 0;
        for (const auto& tl : timelines) expected_instants += tl.intervals.size();
        REQUIRE(attr.total_activations == expected_instants);
        REQUIRE(attr.instants.size() == expected_instants);

        // every instant distributes exactly one unit: k equal shares of
        // 1/k, or one unit to the global influencer
        std::uint64_t zero_k = 0;
        for (const auto& inst : attr.instants) {
            if (inst.active_neighbors == 0) ++zero_k;
        }
        REQUIRE(attr.global_score == static_cast<double>(zero_k));
        std::uint32_t count_sum = 0;
        for (auto c : attr.activation_counts) count_sum += c;
        REQUIRE(count_sum == expected_instants);
    }
}

TEST_CASE("learned rates equal the brute-force recomputation exactly") {
    std::mt19937_64 gen(splitmix64(3033));
    for (int trial = 0; trial < 8; ++trial) {
        const NodeId n = 10;
        std::vector<GraphEdge<double>> edges;
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                if (u != v && uniform01(gen) < 0.3) edges.push_back({u, v, 1.0});
            }
        }
        const CnpGraph topo(n, edges, std::vector<double>(n, 0.0), 0.0);
        ActionLog log;
        for (NodeId u = 0; u < n; ++u) {
            log.users.push_back(std::to_string(u));
            std::vector<double> times;
            const auto count = 1 + uniform_index(gen, 10);
            for (std::uint64_t i = 0; i < count; ++i) times.push_back(uniform_real(gen, 0.0, 60.0));
            detail::sort_and_collapse(times);
            log.actions.push_back(times);
        }
        const double window = 6.0, horizon = 70.0;
        const auto timelines = derive_timelines(log, window, horizon);
        const LearnedRates rates = learn_rates(timelines, topo, horizon);
        const auto ic = learn_ic_weights(timelines, topo);
        const auto oracle = teststat::oracle_learn(timelines, topo, horizon);
        for (NodeId u = 0; u < n; ++u) REQUIRE(rates.gamma_minus[u] == oracle.gamma_minus[u]);
        for (std::size_t e = 0; e < topo.num_edges(); ++e) {
            REQUIRE(rates.gamma_plus[e] == oracle.gamma_plus[e]);
            REQUIRE(ic[e] == oracle.ic_weights[e]);
        }
        REQUIRE(rates.global_rate == oracle.global_rate);
    }
}

TEST_CASE("nearest-rank percentile") {
    CHECK(default_rate({0.1, 0.2, 0.3}, 50.0) == 0.2);
    CHECK(default_rate({0.1, 0.2, 0.3}, 0.0) == 0.1);
    CHECK(default_rate({0.1, 0.2, 0.3}, 100.0) == 0.3);
    CHECK(default_rate({0.2, 0.1, 0.1}, 50.0) == 0.1);  // distinct values {0.1, 0.2}
    CHECK_THROWS_AS(default_rate({}, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(default_rate({0.1}, 120.0), std::invalid_argument);
}

TEST_CASE("default rate applies only to silent nodes") {
    std::vector<UserTimeline> timelines(3);
    timelines[1].intervals = {{0.0, 10.0}};  // active, zero deactivations
    timelines[2].intervals = {{0.0, 5.0}};
    timelines[2].deactivations = 1;
    std::vector<double> gamma_minus{0.0, 0.0, 0.2};
    apply_default_rate(gamma_minus, timelines, 0.07);
    CHECK(gamma_minus[0] == 0.07);  // silent node gets the default
    CHECK(gamma_minus[1] == 0.0);   // censored active node keeps zero
    CHECK(gamma_minus[2] == 0.2);
}

TEST_CASE("ic weight of a never-activating source is zero") {
    std::vector<UserTimeline> timelines(2);
    timelines[1].intervals = {{1.0, 2.0}};
    const CnpGraph topo(2, {{0, 1, 1.0}}, {0.0, 0.0}, 0.0);
    const auto ic = learn_ic_weights(timelines, topo);
    CHECK(ic[0] == 0.0);
}

TEST_CASE("ic weight counts activations of the source") {
    // u activates four times and contributes one full unit toward v
    std::vector<UserTimeline> timelines(2);
    timelines[0].intervals = {{0.0, 1.0}, {2.0, 3.0}, {4.0, 5.0}, {6.0, 10.0}};
    timelines[1].intervals = {{7.0, 9.0}};
    const CnpGraph topo(2, {{0, 1, 1.0}}, {0.0, 0.0}, 0.0);
    const auto ic = learn_ic_weights(timelines, topo);
    CHECK(ic[0] == 0.25);
}

TEST_CASE("ground truth spread clips to the test window") {
    ActionLog log = single_user_log({1.2, 1.4, 21.3});
    CHECK(ground_truth_spread(log, 20.0, 20.0, 50.0) == Catch::Approx(21.3).epsilon(1e-12));

    ActionLog empty;
    empty.users = {"x"};
    empty.actions = {{}};
    CHECK(ground_truth_spread(empty, 20.0, 0.0, 10.0) == 0.0);
    CHECK_THROWS_AS(ground_truth_spread(empty, 20.0, 10.0, 10.0), std::invalid_argument);
}

TEST_CASE("seed extraction takes users active at the boundary") {
    ActionLog log;
    log.users = {"a", "b", "c"};
    log.actions = {{95.0}, {10.0}, {}};
    const auto timelines = derive_timelines(log, 20.0, 100.0);
    const SeedSet seeds = seeds_active_at(timelines, 100.0);
    REQUIRE(seeds.size() == 1);
    CHECK(seeds[0] == 0);  // "a" censored at the cutoff counts as active
}

TEST_CASE("csv loading remaps to lexicographic dense ids") {
    teststat::TempDir tmp("npinf_learner");
    const auto path = tmp.file("log.csv",
                               "user,timestamp\n"
                               "zed,3.5\n"
                               "alice,1.0\n"
                               "alice,1.0\n"
                               "mid,2.25\n");
    const ActionLog log = load_action_log(path, {"bob"});
    REQUIRE(log.users == std::vector<std::string>{"alice", "bob", "mid", "zed"});
    CHECK(log.actions[0] == std::vector<double>{1.0});  // duplicates collapsed
    CHECK(log.actions[1].empty());
    CHECK(log.actions[3] == std::vector<double>{3.5});
}

TEST_CASE("csv loading reports bad rows") {
    teststat::TempDir tmp("npinf_learner_bad");
    const auto path = tmp.file("log.csv", "a,1.0\nb,oops\n");
    CHECK_THROWS_WITH(load_action_log(path), Catch::Matchers::ContainsSubstring(":2:"));
    const auto nocomma = tmp.file("log2.csv", "a;1.0\n");
    CHECK_THROWS_AS(load_action_log(nocomma), io_error);
}
