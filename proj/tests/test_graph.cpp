#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "npinf/graph.hpp"
#include "npinf/rng.hpp"
#include "support/tmpdir.hpp"

using namespace npinf;
using TempDir = teststat::TempDir;

TEST_CASE("load a two node graph") {
    TempDir tmp("npinf_graph");
    const auto edges = tmp.file("e.tsv", "0\t1\t0.5\n");
    const auto nodes = tmp.file("n.tsv", "0\t0.1\n1\t0.1\n");
    const CnpGraph g = load_cnp_graph(edges, nodes, 0.0);
    CHECK(g.num_nodes() == 2);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.edge(0).src == 0);
    CHECK(g.edge(0).dst == 1);
    CHECK(g.edge(0).weight == 0.5);
    CHECK(g.node_weight(0) == 0.1);
    CHECK(g.ambient() == 0.0);
}

TEST_CASE("edgeless graph from node file only") {
    TempDir tmp("npinf_graph");
    const auto edges = tmp.file("e.tsv", "");
    const auto nodes = tmp.file("n.tsv", "0\t0.0\n1\t0.2\n2\t0.3\n");
    const CnpGraph g = load_cnp_graph(edges, nodes);
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("load failures carry line numbers") {
    TempDir tmp("npinf_graph");
    const auto nodes = tmp.file("n.tsv", "0\t0.1\n1\t0.1\n");

    const auto negative = tmp.file("neg.tsv", "0\t1\t-0.2\n");
    CHECK_THROWS_WITH(load_cnp_graph(negative, nodes), Catch::Matchers::ContainsSubstring(":1:"));

    const auto malformed = tmp.file("bad.tsv", "0\t1\t0.5\n0 1 0.5\n");
    CHECK_THROWS_WITH(load_cnp_graph(malformed, nodes), Catch::Matchers::ContainsSubstring(":2:"));

    const auto garbage = tmp.file("g.tsv", "0\t1\tpotato\n");
    CHECK_THROWS_AS(load_cnp_graph(garbage, nodes), io_error);

    CHECK_THROWS_AS(load_cnp_graph(tmp.at("missing.tsv"), nodes), io_error);
}

TEST_CASE("duplicate edges are rejected") {
    TempDir tmp("npinf_graph");
    const auto edges = tmp.file("e.tsv", "0\t1\t0.5\n0\t1\t0.25\n");
    const auto nodes = tmp.file("n.tsv", "0\t0.1\n");
    CHECK_THROWS_AS(load_cnp_graph(edges, nodes), io_error);
    CHECK_THROWS_AS(CnpGraph(2, {{0, 1, 0.5}, {0, 1, 0.25}}, {0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("duplicate node entries are rejected") {
    TempDir tmp("npinf_graph");
    const auto edges = tmp.file("e.tsv", "");
    const auto nodes = tmp.file("n.tsv", "0\t0.1\n0\t0.2\n");
    CHECK_THROWS_AS(load_cnp_graph(edges, nodes), io_error);
}

TEST_CASE("probability graphs reject weights above one") {
    CHECK_THROWS_AS(DnpGraph(2, {{0, 1, 1.5}}, {0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_NOTHROW(DnpGraph(2, {{0, 1, 1.0}}, {0.0, 0.0}, 0.0));
}

TEST_CASE("rate to probability mapping") {
    CHECK(rate_to_probability(0.0) == 0.0);
    CHECK(rate_to_probability(std::log(2.0)) == Catch::Approx(0.5).epsilon(1e-14));
    // small-rate value against an independent extended-precision evaluation
    const long double gamma = 0.001L;
    const long double expected = 1.0L - std::exp(-gamma);
    CHECK(rate_to_probability(0.001) ==
          Catch::Approx(static_cast<double>(expected)).epsilon(1e-13));
}

TEST_CASE("probability to rate mapping") {
    CHECK(probability_to_rate(0.0) == 0.0);
    CHECK(probability_to_rate(0.5) == Catch::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(probability_to_rate(1.0), std::invalid_argument);
}

TEST_CASE("rate mapping round-trips and is monotone") {
    std::mt19937_64 gen(splitmix64(99));
    double prev_rate = -1.0, prev_p = -1.0;
    for (int i = 0; i < 2000; ++i) {
        const double rate = uniform01(gen) * 10.0;
        const double p = rate_to_probability(rate);
        CHECK(p >= 0.0);
        CHECK(p < 1.0);
        const double back = probability_to_rate(p);
        CHECK(back == Catch::Approx(rate).epsilon(1e-12).margin(1e-15));
        if (rate > prev_rate && prev_rate >= 0.0) {
            // monotonicity spot check against the previous draw
            CHECK((p > prev_p || rate == prev_rate));
        }
        prev_rate = rate;
        prev_p = p;
    }
    for (double lo = 0.0; lo < 5.0; lo += 0.37) {
        CHECK(rate_to_probability(lo) < rate_to_probability(lo + 0.01));
    }
}

TEST_CASE("whole graph conversion round trip") {
    std::mt19937_64 gen(splitmix64(123));
    std::vector<GraphEdge<double>> edges;
    for (NodeId u = 0; u < 12; ++u) {
        for (NodeId v = 0; v < 12; ++v) {
            if (u != v && uniform01(gen) < 0.3) edges.push_back({u, v, uniform01(gen) * 4.0});
        }
    }
    std::vector<double> rates(12);
    for (auto& r : rates) r = uniform01(gen) * 2.0;
    const CnpGraph g(12, edges, rates, 0.05, "days");
    const CnpGraph back = dnp_to_cnp(cnp_to_dnp(g));
    REQUIRE(back.num_edges() == g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        CHECK(back.edge(i).weight == Catch::Approx(g.edge(i).weight).epsilon(1e-12));
    }
    for (NodeId u = 0; u < 12; ++u) {
        CHECK(back.node_weight(u) == Catch::Approx(g.node_weight(u)).epsilon(1e-12).margin(1e-15));
    }
    CHECK(back.ambient() == Catch::Approx(g.ambient()).epsilon(1e-12));
    CHECK(back.unit_label() == "days");
}

TEST_CASE("save and reload is the identity, with canonical edge order") {
    TempDir tmp("npinf_graph");
    std::mt19937_64 gen(splitmix64(321));
    std::vector<GraphEdge<double>> edges;
    for (int i = 0; i < 40; ++i) {
        const NodeId u = static_cast<NodeId>(uniform_index(gen, 15));
        const NodeId v = static_cast<NodeId>(uniform_index(gen, 15));
        bool dup = false;
        for (const auto& e : edges) dup |= (e.src == u && e.dst == v);
        if (!dup) edges.push_back({u, v, uniform01(gen)});
    }
    std::vector<double> rates(15);
    for (auto& r : rates) r = uniform01(gen);
    const CnpGraph g(15, edges, rates, 0.01, "days");

    const auto e1 = (tmp.path / "e1.tsv").string();
    const auto n1 = (tmp.path / "n1.tsv").string();
    save_cnp_graph(g, e1, n1);
    const CnpGraph g2 = load_cnp_graph(e1, n1, g.ambient());
    REQUIRE(g2.num_nodes() == g.num_nodes());
    REQUIRE(g2.num_edges() == g.num_edges());
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        CHECK(g2.edge(i).src == g.edge(i).src);
        CHECK(g2.edge(i).dst == g.edge(i).dst);
        CHECK(g2.edge(i).weight == g.edge(i).weight);
    }
    for (NodeId u = 0; u < g.num_nodes(); ++u) CHECK(g2.node_weight(u) == g.node_weight(u));
    CHECK(g2.unit_label() == "days");

    const auto e2 = (tmp.path / "e2.tsv").string();
    const auto n2 = (tmp.path / "n2.tsv").string();
    save_cnp_graph(g2, e2, n2);
    std::ifstream f1(e1), f2(e2);
    const std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(c1 == c2);
}

TEST_CASE("in and out adjacency are transposes") {
    std::mt19937_64 gen(splitmix64(777));
    std::vector<GraphEdge<double>> edges;
    for (NodeId u = 0; u < 20; ++u) {
        for (NodeId v = 0; v < 20; ++v) {
            if (u != v && uniform01(gen) < 0.2) edges.push_back({u, v, 1.0});
        }
    }
    const CnpGraph g(20, edges, std::vector<double>(20, 0.0), 0.0);
    std::size_t out_total = 0, in_total = 0;
    for (NodeId u = 0; u < 20; ++u) {
        for (std::uint32_t idx : g.out_edges(u)) {
            CHECK(g.edge(idx).src == u);
            const NodeId v = g.edge(idx).dst;
            bool found = false;
            for (std::uint32_t back : g.in_edges(v)) found |= (back == idx);
            CHECK(found);
            ++out_total;
        }
        for (std::uint32_t idx : g.in_edges(u)) {
            CHECK(g.edge(idx).dst == u);
            ++in_total;
        }
    }
    CHECK(out_total == g.num_edges());
    CHECK(in_total == g.num_edges());
}

TEST_CASE("comments and unit labels in graph files") {
    TempDir tmp("npinf_graph");
    const auto edges = tmp.file("e.tsv", "# unit=hours\n# a comment\n0\t1\t0.5\n");
    const auto nodes = tmp.file("n.tsv", "0\t0.1\n1\t0.0\n");
    const CnpGraph g = load_cnp_graph(edges, nodes);
    CHECK(g.unit_label() == "hours");
    CHECK(g.num_edges() == 1);
}
