#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace npinf {

using NodeId = std::uint32_t;

/// Input-data failure (missing file, malformed line, invalid value read from
/// a file). Distinct from std::invalid_argument, which flags contract misuse.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    std::size_t used = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    return used == s.size();
}

inline bool parse_node_id(const std::string& s, NodeId& out) {
    if (s.empty() || s[0] == '-') return false;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        return false;
    }
    if (used != s.size() || v > 0xffffffffULL) return false;
    out = static_cast<NodeId>(v);
    return true;
}

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

[[noreturn]] inline void fail_line(const std::string& path, std::size_t lineno, const std::string& what) {
    throw io_error(path + ":" + std::to_string(lineno) + ": " + what);
}

}  // namespace detail

template <typename Weight>
struct GraphEdge {
    NodeId src;
    NodeId dst;
    Weight weight;
};

/// Immutable directed graph with one weight per edge, one weight per node,
/// and a scalar ambient weight. Edges are kept sorted by (src, dst); both
/// adjacency directions are queryable in time linear in degree. Safe to
/// share across concurrent simulation runs once constructed.
///
/// For the continuous-time model the weights are exponential rates (edge
/// activation, node deactivation, ambient activation per node). For the
/// discrete-time model they are per-step probabilities.
template <typename Weight, bool kProbability>
class BaseGraph {
public:
    using Edge = GraphEdge<Weight>;

    BaseGraph(NodeId n, std::vector<Edge> edges, std::vector<Weight> node_weights,
              Weight ambient, std::string unit_label = {})
        : n_(n),
          edges_(std::move(edges)),
          node_weights_(std::move(node_weights)),
          ambient_(ambient),
          unit_label_(std::move(unit_label)) {
        if (node_weights_.size() != n_) {
            throw std::invalid_argument("graph: node weight table size does not match node count");
        }
        check_weight(ambient_, "ambient weight");
        for (Weight w : node_weights_) check_weight(w, "node weight");
        for (const Edge& e : edges_) {
            if (e.src >= n_ || e.dst >= n_) throw std::invalid_argument("graph: edge endpoint out of range");
            check_weight(e.weight, "edge weight");
        }
        std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
            return a.src < b.src || (a.src == b.src && a.dst < b.dst);
        });
        for (std::size_t i = 1; i < edges_.size(); ++i) {
            if (edges_[i].src == edges_[i - 1].src && edges_[i].dst == edges_[i - 1].dst) {
                throw std::invalid_argument("graph: duplicate edge (" + std::to_string(edges_[i].src) + ", " +
                                            std::to_string(edges_[i].dst) + ")");
            }
        }
        build_adjacency();
    }

    NodeId num_nodes() const { return n_; }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t idx) const { return edges_[idx]; }
    Weight node_weight(NodeId u) const { return node_weights_[u]; }
    const std::vector<Weight>& node_weights() const { return node_weights_; }
    Weight ambient() const { return ambient_; }
    const std::string& unit_label() const { return unit_label_; }

    /// Edge indices leaving u, ordered by destination.
    std::span<const std::uint32_t> out_edges(NodeId u) const {
        return {out_index_.data() + out_begin_[u], out_begin_[u + 1] - out_begin_[u]};
    }

    /// Edge indices entering u, ordered by source.
    std::span<const std::uint32_t> in_edges(NodeId u) const {
        return {in_index_.data() + in_begin_[u], in_begin_[u + 1] - in_begin_[u]};
    }

private:
    static void check_weight(Weight w, const char* what) {
        if (!std::isfinite(w) || w < Weight{0}) {
            throw std::invalid_argument(std::string("graph: ") + what + " must be finite and non-negative");
        }
        if constexpr (kProbability) {
            if (w > Weight{1}) throw std::invalid_argument(std::string("graph: ") + what + " must be at most 1");
        }
    }

    void build_adjacency() {
        out_begin_.assign(n_ + 1, 0);
        in_begin_.assign(n_ + 1, 0);
        for (const Edge& e : edges_) {
            ++out_begin_[e.src + 1];
            ++in_begin_[e.dst + 1];
        }
        for (NodeId u = 0; u < n_; ++u) {
            out_begin_[u + 1] += out_begin_[u];
            in_begin_[u + 1] += in_begin_[u];
        }
        out_index_.resize(edges_.size());
        in_index_.resize(edges_.size());
        std::vector<std::size_t> out_fill(out_begin_.begin(), out_begin_.end() - 1);
        std::vector<std::size_t> in_fill(in_begin_.begin(), in_begin_.end() - 1);
        for (std::uint32_t idx = 0; idx < edges_.size(); ++idx) {
            out_index_[out_fill[edges_[idx].src]++] = idx;
            in_index_[in_fill[edges_[idx].dst]++] = idx;
        }
    }

    NodeId n_;
    std::vector<Edge> edges_;
    std::vector<Weight> node_weights_;
    Weight ambient_;
    std::string unit_label_;
    std::vector<std::size_t> out_begin_;
    std::vector<std::size_t> in_begin_;
    std::vector<std::uint32_t> out_index_;
    std::vector<std::uint32_t> in_index_;
};

/// Continuous-time graph: edge/node/ambient exponential rates.
using CnpGraph = BaseGraph<double, false>;
/// Discrete-time graph: per-step edge/node/ambient probabilities.
using DnpGraph = BaseGraph<double, true>;

/// Per-unit-step success probability of an exponential clock with the given
/// rate: the value of its CDF at one time unit.
inline double rate_to_probability(double rate) {
    return -std::expm1(-rate);
}

inline double probability_to_rate(double p) {
    if (p >= 1.0) throw std::invalid_argument("probability_to_rate: probability 1 has no finite rate");
    return -std::log1p(-p);
}

inline DnpGraph cnp_to_dnp(const CnpGraph& g) {
    std::vector<DnpGraph::Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto& e : g.edges()) edges.push_back({e.src, e.dst, rate_to_probability(e.weight)});
    std::vector<double> q(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) q[u] = rate_to_probability(g.node_weight(u));
    return DnpGraph(g.num_nodes(), std::move(edges), std::move(q), rate_to_probability(g.ambient()),
                    g.unit_label());
}

inline CnpGraph dnp_to_cnp(const DnpGraph& g) {
    std::vector<CnpGraph::Edge> edges;
    edges.reserve(g.num_edges());
    for (const auto& e : g.edges()) edges.push_back({e.src, e.dst, probability_to_rate(e.weight)});
    std::vector<double> rates(g.num_nodes());
    for (NodeId u = 0; u < g.num_nodes(); ++u) rates[u] = probability_to_rate(g.node_weight(u));
    return CnpGraph(g.num_nodes(), std::move(edges), std::move(rates), probability_to_rate(g.ambient()),
                    g.unit_label());
}

namespace detail {

struct ParsedGraphFiles {
    std::vector<GraphEdge<double>> edges;
    std::vector<std::pair<NodeId, double>> node_entries;
    NodeId max_id = 0;
    bool any_id = false;
    std::string unit_label;
};

inline void note_id(ParsedGraphFiles& acc, NodeId id) {
    acc.max_id = acc.any_id ? std::max(acc.max_id, id) : id;
    acc.any_id = true;
}

/// Lines are `src<TAB>dst<TAB>weight` (edge file) or `node<TAB>weight`
/// (node file); `#` starts a comment, `# unit=<label>` records the time
/// unit, blank lines are skipped.
inline void parse_graph_file(const std::string& path, bool edge_file, ParsedGraphFiles& acc) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open file");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string unit_prefix = "# unit=";
            if (acc.unit_label.empty() && line.rfind(unit_prefix, 0) == 0) {
                acc.unit_label = line.substr(unit_prefix.size());
            }
            continue;
        }
        const auto fields = split_tabs(line);
        const std::size_t expected = edge_file ? 3 : 2;
        if (fields.size() != expected) {
            fail_line(path, lineno, "expected " + std::to_string(expected) + " tab-separated fields");
        }
        NodeId a = 0;
        if (!parse_node_id(fields[0], a)) fail_line(path, lineno, "bad node id '" + fields[0] + "'");
        double w = 0.0;
        NodeId b = 0;
        if (edge_file) {
            if (!parse_node_id(fields[1], b)) fail_line(path, lineno, "bad node id '" + fields[1] + "'");
            if (!parse_double(fields[2], w)) fail_line(path, lineno, "bad weight '" + fields[2] + "'");
        } else {
            if (!parse_double(fields[1], w)) fail_line(path, lineno, "bad weight '" + fields[1] + "'");
        }
        if (!std::isfinite(w) || w < 0.0) fail_line(path, lineno, "weight must be finite and non-negative");
        note_id(acc, a);
        if (edge_file) {
            note_id(acc, b);
            acc.edges.push_back({a, b, w});
        } else {
            acc.node_entries.emplace_back(a, w);
        }
    }
}

template <typename Graph>
Graph load_graph(const std::string& edge_path, const std::string& node_path, double ambient) {
    ParsedGraphFiles acc;
    parse_graph_file(edge_path, true, acc);
    parse_graph_file(node_path, false, acc);
    const NodeId n = acc.any_id ? acc.max_id + 1 : 0;
    std::vector<double> node_weights(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& [id, w] : acc.node_entries) {
        if (seen[id]) throw io_error(node_path + ": duplicate entry for node " + std::to_string(id));
        seen[id] = true;
        node_weights[id] = w;
    }
    try {
        return Graph(n, std::move(acc.edges), std::move(node_weights), ambient, acc.unit_label);
    } catch (const std::invalid_argument& e) {
        throw io_error(edge_path + ": " + e.what());
    }
}

}  // namespace detail

/// Node count is one past the largest id seen in either file; nodes absent
/// from the node file get weight zero.
inline CnpGraph load_cnp_graph(const std::string& edge_path, const std::string& node_path,
                               double global_rate = 0.0) {
    return detail::load_graph<CnpGraph>(edge_path, node_path, global_rate);
}

inline DnpGraph load_dnp_graph(const std::string& edge_path, const std::string& node_path,
                               double ambient_probability = 0.0) {
    return detail::load_graph<DnpGraph>(edge_path, node_path, ambient_probability);
}

namespace detail {

inline std::string format_weight(double w) {
    std::ostringstream os;
    os.precision(17);
    os << w;
    return os.str();
}

template <typename Graph>
void save_graph(const Graph& g, const std::string& edge_path, const std::string& node_path) {
    std::ofstream ef(edge_path);
    if (!ef) throw io_error(edge_path + ": cannot open file for writing");
    if (!g.unit_label().empty()) ef << "# unit=" << g.unit_label() << "\n";
    for (const auto& e : g.edges()) {
        ef << e.src << '\t' << e.dst << '\t' << format_weight(e.weight) << '\n';
    }
    std::ofstream nf(node_path);
    if (!nf) throw io_error(node_path + ": cannot open file for writing");
    if (!g.unit_label().empty()) nf << "# unit=" << g.unit_label() << "\n";
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        nf << u << '\t' << format_weight(g.node_weight(u)) << '\n';
    }
}

}  // namespace detail

inline void save_cnp_graph(const CnpGraph& g, const std::string& edge_path, const std::string& node_path) {
    detail::save_graph(g, edge_path, node_path);
}

inline void save_dnp_graph(const DnpGraph& g, const std::string& edge_path, const std::string& node_path) {
    detail::save_graph(g, edge_path, node_path);
}

}  // namespace npinf
