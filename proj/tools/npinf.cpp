// npinf: non-progressive influence propagation toolkit.
//
// Subcommands: learn, estimate, maximize, simulate, synth, convert, bench.
// Every command is a pure function of (inputs, flags, seed); outputs are
// byte-identical across re-runs with a fixed seed regardless of --jobs.
// Timings live only in the run manifest written next to each output.
//
// Exit codes: 0 ok, 1 internal error, 2 input error, 3 contract violation.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "npinf/npinf.hpp"
#include "npinf/parallel.hpp"

namespace {

using json = nlohmann::json;
using namespace npinf;

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path + ": cannot open file");
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct Manifest {
    std::string command;
    json parameters = json::object();
    std::uint64_t master_seed = 0;
    std::vector<std::string> inputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void write(const std::string& path) const {
        json m;
        m["command"] = command;
        m["parameters"] = parameters;
        m["master_seed"] = master_seed;
        json digests = json::object();
        for (const auto& p : inputs) digests[p] = hex64(fnv1a64_file(p));
        m["input_digests"] = digests;
        m["tool_version"] = kVersion;
        const auto elapsed = std::chrono::steady_clock::now() - started;
        m["wall_time_ms"] = std::chrono::duration<double, std::milli>(elapsed).count();
        std::ofstream out(path);
        if (!out) throw io_error(path + ": cannot open file for writing");
        out << m.dump(2) << '\n';
    }
};

std::uint64_t resolve_seed(const std::string& spec) {
    if (spec == "random") return std::random_device{}();
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(spec, &used);
        if (used == spec.size()) return v;
    } catch (const std::exception&) {
    }
    throw io_error("--seed must be an unsigned integer or 'random'");
}

unsigned default_jobs() {
    if (const char* env = std::getenv("NPINF_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

SeedSet load_seed_file(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open file");
    SeedSet seeds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        NodeId id = 0;
        if (!detail::parse_node_id(line, id)) detail::fail_line(path, lineno, "bad node id '" + line + "'");
        if (id >= n) detail::fail_line(path, lineno, "seed id " + line + " out of range (graph has " +
                                                         std::to_string(n) + " nodes)");
        seeds.push_back(id);
    }
    return seeds;
}

void write_seed_file(const SeedSet& seeds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open file for writing");
    for (NodeId s : seeds) out << s << '\n';
}

CnpGraph with_zero_deactivation(const CnpGraph& g) {
    return CnpGraph(g.num_nodes(), g.edges(), std::vector<double>(g.num_nodes(), 0.0), g.ambient(),
                    g.unit_label());
}

std::uint32_t integral_steps(double T) {
    const double steps = std::floor(T);
    if (steps != T || steps < 1.0 || steps > 4e9) {
        throw io_error("discrete engine needs an integral horizon of at least 1 step");
    }
    return static_cast<std::uint32_t>(steps);
}

SpreadEstimate estimate_dnp(const DnpGraph& g, const SeedSet& seeds, std::uint32_t steps,
                            std::uint64_t runs, std::uint64_t master_seed, unsigned jobs) {
    std::vector<double> samples(runs);
    parallel_chunks(runs, jobs, [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            auto gen = derive_rng(master_seed, r);
            samples[r] = simulate_dnp(g, seeds, steps, gen).spread();
        }
    });
    return detail::summarize(samples);
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open file for writing");
    out << j.dump(2) << '\n';
}

void write_trace_tsv(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open file for writing");
    for (NodeId u = 0; u < trace.intervals.size(); ++u) {
        for (const Interval& iv : trace.intervals[u]) {
            out << u << '\t' << detail::format_weight(iv.start) << '\t' << detail::format_weight(iv.end)
                << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// learn

struct LearnArgs {
    std::string log_path;
    std::string topology_path;
    std::string out_prefix;
    std::string ic_out;
    std::string unit = "days";
    double time_scale = 1.0;
    double window = 0.0;  // 0 = compute from data
    double percentile = 50.0;
    double train_start = std::numeric_limits<double>::quiet_NaN();
    double train_end = std::numeric_limits<double>::quiet_NaN();
    double horizon = 0.0;  // 0 = training-period length
};

int run_learn(const LearnArgs& a, Manifest& manifest) {
    // Topology with external string ids; third column, when present, ignored.
    std::vector<std::pair<std::string, std::string>> raw_edges;
    std::vector<std::string> topo_ids;
    {
        std::ifstream in(a.topology_path);
        if (!in) throw io_error(a.topology_path + ": cannot open file");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto fields = detail::split_tabs(line);
            if (fields.size() != 2 && fields.size() != 3) {
                detail::fail_line(a.topology_path, lineno, "expected 'src<TAB>dst[<TAB>weight]'");
            }
            if (fields[0].empty() || fields[1].empty()) {
                detail::fail_line(a.topology_path, lineno, "empty node id");
            }
            raw_edges.emplace_back(fields[0], fields[1]);
            topo_ids.push_back(fields[0]);
            topo_ids.push_back(fields[1]);
        }
    }

    ActionLog log = load_action_log(a.log_path, topo_ids);
    if (a.time_scale != 1.0) {
        for (auto& times : log.actions) {
            for (double& t : times) t *= a.time_scale;
        }
    }
    if (log.users.empty()) throw io_error(a.log_path + ": no users in log or topology");

    const auto dense_id = [&](const std::string& name) {
        const auto it = std::lower_bound(log.users.begin(), log.users.end(), name);
        return static_cast<NodeId>(it - log.users.begin());
    };
    std::vector<GraphEdge<double>> edges;
    edges.reserve(raw_edges.size());
    for (const auto& [s, d] : raw_edges) edges.push_back({dense_id(s), dense_id(d), 1.0});
    const NodeId n = log.num_users();
    CnpGraph topology = [&] {
        try {
            return CnpGraph(n, std::move(edges), std::vector<double>(n, 0.0), 0.0);
        } catch (const std::invalid_argument& e) {
            throw io_error(a.topology_path + ": " + e.what());
        }
    }();

    double min_t = std::numeric_limits<double>::infinity();
    double max_t = -std::numeric_limits<double>::infinity();
    for (const auto& times : log.actions) {
        if (!times.empty()) {
            min_t = std::min(min_t, times.front());
            max_t = std::max(max_t, times.back());
        }
    }
    if (!std::isfinite(min_t)) throw io_error(a.log_path + ": log contains no actions");
    const double train_start = std::isnan(a.train_start) ? min_t : a.train_start;
    const double train_end = std::isnan(a.train_end) ? max_t : a.train_end;
    if (!(train_start < train_end)) throw io_error("training period is empty");

    for (auto& times : log.actions) {
        std::erase_if(times, [&](double t) { return t < train_start; });
    }

    const double window = a.window > 0.0 ? a.window : compute_window(log);
    const auto timelines = derive_timelines(log, window, train_end);
    const double horizon = a.horizon > 0.0 ? a.horizon : train_end - train_start;
    LearnedRates rates = learn_rates(timelines, topology, horizon);

    std::vector<double> nonzero;
    for (double r : rates.gamma_minus) {
        if (r > 0.0) nonzero.push_back(r);
    }
    std::optional<double> fallback;
    if (!nonzero.empty()) {
        fallback = default_rate(nonzero, a.percentile);
        apply_default_rate(rates.gamma_minus, timelines, *fallback);
    }

    std::vector<GraphEdge<double>> learned_edges;
    learned_edges.reserve(topology.num_edges());
    for (std::uint32_t idx = 0; idx < topology.num_edges(); ++idx) {
        const auto& e = topology.edge(idx);
        learned_edges.push_back({e.src, e.dst, rates.gamma_plus[idx]});
    }
    const CnpGraph learned(n, std::move(learned_edges), rates.gamma_minus, rates.global_rate, a.unit);
    save_cnp_graph(learned, a.out_prefix + "_edges.tsv", a.out_prefix + "_nodes.tsv");

    {
        std::ofstream out(a.out_prefix + "_id_map.tsv");
        if (!out) throw io_error(a.out_prefix + "_id_map.tsv: cannot open file for writing");
        for (NodeId u = 0; u < n; ++u) out << log.users[u] << '\t' << u << '\n';
    }
    write_seed_file(seeds_active_at(timelines, train_end), a.out_prefix + "_seeds.txt");

    if (!a.ic_out.empty()) {
        const auto ic = learn_ic_weights(timelines, topology);
        std::ofstream out(a.ic_out);
        if (!out) throw io_error(a.ic_out + ": cannot open file for writing");
        for (std::uint32_t idx = 0; idx < topology.num_edges(); ++idx) {
            const auto& e = topology.edge(idx);
            out << e.src << '\t' << e.dst << '\t' << detail::format_weight(ic[idx]) << '\n';
        }
    }

    json sidecar;
    sidecar["window"] = window;
    sidecar["global_rate"] = rates.global_rate;
    sidecar["default_rate"] = fallback ? json(*fallback) : json(nullptr);
    sidecar["percentile"] = a.percentile;
    sidecar["observation"] = {{"start", train_start}, {"end", train_end}};
    sidecar["horizon"] = horizon;
    sidecar["unit"] = a.unit;
    sidecar["nodes"] = n;
    sidecar["edges"] = topology.num_edges();
    write_json(sidecar, a.out_prefix + "_params.json");

    manifest.parameters["window"] = window;
    manifest.parameters["horizon"] = horizon;
    manifest.write(a.out_prefix + ".manifest.json");
    std::cout << "learned " << topology.num_edges() << " edge rates over " << n << " nodes; window "
              << window << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// estimate / simulate

struct GraphArgs {
    std::string edges_path;
    std::string nodes_path;
    std::string sidecar;
    double global_rate = 0.0;
};

double resolve_global_rate(const GraphArgs& g) {
    if (g.sidecar.empty()) return g.global_rate;
    std::ifstream in(g.sidecar);
    if (!in) throw io_error(g.sidecar + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error(g.sidecar + ": " + e.what());
    }
    if (!j.contains("global_rate")) throw io_error(g.sidecar + ": missing global_rate");
    return j["global_rate"].get<double>();
}

int run_estimate(const GraphArgs& ga, const std::string& seeds_path, const std::string& engine,
                 double T, std::uint64_t runs, std::uint64_t master_seed, unsigned jobs,
                 const std::string& out, Manifest& manifest) {
    SpreadEstimate est;
    json report;
    if (engine == "dnp") {
        const DnpGraph g = load_dnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        const SeedSet seeds = load_seed_file(seeds_path, g.num_nodes());
        est = estimate_dnp(g, seeds, integral_steps(T), runs, master_seed, jobs);
        report["nodes"] = g.num_nodes();
        report["seed_count"] = seeds.size();
    } else if (engine == "cnp" || engine == "cp") {
        CnpGraph g = load_cnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        if (engine == "cp") g = with_zero_deactivation(g);
        const SeedSet seeds = load_seed_file(seeds_path, g.num_nodes());
        est = estimate_spread(g, seeds, T, runs, master_seed, jobs);
        report["nodes"] = g.num_nodes();
        report["seed_count"] = seeds.size();
    } else {
        throw io_error("--engine must be cnp, dnp, or cp");
    }
    report["engine"] = engine;
    report["horizon"] = T;
    report["runs"] = est.runs;
    report["spread_mean"] = est.mean;
    report["spread_stderr"] = est.std_err;
    report["master_seed"] = master_seed;
    write_json(report, out);
    manifest.write(out + ".manifest.json");
    std::cout << "spread mean " << est.mean << " stderr " << est.std_err << " over " << est.runs
              << " runs\n";
    return 0;
}

int run_simulate(const GraphArgs& ga, const std::string& seeds_path, const std::string& engine,
                 double T, std::uint64_t master_seed, const std::string& out, Manifest& manifest) {
    Trace trace;
    EngineStats stats;
    if (engine == "dnp") {
        const DnpGraph g = load_dnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        const SeedSet seeds = load_seed_file(seeds_path, g.num_nodes());
        const std::uint32_t steps = integral_steps(T);
        auto gen = derive_rng(master_seed, 0);
        trace = step_trace_to_intervals(simulate_dnp(g, seeds, steps, gen, true));
        stats.events_fired = steps;
        stats.t_final = steps;
    } else if (engine == "cnp" || engine == "cp") {
        CnpGraph g = load_cnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        if (engine == "cp") g = with_zero_deactivation(g);
        const SeedSet seeds = load_seed_file(seeds_path, g.num_nodes());
        auto gen = derive_rng(master_seed, 0);
        trace = simulate_event_driven(g, seeds, T, gen, &stats);
    } else {
        throw io_error("--engine must be cnp, dnp, or cp");
    }
    write_trace_tsv(trace, out);
    json summary;
    summary["spread"] = spread(trace);
    summary["events_fired"] = stats.events_fired;
    summary["t_final"] = stats.t_final;
    write_json(summary, out + ".summary.json");
    manifest.write(out + ".manifest.json");
    std::cout << "trace spread " << spread(trace) << " after " << stats.events_fired << " events\n";
    return 0;
}

// ---------------------------------------------------------------------------
// maximize

int run_maximize(const GraphArgs& ga, std::uint32_t k, double T, std::uint64_t runs,
                 std::uint64_t master_seed, bool fresh_worlds, unsigned jobs, const std::string& out,
                 Manifest& manifest) {
    const CnpGraph g = load_cnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
    const SeedSelection sel = greedy_celf(g, k, T, runs, master_seed, fresh_worlds, jobs);
    json report;
    report["seeds"] = sel.seeds;
    report["marginal_gains"] = sel.marginal_gains;
    report["spread_mean"] = sel.spread_mean;
    report["spread_stderr"] = sel.spread_std_err;
    report["runs"] = sel.runs;
    report["k"] = k;
    report["horizon"] = T;
    report["master_seed"] = master_seed;
    write_json(report, out);
    manifest.write(out + ".manifest.json");
    std::cout << "selected " << sel.seeds.size() << " seeds; estimated spread " << sel.spread_mean
              << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// synth

int run_synth(const SynthConfig& cfg, const std::string& out_prefix, Manifest& manifest) {
    const CnpGraph topo = forest_fire(cfg);
    const SynthLog log = gen_cascades(topo, cfg);
    save_cnp_graph(topo, out_prefix + "_edges.tsv", out_prefix + "_nodes.tsv");
    save_action_log_csv(log, out_prefix + "_actions.csv");
    {
        std::ofstream out(out_prefix + "_deactivations.tsv");
        if (!out) throw io_error(out_prefix + "_deactivations.tsv: cannot open file for writing");
        for (const auto& [t, u] : log.injected_deactivations) {
            out << u << '\t' << detail::format_weight(t) << '\n';
        }
    }
    manifest.write(out_prefix + ".manifest.json");
    std::cout << "generated " << topo.num_edges() << " edges, " << log.actions.size() << " actions, "
              << log.injected_deactivations.size() << " injected deactivations\n";
    return 0;
}

// ---------------------------------------------------------------------------
// convert

int run_convert(const GraphArgs& ga, const std::string& direction, const std::string& out_edges,
                const std::string& out_nodes, Manifest& manifest) {
    double mapped_ambient = 0.0;
    if (direction == "cnp2dnp") {
        const CnpGraph g = load_cnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        const DnpGraph d = cnp_to_dnp(g);
        save_dnp_graph(d, out_edges, out_nodes);
        mapped_ambient = d.ambient();
    } else if (direction == "dnp2cnp") {
        const DnpGraph g = load_dnp_graph(ga.edges_path, ga.nodes_path, resolve_global_rate(ga));
        const CnpGraph c = [&] {
            try {
                return dnp_to_cnp(g);
            } catch (const std::invalid_argument& e) {
                throw io_error(std::string("convert: ") + e.what());
            }
        }();
        save_cnp_graph(c, out_edges, out_nodes);
        mapped_ambient = c.ambient();
    } else {
        throw io_error("--direction must be cnp2dnp or dnp2cnp");
    }
    manifest.parameters["mapped_ambient"] = mapped_ambient;
    manifest.write(out_edges + ".manifest.json");
    std::cout << "converted; mapped ambient value " << mapped_ambient << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::vector<std::string> engines{"cnp", "dnp"};
    std::vector<double> horizons{64, 128, 256, 512};
    std::vector<NodeId> sizes{10000};
    std::uint64_t reps = 5;
    double edge_rate = 1e-4;
    double deact_rate = 1e-4;
    double seed_fraction = 0.2;
    std::string out;
};

int run_bench(const BenchArgs& a, std::uint64_t master_seed, Manifest& manifest) {
    std::ofstream out(a.out);
    if (!out) throw io_error(a.out + ": cannot open file for writing");
    out << "engine,nodes,horizon,reps,mean_wall_ms,mean_spread\n";
    for (NodeId size : a.sizes) {
        SynthConfig cfg;
        cfg.nodes = size;
        cfg.seed = master_seed;
        const CnpGraph topo = forest_fire(cfg);
        std::vector<GraphEdge<double>> edges = topo.edges();
        for (auto& e : edges) e.weight = a.edge_rate;
        const CnpGraph g(size, std::move(edges), std::vector<double>(size, a.deact_rate), 0.0);
        const DnpGraph d = cnp_to_dnp(g);

        SeedSet seeds;
        auto pick = derive_rng(master_seed, 0xbe9c);
        const auto want = static_cast<std::uint64_t>(a.seed_fraction * size);
        std::vector<char> used(size, false);
        while (seeds.size() < want) {
            const NodeId v = static_cast<NodeId>(uniform_index(pick, size));
            if (!used[v]) {
                used[v] = true;
                seeds.push_back(v);
            }
        }
        std::sort(seeds.begin(), seeds.end());

        for (const std::string& engine : a.engines) {
            for (double T : a.horizons) {
                double total_ms = 0.0;
                double total_spread = 0.0;
                for (std::uint64_t rep = 0; rep < a.reps; ++rep) {
                    auto gen = derive_rng(master_seed, rep * a.horizons.size() + 17);
                    const auto t0 = std::chrono::steady_clock::now();
                    double s = 0.0;
                    if (engine == "cnp") {
                        s = spread(simulate_event_driven(g, seeds, T, gen));
                    } else if (engine == "dnp") {
                        s = simulate_dnp(d, seeds, integral_steps(T), gen).spread();
                    } else {
                        throw io_error("--engines entries must be cnp or dnp");
                    }
                    const auto t1 = std::chrono::steady_clock::now();
                    total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
                    total_spread += s;
                }
                out << engine << ',' << size << ',' << T << ',' << a.reps << ','
                    << total_ms / static_cast<double>(a.reps) << ','
                    << total_spread / static_cast<double>(a.reps) << '\n';
            }
        }
    }
    manifest.write(a.out + ".manifest.json");
    std::cout << "benchmark written to " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-progressive influence propagation: simulation, learning, seed selection"};
    app.require_subcommand(1);
    std::string seed_spec = "1913";
    unsigned jobs = default_jobs();
    app.add_option("--seed", seed_spec, "master seed (integer) or 'random'")->capture_default_str();
    app.add_option("--jobs", jobs, "worker threads for Monte Carlo runs (env NPINF_JOBS)")
        ->capture_default_str();

    LearnArgs learn_args;
    auto* learn = app.add_subcommand("learn", "learn model parameters from an action log");
    learn->add_option("--log", learn_args.log_path, "action log CSV (user,timestamp)")->required();
    learn->add_option("--topology", learn_args.topology_path, "social graph edge list (TSV)")->required();
    learn->add_option("--out-prefix", learn_args.out_prefix, "output path prefix")->required();
    learn->add_option("--window", learn_args.window, "deactivation time window override");
    learn->add_option("--percentile", learn_args.percentile, "default deactivation rate percentile")
        ->capture_default_str();
    learn->add_option("--train-start", learn_args.train_start, "training period start (default: first action)");
    learn->add_option("--train-end", learn_args.train_end, "training period end (default: last action)");
    learn->add_option("--horizon", learn_args.horizon,
                      "denominator horizon for the global rate (default: training length)");
    learn->add_option("--unit", learn_args.unit, "time unit label carried into outputs")
        ->capture_default_str();
    learn->add_option("--time-scale", learn_args.time_scale, "multiply raw timestamps by this factor")
        ->capture_default_str();
    learn->add_option("--ic-out", learn_args.ic_out, "also write IC-style edge probabilities here");

    GraphArgs est_graph;
    std::string est_seeds, est_engine = "cnp", est_out = "estimate.json";
    double est_T = 10.0;
    std::uint64_t est_R = 100;
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo spread estimate for a seed set");
    estimate->add_option("--edges", est_graph.edges_path, "edge parameter file")->required();
    estimate->add_option("--nodes", est_graph.nodes_path, "node parameter file")->required();
    estimate->add_option("--seeds", est_seeds, "seed set file, one node id per line")->required();
    estimate->add_option("--engine", est_engine, "cnp | dnp | cp")->capture_default_str();
    estimate->add_option("-T,--horizon", est_T, "time horizon")->capture_default_str();
    estimate->add_option("-R,--runs", est_R, "Monte Carlo runs")->capture_default_str();
    estimate->add_option("--global-rate", est_graph.global_rate, "global influence value")
        ->capture_default_str();
    estimate->add_option("--sidecar", est_graph.sidecar, "read global_rate from a learn sidecar JSON");
    estimate->add_option("--out", est_out, "report path")->capture_default_str();

    GraphArgs sim_graph;
    std::string sim_seeds, sim_engine = "cnp", sim_out = "trace.tsv";
    double sim_T = 10.0;
    auto* simulate = app.add_subcommand("simulate", "dump a single simulated trace");
    simulate->add_option("--edges", sim_graph.edges_path, "edge parameter file")->required();
    simulate->add_option("--nodes", sim_graph.nodes_path, "node parameter file")->required();
    simulate->add_option("--seeds", sim_seeds, "seed set file")->required();
    simulate->add_option("--engine", sim_engine, "cnp | dnp | cp")->capture_default_str();
    simulate->add_option("-T,--horizon", sim_T, "time horizon")->capture_default_str();
    simulate->add_option("--global-rate", sim_graph.global_rate, "global influence value")
        ->capture_default_str();
    simulate->add_option("--sidecar", sim_graph.sidecar, "read global_rate from a learn sidecar JSON");
    simulate->add_option("--out", sim_out, "trace path (summary JSON written alongside)")
        ->capture_default_str();

    GraphArgs max_graph;
    std::string max_out = "seeds.json";
    std::uint32_t max_k = 1;
    double max_T = 10.0;
    std::uint64_t max_R = 100;
    bool fresh_worlds = false;
    auto* maximize = app.add_subcommand("maximize", "greedy seed selection maximizing expected spread");
    maximize->add_option("--edges", max_graph.edges_path, "edge parameter file")->required();
    maximize->add_option("--nodes", max_graph.nodes_path, "node parameter file")->required();
    maximize->add_option("-k,--seeds", max_k, "number of seeds to select")->capture_default_str();
    maximize->add_option("-T,--horizon", max_T, "time horizon")->capture_default_str();
    maximize->add_option("-R,--runs", max_R, "possible worlds per evaluation")->capture_default_str();
    maximize->add_option("--global-rate", max_graph.global_rate, "global influence value")
        ->capture_default_str();
    maximize->add_option("--sidecar", max_graph.sidecar, "read global_rate from a learn sidecar JSON");
    maximize->add_flag("--fresh-worlds", fresh_worlds, "resample worlds before each greedy round");
    maximize->add_option("--out", max_out, "selection report path")->capture_default_str();

    SynthConfig synth_cfg;
    std::string synth_prefix = "synth";
    auto* synth = app.add_subcommand("synth", "generate a forest-fire topology and action log");
    synth->add_option("--nodes", synth_cfg.nodes, "node count")->capture_default_str();
    synth->add_option("--forward", synth_cfg.forward_prob, "forward burn probability")
        ->capture_default_str();
    synth->add_option("--backward", synth_cfg.backward_prob, "backward burn probability")
        ->capture_default_str();
    synth->add_option("--cascades", synth_cfg.cascades, "number of cascades")->capture_default_str();
    synth->add_option("--deactivations", synth_cfg.deactivations, "injected deactivation events")
        ->capture_default_str();
    synth->add_option("--horizon", synth_cfg.horizon, "log horizon")->capture_default_str();
    synth->add_option("--follow-prob", synth_cfg.follow_prob, "per-edge cascade follow probability")
        ->capture_default_str();
    synth->add_option("--delay-min", synth_cfg.delay_min, "min cascade delay")->capture_default_str();
    synth->add_option("--delay-max", synth_cfg.delay_max, "max cascade delay")->capture_default_str();
    synth->add_option("--deactivation-gap", synth_cfg.deactivation_gap,
                      "silence length after an injected deactivation")
        ->capture_default_str();
    synth->add_option("--out-prefix", synth_prefix, "output path prefix")->capture_default_str();

    GraphArgs conv_graph;
    std::string conv_direction = "cnp2dnp", conv_out_edges, conv_out_nodes;
    auto* convert = app.add_subcommand("convert", "map parameters between continuous and discrete models");
    convert->add_option("--edges", conv_graph.edges_path, "input edge file")->required();
    convert->add_option("--nodes", conv_graph.nodes_path, "input node file")->required();
    convert->add_option("--direction", conv_direction, "cnp2dnp | dnp2cnp")->capture_default_str();
    convert->add_option("--global-rate", conv_graph.global_rate, "input global value")
        ->capture_default_str();
    convert->add_option("--out-edges", conv_out_edges, "output edge file")->required();
    convert->add_option("--out-nodes", conv_out_nodes, "output node file")->required();

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "wall-time scaling of the engines on synthetic graphs");
    bench->add_option("--engines", bench_args.engines, "engines to run")->delimiter(',')
        ->capture_default_str();
    bench->add_option("--horizons", bench_args.horizons, "time horizons")->delimiter(',')
        ->capture_default_str();
    bench->add_option("--sizes", bench_args.sizes, "graph sizes")->delimiter(',')->capture_default_str();
    bench->add_option("--reps", bench_args.reps, "repetitions per configuration")->capture_default_str();
    bench->add_option("--edge-rate", bench_args.edge_rate, "edge activation rate")->capture_default_str();
    bench->add_option("--deact-rate", bench_args.deact_rate, "node deactivation rate")
        ->capture_default_str();
    bench->add_option("--seed-fraction", bench_args.seed_fraction, "fraction of nodes seeded")
        ->capture_default_str();
    bench->add_option("--out", bench_args.out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const std::uint64_t master_seed = resolve_seed(seed_spec);
        if (jobs < 1) jobs = 1;
        Manifest manifest;
        manifest.master_seed = master_seed;
        manifest.parameters["jobs"] = jobs;

        if (*learn) {
            manifest.command = "learn";
            manifest.inputs = {learn_args.log_path, learn_args.topology_path};
            return run_learn(learn_args, manifest);
        }
        if (*estimate) {
            manifest.command = "estimate";
            manifest.inputs = {est_graph.edges_path, est_graph.nodes_path, est_seeds};
            manifest.parameters["engine"] = est_engine;
            manifest.parameters["horizon"] = est_T;
            manifest.parameters["runs"] = est_R;
            return run_estimate(est_graph, est_seeds, est_engine, est_T, est_R, master_seed, jobs,
                                est_out, manifest);
        }
        if (*simulate) {
            manifest.command = "simulate";
            manifest.inputs = {sim_graph.edges_path, sim_graph.nodes_path, sim_seeds};
            manifest.parameters["engine"] = sim_engine;
            manifest.parameters["horizon"] = sim_T;
            return run_simulate(sim_graph, sim_seeds, sim_engine, sim_T, master_seed, sim_out, manifest);
        }
        if (*maximize) {
            manifest.command = "maximize";
            manifest.inputs = {max_graph.edges_path, max_graph.nodes_path};
            manifest.parameters["k"] = max_k;
            manifest.parameters["horizon"] = max_T;
            manifest.parameters["runs"] = max_R;
            return run_maximize(max_graph, max_k, max_T, max_R, master_seed, fresh_worlds, jobs, max_out,
                                manifest);
        }
        if (*synth) {
            manifest.command = "synth";
            synth_cfg.seed = master_seed;
            return run_synth(synth_cfg, synth_prefix, manifest);
        }
        if (*convert) {
            manifest.command = "convert";
            manifest.inputs = {conv_graph.edges_path, conv_graph.nodes_path};
            manifest.parameters["direction"] = conv_direction;
            return run_convert(conv_graph, conv_direction, conv_out_edges, conv_out_nodes, manifest);
        }
        if (*bench) {
            manifest.command = "bench";
            return run_bench(bench_args, master_seed, manifest);
        }
        return 1;
    } catch (const io_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
