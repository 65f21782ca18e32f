#include "woc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace woc {

namespace {

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos)
        return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw ConfigError("expected a boolean, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(std::stod(trim(item)));
    return out;
}

} // namespace

std::vector<ClassWeightSpec> parse_weights_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open weights file: " + path);

    std::vector<ClassWeightSpec> specs;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = line.substr(0, line.find('#'));
        for (char& c : body)
            if (c == ',')
                c = ' ';
        std::stringstream ss(body);
        ClassWeightSpec spec;
        if (!(ss >> spec.name))
            continue;  // blank line
        if (!(ss >> spec.n >> spec.t >> spec.ratio))
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'name n t ratio'");
        specs.push_back(spec);
    }
    return specs;
}

void apply_key_value(ScenarioConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "protocol") cfg.protocol = value;
    else if (key == "n_servers") cfg.n_servers = std::stoi(value);
    else if (key == "t") cfg.t = std::stoi(value);
    else if (key == "client_count") cfg.client_count = std::stoi(value);
    else if (key == "batch_size") cfg.batch_size = std::stoi(value);
    else if (key == "conflict_fraction") cfg.conflict_fraction = std::stod(value);
    else if (key == "mix_independent") cfg.mix_independent = std::stod(value);
    else if (key == "mix_common") cfg.mix_common = std::stod(value);
    else if (key == "mix_hot") cfg.mix_hot = std::stod(value);
    else if (key == "payload_bytes") cfg.payload_bytes = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "object_ratio") cfg.object_ratio = std::stod(value);
    else if (key == "node_ratio") cfg.node_ratio = value == "auto" ? 0.0 : std::stod(value);
    else if (key == "latency_profile") cfg.latency_profile = value;
    else if (key == "latency_ms") { cfg.custom_latency = parse_double_list(value); cfg.latency_profile = "custom"; }
    else if (key == "client_latency_ms") cfg.client_latency_ms = std::stod(value);
    else if (key == "jitter_ms") cfg.jitter_ms = std::stod(value);
    else if (key == "proc_msg_ms") cfg.proc_msg_ms = std::stod(value);
    else if (key == "proc_ingest_ms") cfg.proc_ingest_ms = std::stod(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "duration_ms") cfg.duration_ms = std::stod(value);
    else if (key == "op_budget") cfg.op_budget = std::stoull(value);
    else if (key == "max_inflight") cfg.max_inflight = std::stoi(value);
    else if (key == "request_interval_ms") cfg.request_interval_ms = std::stod(value);
    else if (key == "read_fraction") cfg.read_fraction = std::stod(value);
    else if (key == "adaptive_classes") cfg.adaptive_classes = parse_bool(value);
    else if (key == "adaptive_weights") cfg.adaptive_weights = parse_bool(value);
    else if (key == "rerank_window") cfg.rerank_window = std::stoull(value);
    else if (key == "hysteresis") cfg.hysteresis = std::stod(value);
    else if (key == "fast_timeout_mult") cfg.fast_timeout_mult = std::stod(value);
    else if (key == "slow_timeout_mult") cfg.slow_timeout_mult = std::stod(value);
    else if (key == "slow_retry_limit") cfg.slow_retry_limit = std::stoi(value);
    else if (key == "client_retry_ms") cfg.client_retry_ms = std::stod(value);
    else if (key == "client_retry_limit") cfg.client_retry_limit = std::stoi(value);
    else if (key == "hot_pool") cfg.hot_pool = std::stoull(value);
    else if (key == "common_pool") cfg.common_pool = std::stoull(value);
    else if (key == "independent_pool") cfg.independent_pool = std::stoull(value);
    else if (key == "crash_lowest") cfg.crash_lowest = std::stoi(value);
    else if (key == "crash_at_ms") cfg.crash_at_ms = std::stod(value);
    else if (key == "weights_file") cfg.weights_file = value;
    else if (key == "trace_out") cfg.trace_out = value;
    else throw ConfigError("unknown config key: " + key);
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);

    ScenarioConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line.substr(0, line.find('#')));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
        apply_key_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return cfg;
}

double auto_node_ratio(int n, int t)
{
    auto interval = feasible_ratio_interval(n, t, 0.01);
    if (!interval)
        throw ConfigError("no feasible node ratio for n=" + std::to_string(n) +
                          ", t=" + std::to_string(t));
    return interval->lo;
}

void finalize_config(ScenarioConfig& cfg)
{
    if (cfg.protocol != "woc" && cfg.protocol != "cabinet")
        throw ConfigError("protocol must be woc or cabinet");
    if (cfg.n_servers < 3 || cfg.n_servers > 9)
        throw ConfigError("n_servers must lie in 3..9");
    if (cfg.seed == 0)
        throw ConfigError("seed is mandatory (nonzero)");
    if (cfg.client_count < 1)
        throw ConfigError("client_count must be at least 1");
    if (cfg.batch_size < 1)
        throw ConfigError("batch_size must be at least 1");
    if (cfg.max_inflight < 1)
        throw ConfigError("max_inflight must be at least 1");
    if (cfg.conflict_fraction > 1.0)
        throw ConfigError("conflict_fraction must lie in [0, 1]");
    if (cfg.duration_ms <= 0.0 && cfg.op_budget == 0)
        throw ConfigError("set duration_ms or op_budget");

    if (cfg.conflict_fraction < 0.0) {
        const double sum = cfg.mix_independent + cfg.mix_common + cfg.mix_hot;
        if (std::abs(sum - 1.0) > 1e-9)
            throw ConfigError("object mix fractions must sum to 1");
    }

    const int t_cap = (cfg.n_servers - 1) / 2;
    if (cfg.t == 0)
        cfg.t = std::min(t_cap, 2);  // sweeps include n=3, which cannot take t=2
    if (cfg.t < 1 || cfg.t > t_cap)
        throw ConfigError("t must lie in 1..floor((n-1)/2)");

    if (!cfg.weights_file.empty()) {
        for (const ClassWeightSpec& spec : parse_weights_file(cfg.weights_file)) {
            if (spec.n != cfg.n_servers)
                throw ConfigError("weights file entry '" + spec.name + "' is for n=" +
                                  std::to_string(spec.n) + ", scenario has n=" +
                                  std::to_string(cfg.n_servers));
            const InvariantReport rep = check_invariants(geometric_weights(spec.n, spec.ratio), spec.t);
            if (!rep.i1_holds || !rep.i2_holds)
                throw ConfigError("weights file entry '" + spec.name +
                                  "' violates the fault-tolerance invariants");
            if (spec.name == "independent")
                cfg.object_ratio = spec.ratio;
            else if (spec.name == "node")
                cfg.node_ratio = spec.ratio;
            // common/hot entries are validated; the slow path serves those
            // classes with the node vector
        }
    }

    if (cfg.node_ratio == 0.0)
        cfg.node_ratio = auto_node_ratio(cfg.n_servers, cfg.t);

    // startup validation of both ratios; independent-class objects run the
    // fast path at a per-object fault threshold of 1
    const InvariantReport obj_rep = check_invariants(geometric_weights(cfg.n_servers, cfg.object_ratio), 1);
    if (!obj_rep.i1_holds || !obj_rep.i2_holds)
        throw ConfigError("object_ratio " + std::to_string(cfg.object_ratio) +
                          " violates I1/I2 at n=" + std::to_string(cfg.n_servers) + ", t=1");
    const InvariantReport node_rep = check_invariants(geometric_weights(cfg.n_servers, cfg.node_ratio), cfg.t);
    if (!node_rep.i1_holds || !node_rep.i2_holds)
        throw ConfigError("node_ratio " + std::to_string(cfg.node_ratio) +
                          " violates I1/I2 at n=" + std::to_string(cfg.n_servers) +
                          ", t=" + std::to_string(cfg.t));

    if (cfg.crash_lowest > 0) {
        if (cfg.crash_lowest > cfg.t)
            throw ConfigError("crash_lowest exceeds the fault threshold t");
        double at = cfg.crash_at_ms;
        if (at < 0.0)
            at = cfg.duration_ms > 0.0 ? 0.3 * cfg.duration_ms : 50.0;
        // lowest configured weight = tail of the id-ordered initial ranking
        for (int k = 0; k < cfg.crash_lowest; ++k)
            cfg.crashes.push_back(CrashEntry{cfg.n_servers - 1 - k, at, false});
        cfg.crash_lowest = 0;
    }
}

SimParams to_sim_params(const ScenarioConfig& cfg)
{
    SimParams p;
    p.mode = cfg.protocol == "cabinet" ? ProtocolMode::Cabinet : ProtocolMode::Woc;
    p.n_replicas = cfg.n_servers;
    p.t = cfg.t;
    p.seed = cfg.seed;

    p.links.replica_delay_ms = cfg.latency_profile == "custom"
                                   ? cfg.custom_latency
                                   : latency_profile(cfg.latency_profile, cfg.n_servers);
    p.links.client_delay_ms = cfg.client_latency_ms;
    p.links.jitter_ms = cfg.jitter_ms;
    p.links.proc_msg_ms = cfg.proc_msg_ms;
    p.links.proc_ingest_ms = cfg.proc_ingest_ms;

    p.weight_policy.object_ratio = cfg.object_ratio;
    p.weight_policy.node_ratio = cfg.node_ratio;
    p.weight_policy.rerank_window = cfg.rerank_window;
    p.weight_policy.hysteresis = cfg.hysteresis;
    p.weight_policy.adaptive = cfg.adaptive_weights;

    p.client_count = cfg.client_count;
    p.batch_size = cfg.batch_size;
    p.max_inflight = cfg.max_inflight;
    p.request_interval_ms = cfg.request_interval_ms;
    p.duration_ms = cfg.op_budget > 0 ? 0.0 : cfg.duration_ms;
    p.op_budget = cfg.op_budget;
    p.payload_bytes = cfg.payload_bytes;
    p.read_fraction = cfg.read_fraction;

    p.conflict_fraction = cfg.conflict_fraction;
    p.mix_independent = cfg.mix_independent;
    p.mix_common = cfg.mix_common;
    p.mix_hot = cfg.mix_hot;
    p.hot_pool = cfg.hot_pool;
    p.common_pool = cfg.common_pool;
    p.independent_pool = cfg.independent_pool;
    p.adaptive_classes = cfg.adaptive_classes;

    p.fast_timeout_mult = cfg.fast_timeout_mult;
    p.slow_timeout_mult = cfg.slow_timeout_mult;
    p.slow_retry_limit = cfg.slow_retry_limit;
    p.client_retry_ms = cfg.client_retry_ms;
    p.client_retry_limit = cfg.client_retry_limit;
    p.crashes = cfg.crashes;
    return p;
}

double percentile(std::vector<double> samples, double p)
{
    if (samples.empty())
        throw std::invalid_argument("percentile of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double rank = std::ceil(p / 100.0 * static_cast<double>(samples.size()));
    const std::size_t idx = static_cast<std::size_t>(std::max(1.0, rank));
    return samples[std::min(idx, samples.size()) - 1];
}

MetricsReport compute_metrics(const RunTrace& trace, const ScenarioConfig& cfg)
{
    MetricsReport report;
    double end = 0.0;
    for (const CommitRecord& rec : trace.commits)
        end = std::max(end, rec.commit_ms);
    if (cfg.op_budget == 0 && cfg.duration_ms > 0.0) {
        // steady-state window, trimming warm-up and drain
        report.window_start_ms = 0.1 * cfg.duration_ms;
        report.window_end_ms = 0.9 * cfg.duration_ms;
    } else {
        report.window_start_ms = 0.0;
        report.window_end_ms = end;
    }

    std::map<OpId, double> submit_time;
    for (const SubmitEntry& sub : trace.submits) {
        auto [it, fresh] = submit_time.emplace(sub.op, sub.time_ms);
        if (!fresh)
            it->second = std::min(it->second, sub.time_ms);
    }

    std::vector<double> latencies;
    std::uint64_t fast = 0;
    for (const CommitRecord& rec : trace.commits) {
        if (rec.commit_ms < report.window_start_ms || rec.commit_ms > report.window_end_ms)
            continue;
        report.committed += 1;
        if (rec.path == Path::Fast)
            fast += 1;
        latencies.push_back(rec.commit_ms - submit_time.at(rec.op));
    }

    const double window_s = (report.window_end_ms - report.window_start_ms) / 1000.0;
    report.throughput_ops_s = window_s > 0.0 ? static_cast<double>(report.committed) / window_s : 0.0;
    if (!latencies.empty()) {
        report.p50_ms = percentile(latencies, 50.0);
        double sum = 0.0;
        for (double l : latencies)
            sum += l;
        report.avg_ms = sum / static_cast<double>(latencies.size());
    }
    report.fast_path_fraction =
        report.committed > 0 ? static_cast<double>(fast) / static_cast<double>(report.committed) : 0.0;
    return report;
}

RunResult run_scenario(ScenarioConfig cfg)
{
    finalize_config(cfg);

    Simulation sim(to_sim_params(cfg));
    sim.run();

    RunResult result;
    result.config = cfg;
    result.trace = sim.trace();
    result.metrics = compute_metrics(result.trace, cfg);
    result.violations = check_all(result.trace);
    if (!cfg.trace_out.empty())
        write_trace_file(result.trace, cfg.trace_out);
    return result;
}

std::string format_csv_row(const SweepRow& row)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%.3f,%.6f,%.6f,%.6f,%llu",
                  row.protocol.c_str(), row.dimension.c_str(), row.value,
                  row.metrics.throughput_ops_s, row.metrics.p50_ms, row.metrics.avg_ms,
                  row.metrics.fast_path_fraction,
                  static_cast<unsigned long long>(row.seed));
    return buf;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& dimension,
                            const std::vector<double>& values,
                            const std::vector<std::string>& protocols)
{
    std::vector<SweepRow> rows;
    for (const std::string& protocol : protocols) {
        for (double value : values) {
            SweepRow row;
            row.protocol = protocol;
            row.dimension = dimension;
            row.value = value;
            row.seed = base.seed;
            try {
                ScenarioConfig cfg = base;
                cfg.protocol = protocol;
                if (dimension == "batch")
                    cfg.batch_size = static_cast<int>(value);
                else if (dimension == "conflict")
                    cfg.conflict_fraction = value;
                else if (dimension == "clients")
                    cfg.client_count = static_cast<int>(value);
                else if (dimension == "servers") {
                    cfg.n_servers = static_cast<int>(value);
                    cfg.t = 0;          // re-derive for the new cluster size
                    cfg.node_ratio = 0.0;
                } else
                    throw ConfigError("unknown sweep dimension: " + dimension);

                RunResult result = run_scenario(std::move(cfg));
                if (!result.violations.empty())
                    throw std::runtime_error("checker: " + to_string(result.violations.front()));
                row.metrics = result.metrics;
                row.ok = true;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const SweepRow& row : rows)
        if (row.ok)
            out += format_csv_row(row) + "\n";
    return out;
}

} // namespace woc
