#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "woc/checker.hpp"
#include "woc/simulation.hpp"

namespace woc {

/// Flat scenario description; loadable from key=value text.
struct ScenarioConfig {
    std::string protocol = "woc";  // woc | cabinet
    int n_servers = 5;
    int t = 0;  // 0 = auto: min(floor((n-1)/2), 2)
    int client_count = 2;
    int batch_size = 10;
    double conflict_fraction = -1.0;  // <0 selects the object mix below
    double mix_independent = 0.90;
    double mix_common = 0.05;
    double mix_hot = 0.05;
    std::uint32_t payload_bytes = 512;
    double object_ratio = 1.40;  // independent-class steepness, t=1
    double node_ratio = 0.0;     // 0 = auto: lowest feasible grid point
    std::string latency_profile = "heterogeneous";
    std::vector<double> custom_latency;
    double client_latency_ms = 0.25;
    double jitter_ms = 1.0;
    double proc_msg_ms = 0.01;
    double proc_ingest_ms = 0.02;
    std::uint64_t seed = 0;  // mandatory, must be nonzero
    double duration_ms = 1500.0;
    std::uint64_t op_budget = 0;  // >0 switches to budget mode
    int max_inflight = 5;
    double request_interval_ms = 2.0;
    double read_fraction = 0.0;
    bool adaptive_classes = false;
    bool adaptive_weights = true;
    std::uint64_t rerank_window = 100;
    double hysteresis = 0.10;
    double fast_timeout_mult = 4.0;
    double slow_timeout_mult = 6.0;
    int slow_retry_limit = 3;
    double client_retry_ms = 250.0;
    int client_retry_limit = 8;
    std::uint64_t hot_pool = 4;
    std::uint64_t common_pool = 64;
    std::uint64_t independent_pool = 4000;
    int crash_lowest = 0;      // crash the k lowest-weight replicas (initial ranking)
    double crash_at_ms = -1.0;  // default: 30% of the duration
    std::vector<CrashEntry> crashes;
    std::string weights_file;
    std::string trace_out;
};

/// One `name n t ratio` line per object class; `node` configures the slow
/// path. Parsed from the plain-text weight configuration format.
struct ClassWeightSpec {
    std::string name;
    int n = 0;
    int t = 0;
    double ratio = 0.0;
};

std::vector<ClassWeightSpec> parse_weights_file(const std::string& path);

/// Parses `key=value` lines; '#' starts a comment.
ScenarioConfig parse_config_file(const std::string& path);
void apply_key_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Resolves auto fields (t, node ratio, crash schedule, weight file) and
/// validates ranges and both weight invariants. Throws ConfigError.
void finalize_config(ScenarioConfig& cfg);

/// Lowest feasible grid point (step 0.01) for the node ratio at (n, t).
double auto_node_ratio(int n, int t);

SimParams to_sim_params(const ScenarioConfig& cfg);

struct MetricsReport {
    double window_start_ms = 0.0;
    double window_end_ms = 0.0;
    std::uint64_t committed = 0;  // commits inside the window
    double throughput_ops_s = 0.0;
    double p50_ms = 0.0;
    double avg_ms = 0.0;
    double fast_path_fraction = 0.0;
};

/// Nearest-rank percentile (ceil(p/100 * N)-th smallest).
/// Throws std::invalid_argument on an empty sample.
double percentile(std::vector<double> samples, double p);

MetricsReport compute_metrics(const RunTrace& trace, const ScenarioConfig& cfg);

struct RunResult {
    ScenarioConfig config;  // finalized
    MetricsReport metrics;
    RunTrace trace;
    std::vector<Violation> violations;
};

/// Simulates, computes metrics and runs all checker oracles.
RunResult run_scenario(ScenarioConfig cfg);

inline constexpr const char* kCsvHeader =
    "protocol,dimension,value,throughput_ops_per_s,p50_ms,avg_ms,fast_fraction,seed";

struct SweepRow {
    std::string protocol;
    std::string dimension;
    double value = 0.0;
    MetricsReport metrics;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // set when the run failed or the checker objected
};

std::string format_csv_row(const SweepRow& row);

/// Runs one row per (protocol, value). Dimensions: batch | conflict |
/// clients | servers. Failed rows are reported and skipped; the sweep
/// continues.
std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& dimension,
                            const std::vector<double>& values,
                            const std::vector<std::string>& protocols);

/// CSV for the successful rows, header included, newline-terminated.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// trace file I/O (line-delimited JSON records)
void write_trace(const RunTrace& trace, std::ostream& out);
void write_trace_file(const RunTrace& trace, const std::string& path);
RunTrace read_trace_file(const std::string& path);
std::string trace_to_string(const RunTrace& trace);

} // namespace woc
