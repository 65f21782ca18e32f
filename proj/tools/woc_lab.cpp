// woc-lab: run scenarios, sweep the benchmark dimensions, verify traces and
// validate weight configurations.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "woc/harness.hpp"

namespace {

void print_metrics(const woc::RunResult& result)
{
    const woc::MetricsReport& m = result.metrics;
    std::printf("protocol            %s\n", result.config.protocol.c_str());
    std::printf("seed                %llu\n",
                static_cast<unsigned long long>(result.config.seed));
    std::printf("window_ms           [%.1f, %.1f]\n", m.window_start_ms, m.window_end_ms);
    std::printf("committed_ops       %llu\n", static_cast<unsigned long long>(m.committed));
    std::printf("throughput_ops_s    %.3f\n", m.throughput_ops_s);
    std::printf("p50_latency_ms      %.6f\n", m.p50_ms);
    std::printf("avg_latency_ms      %.6f\n", m.avg_ms);
    std::printf("fast_path_fraction  %.6f\n", m.fast_path_fraction);
}

int do_run(const std::string& config_path, std::uint64_t seed_override,
           const std::string& trace_out)
{
    woc::ScenarioConfig cfg = woc::parse_config_file(config_path);
    if (seed_override != 0)
        cfg.seed = seed_override;
    if (!trace_out.empty())
        cfg.trace_out = trace_out;

    woc::RunResult result = woc::run_scenario(std::move(cfg));
    print_metrics(result);
    if (!result.violations.empty()) {
        std::fprintf(stderr, "checker found %zu violation(s):\n", result.violations.size());
        for (const woc::Violation& v : result.violations)
            std::fprintf(stderr, "  %s\n", woc::to_string(v).c_str());
        return 1;
    }
    std::printf("checker             pass\n");
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& dim, const std::string& values_csv,
             const std::string& protocol, std::uint64_t seed, const std::string& out_path)
{
    woc::ScenarioConfig base =
        config_path.empty() ? woc::ScenarioConfig{} : woc::parse_config_file(config_path);
    if (seed != 0)
        base.seed = seed;

    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            values.push_back(std::stod(item));

    std::vector<std::string> protocols;
    if (protocol == "both")
        protocols = {"woc", "cabinet"};
    else
        protocols = {protocol};

    const std::vector<woc::SweepRow> rows = woc::sweep(base, dim, values, protocols);
    const std::string csv = woc::sweep_csv(rows);

    if (out_path.empty() || out_path == "-") {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::fprintf(stderr, "cannot write %s\n", out_path.c_str());
            return 1;
        }
        out << csv;
    }

    int failures = 0;
    for (const woc::SweepRow& row : rows)
        if (!row.ok) {
            ++failures;
            std::fprintf(stderr, "row %s %s=%g failed: %s\n", row.protocol.c_str(),
                         row.dimension.c_str(), row.value, row.error.c_str());
        }
    return failures == 0 ? 0 : 1;
}

int do_check(const std::string& trace_path)
{
    const woc::RunTrace trace = woc::read_trace_file(trace_path);
    const std::vector<woc::Violation> violations = woc::check_all(trace);
    if (violations.empty()) {
        std::printf("checker pass: %zu commits, %zu submits\n", trace.commits.size(),
                    trace.submits.size());
        return 0;
    }
    for (const woc::Violation& v : violations)
        std::printf("%s\n", woc::to_string(v).c_str());
    return 1;
}

int do_validate(int n, int t, double ratio, const std::string& weights_path)
{
    int rc = 0;
    auto report_one = [&rc](const std::string& label, int vn, int vt, double vr) {
        const woc::WeightVector wv = woc::geometric_weights(vn, vr);
        const woc::InvariantReport rep = woc::check_invariants(wv, vt);
        std::printf("%s: n=%d t=%d ratio=%.4f\n", label.c_str(), vn, vt, vr);
        std::printf("  weights   ");
        for (double w : wv.weights)
            std::printf("%.4f ", w);
        std::printf("\n  threshold %.6f\n", rep.threshold);
        std::printf("  I1 top-%d sum %.6f > threshold: %s\n", vt + 1, rep.top_t_plus_1_sum,
                    rep.i1_holds ? "yes" : "NO");
        std::printf("  I2 top-%d sum %.6f < threshold: %s\n", vt, rep.top_t_sum,
                    rep.i2_holds ? "yes" : "NO");
        const auto interval = woc::feasible_ratio_interval(vn, vt, 0.01);
        if (interval)
            std::printf("  feasible ratios: [%.2f, %.2f]\n", interval->lo, interval->hi);
        else
            std::printf("  feasible ratios: none\n");
        if (!rep.i1_holds || !rep.i2_holds)
            rc = 1;
    };

    if (!weights_path.empty()) {
        for (const woc::ClassWeightSpec& spec : woc::parse_weights_file(weights_path))
            report_one(spec.name, spec.n, spec.t, spec.ratio);
    } else {
        report_one("config", n, t, ratio);
    }
    return rc;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"WOC dual-path weighted consensus lab"};
    app.require_subcommand(1);

    std::string config_path, trace_out, trace_path, out_path, weights_path;
    std::string dim, values_csv, protocol = "both";
    std::uint64_t seed = 0;
    int n = 7, t = 1;
    double ratio = 1.40;

    CLI::App* run = app.add_subcommand("run", "run one scenario from a config file");
    run->add_option("--config", config_path, "key=value scenario file")->required();
    run->add_option("--seed", seed, "override the configured seed");
    run->add_option("--trace-out", trace_out, "write the run trace (JSON lines)");

    CLI::App* sw = app.add_subcommand("sweep", "run one benchmark dimension");
    sw->add_option("--dim", dim, "batch | conflict | clients | servers")->required();
    sw->add_option("--values", values_csv, "comma-separated sweep values")->required();
    sw->add_option("--protocol", protocol, "woc | cabinet | both");
    sw->add_option("--seed", seed, "base seed (required unless set in --config)");
    sw->add_option("--config", config_path, "base scenario file");
    sw->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* check = app.add_subcommand("check", "re-run the checker over a trace file");
    check->add_option("--trace", trace_path, "trace file from run --trace-out")->required();

    CLI::App* validate = app.add_subcommand("validate-weights", "invariant report for a ratio");
    validate->add_option("--n", n, "replica count");
    validate->add_option("--t", t, "fault threshold");
    validate->add_option("--ratio", ratio, "geometric ratio R");
    validate->add_option("--file", weights_path, "validate a weights file instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return do_run(config_path, seed, trace_out);
        if (*sw)
            return do_sweep(config_path, dim, values_csv, protocol, seed, out_path);
        if (*check)
            return do_check(trace_path);
        if (*validate)
            return do_validate(n, t, ratio, weights_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
