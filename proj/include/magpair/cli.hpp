// Command implementations behind the CLI front end: simulate, compare, sweep,
// print-config. Kept header-side so the commands are testable without
// spawning the binary. Exit-status contract: 0 success, 1 usage/config error,
// 2 model-inapplicable abort.
#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "magpair/config.hpp"
#include "magpair/metrics.hpp"
#include "magpair/trace_io.hpp"

namespace magpair {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitModel = 2;

namespace detail {

inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace detail

inline int cmd_simulate(const std::string& config_path, std::optional<std::string> out_override,
                        std::optional<int> stride_override, std::ostream& diag = std::cerr) {
    RunConfig config;
    try {
        config = load_run_config(config_path);
        if (out_override) config.output_dir = *out_override;
        if (stride_override) config.trace_stride = *stride_override;
        config.validate();
    } catch (const std::exception& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const DerivedConstants consts = derive_constants(config.physical);
    const Trace trace = run_scenario(config.scenario, consts);

    std::filesystem::create_directories(config.output_dir);
    const auto trace_path = (std::filesystem::path(config.output_dir) / "trace.csv").string();
    write_trace_csv(trace_path, trace, config.trace_stride);

    if (trace.aborted) {
        diag << "model error: " << trace.abort_reason << " (partial trace written to " << trace_path
             << ")\n";
        return kExitModel;
    }

    const Metrics metrics = compute_metrics(trace);
    const auto metrics_path = (std::filesystem::path(config.output_dir) / "metrics.txt").string();
    std::ofstream metrics_file(metrics_path);
    metrics_file << render_metrics(metrics);
    return kExitOk;
}

inline int cmd_compare(const std::string& config_path_a, const std::string& config_path_b,
                       std::optional<std::string> out_override, std::ostream& out = std::cout,
                       std::ostream& diag = std::cerr) {
    RunConfig config_a, config_b;
    ComparisonReport report;
    try {
        config_a = load_run_config(config_path_a);
        config_b = load_run_config(config_path_b);
        const auto& pa = config_a.physical;
        const auto& pb = config_b.physical;
        if (pa.magnetization != pb.magnetization || pa.agent_radius != pb.agent_radius ||
            pa.medium_viscosity != pb.medium_viscosity ||
            pa.relative_permeability != pb.relative_permeability ||
            pa.max_error_angle != pb.max_error_angle) {
            throw config_error("compare: physical parameter blocks differ");
        }
        report = compare(config_a.scenario, config_b.scenario, derive_constants(pa));
    } catch (const std::exception& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::string rendered = render_comparison(report);
    const std::string out_dir = out_override.value_or(config_a.output_dir);
    std::filesystem::create_directories(out_dir);
    std::ofstream file((std::filesystem::path(out_dir) / "comparison.txt").string());
    file << rendered;
    out << rendered;
    return kExitOk;
}

inline int cmd_sweep(const std::string& config_path, const std::string& parameter,
                     const std::vector<double>& values, std::optional<std::string> out_override,
                     std::ostream& out = std::cout, std::ostream& diag = std::cerr) {
    if (values.empty()) {
        diag << "usage error: sweep needs at least one value\n";
        return kExitConfig;
    }
    RunConfig base;
    std::vector<RunConfig> configs;
    try {
        base = load_run_config(config_path);
        for (double value : values) {
            RunConfig config = base;
            apply_sweep_value(config, parameter, value);
            configs.push_back(std::move(config));
        }
    } catch (const std::exception& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    struct Row {
        double value = 0.0;
        bool aborted = false;
        int segments_total = 0;
        int segments_reached = 0;
        double mean_convergence_time = std::numeric_limits<double>::quiet_NaN();
        double max_angle_step = 0.0;
        double max_fluctuation_band = 0.0;
        double final_r = 0.0;
    };

    // Independent runs; evaluated concurrently.
    std::vector<std::future<Row>> futures;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&configs, &values, i]() {
            Row row;
            row.value = values[i];
            const DerivedConstants consts = derive_constants(configs[i].physical);
            const Trace trace = run_scenario(configs[i].scenario, consts);
            row.final_r = trace.records.back().r;
            if (trace.aborted) {
                row.aborted = true;
                return row;
            }
            const Metrics metrics = compute_metrics(trace);
            row.segments_total = static_cast<int>(metrics.segments.size());
            double sum = 0.0;
            for (const auto& seg : metrics.segments) {
                if (seg.reached) {
                    ++row.segments_reached;
                    sum += seg.convergence_time;
                }
                row.max_fluctuation_band = std::max(row.max_fluctuation_band, seg.fluctuation_band);
            }
            if (row.segments_reached > 0) row.mean_convergence_time = sum / row.segments_reached;
            row.max_angle_step = metrics.max_angle_step;
            return row;
        }));
    }

    std::string table = "parameter,value,aborted,segments_reached,segments_total,"
                        "mean_convergence_time,max_angle_step,max_fluctuation_band,final_r\n";
    for (auto& future : futures) {
        const Row row = future.get();
        table += parameter;
        table += ',' + detail::format_double(row.value);
        table += row.aborted ? ",1" : ",0";
        table += ',' + std::to_string(row.segments_reached);
        table += ',' + std::to_string(row.segments_total);
        table += ',' + detail::format_double(row.mean_convergence_time);
        table += ',' + detail::format_double(row.max_angle_step);
        table += ',' + detail::format_double(row.max_fluctuation_band);
        table += ',' + detail::format_double(row.final_r);
        table += '\n';
    }

    const std::string out_dir = out_override.value_or(base.output_dir);
    std::filesystem::create_directories(out_dir);
    std::ofstream file((std::filesystem::path(out_dir) / "sweep.csv").string());
    file << table;
    out << table;
    return kExitOk;
}

inline int cmd_print_config(const std::string& config_path, std::ostream& out = std::cout,
                            std::ostream& diag = std::cerr) {
    try {
        const RunConfig config = load_run_config(config_path);
        out << to_json(config).dump(2) << "\n";
    } catch (const std::exception& e) {
        diag << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace magpair
