// CSV serialization of traces. Numbers are written with std::to_chars
// (shortest representation that round-trips exactly, locale-independent, dot
// decimal separator); a stride-1 trace read back compares bit-identical.
// Column order is fixed: t, r, r_des, psi_cmd, psi_applied, phi, clamped, branch.
#pragma once

#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "magpair/scenario.hpp"

namespace magpair {

inline constexpr std::string_view kTraceCsvHeader =
    "t,r,r_des,psi_cmd,psi_applied,phi,clamped,branch";

namespace detail {

inline void append_double(std::string& out, double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw std::runtime_error("trace_io: number formatting failed");
    out.append(buf, ptr);
}

inline double parse_double(std::string_view field) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw std::runtime_error("trace_io: malformed numeric field '" + std::string(field) + "'");
    }
    return value;
}

inline EnvelopeBranch parse_branch(std::string_view field) {
    if (field == "repulsion") return EnvelopeBranch::Repulsion;
    if (field == "attraction") return EnvelopeBranch::Attraction;
    if (field == "inner") return EnvelopeBranch::Inner;
    throw std::runtime_error("trace_io: unknown branch '" + std::string(field) + "'");
}

}  // namespace detail

/// Writes every stride-th record (the final record is always written).
inline void write_trace_csv(std::ostream& os, const Trace& trace, int stride = 1) {
    if (stride < 1) throw std::domain_error("write_trace_csv: stride must be >= 1");
    std::string line;
    line.reserve(160);
    os << kTraceCsvHeader << '\n';
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        if (i % static_cast<std::size_t>(stride) != 0 && i + 1 != trace.records.size()) continue;
        const auto& rec = trace.records[i];
        line.clear();
        detail::append_double(line, rec.t);
        line.push_back(',');
        detail::append_double(line, rec.r);
        line.push_back(',');
        detail::append_double(line, rec.r_des);
        line.push_back(',');
        detail::append_double(line, rec.psi_cmd);
        line.push_back(',');
        detail::append_double(line, rec.psi_applied);
        line.push_back(',');
        detail::append_double(line, rec.phi);
        line.push_back(',');
        line.push_back(rec.clamped ? '1' : '0');
        line.push_back(',');
        line.append(branch_name(rec.branch));
        line.push_back('\n');
        os << line;
    }
}

inline void write_trace_csv(const std::string& path, const Trace& trace, int stride = 1) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("write_trace_csv: cannot open " + path);
    write_trace_csv(file, trace, stride);
}

/// Reads records back (segments/duration metadata are not part of the CSV).
inline Trace read_trace_csv(std::istream& is) {
    Trace trace;
    std::string line;
    if (!std::getline(is, line) || line != kTraceCsvHeader) {
        throw std::runtime_error("read_trace_csv: missing or unexpected header");
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::string_view rest = line;
        TraceRecord rec;
        auto next = [&]() {
            const auto pos = rest.find(',');
            if (pos == std::string_view::npos) {
                const auto field = rest;
                rest = {};
                return field;
            }
            const auto field = rest.substr(0, pos);
            rest.remove_prefix(pos + 1);
            return field;
        };
        rec.t = detail::parse_double(next());
        rec.r = detail::parse_double(next());
        rec.r_des = detail::parse_double(next());
        rec.psi_cmd = detail::parse_double(next());
        rec.psi_applied = detail::parse_double(next());
        rec.phi = detail::parse_double(next());
        const auto clamped = next();
        if (clamped != "0" && clamped != "1") {
            throw std::runtime_error("read_trace_csv: malformed clamped flag");
        }
        rec.clamped = clamped == "1";
        rec.branch = detail::parse_branch(next());
        if (!rest.empty()) throw std::runtime_error("read_trace_csv: trailing fields");
        trace.records.push_back(rec);
    }
    return trace;
}

inline Trace read_trace_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw std::runtime_error("read_trace_csv: cannot open " + path);
    return read_trace_csv(file);
}

}  // namespace magpair
