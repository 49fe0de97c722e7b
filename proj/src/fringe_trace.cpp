#include "pathid/fringe_trace.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "pathid/error.hpp"

namespace pathid {

namespace {

double parse_double(std::string_view text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("bad number '" + std::string(text) + "' in " + what);
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

double FringeTrace::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

void write_trace_csv(std::ostream& out, const FringeTrace& trace) {
    if (!trace.kind.empty()) out << "# kind=" << trace.kind << '\n';
    out << fmt::format("# bin_duration_s={}\n", trace.bin_duration);
    if (trace.stage_velocity > 0.0) out << fmt::format("# stage_velocity_m_s={}\n", trace.stage_velocity);
    out << fmt::format("# fold_factor={}\n", trace.fold_factor);
    if (trace.pump_wavelength > 0.0) out << fmt::format("# pump_wavelength_m={}\n", trace.pump_wavelength);
    if (trace.distance >= 0.0) out << fmt::format("# distance_m={}\n", trace.distance);
    for (const auto& [k, v] : trace.extra) out << "# " << k << '=' << v << '\n';
    out << "bin_index,bin_start_s,counts\n";
    for (std::size_t i = 0; i < trace.counts.size(); ++i) {
        out << fmt::format("{},{},{}\n", i, static_cast<double>(i) * trace.bin_duration, trace.counts[i]);
    }
}

FringeTrace read_trace_csv(std::istream& in) {
    FringeTrace trace;
    std::string line;
    bool header_seen = false;
    std::vector<double> starts;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '#') {
            sv = trim(sv.substr(1));
            const auto eq = sv.find('=');
            if (eq == std::string_view::npos) continue;
            const std::string key(trim(sv.substr(0, eq)));
            const std::string_view value = trim(sv.substr(eq + 1));
            const std::string what = "trace metadata '" + key + "'";
            if (key == "kind") trace.kind = value;
            else if (key == "bin_duration_s") trace.bin_duration = parse_double(value, what);
            else if (key == "stage_velocity_m_s") trace.stage_velocity = parse_double(value, what);
            else if (key == "fold_factor") trace.fold_factor = parse_double(value, what);
            else if (key == "pump_wavelength_m") trace.pump_wavelength = parse_double(value, what);
            else if (key == "distance_m") trace.distance = parse_double(value, what);
            else trace.extra[key] = value;
            continue;
        }
        if (!header_seen) {
            if (sv.rfind("bin_index,bin_start_s,counts", 0) != 0) {
                throw ParseError("trace CSV line " + std::to_string(lineno) +
                                 ": expected header 'bin_index,bin_start_s,counts'");
            }
            header_seen = true;
            continue;
        }
        const auto c1 = sv.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : sv.find(',', c1 + 1);
        if (c2 == std::string_view::npos) {
            throw ParseError("trace CSV line " + std::to_string(lineno) + ": expected 3 columns");
        }
        const std::string where = "trace CSV line " + std::to_string(lineno);
        const double index = parse_double(sv.substr(0, c1), where);
        if (index != static_cast<double>(trace.counts.size())) {
            throw ParseError(where + ": bin_index out of sequence");
        }
        starts.push_back(parse_double(sv.substr(c1 + 1, c2 - c1 - 1), where));
        const double count = parse_double(sv.substr(c2 + 1), where);
        if (count < 0.0) throw ParseError(where + ": negative count");
        trace.counts.push_back(count);
    }
    if (!header_seen) throw ParseError("trace CSV has no header");
    if (trace.bin_duration <= 0.0 && starts.size() >= 2) trace.bin_duration = starts[1] - starts[0];
    return trace;
}

void write_trace_file(const std::filesystem::path& path, const FringeTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_trace_csv(out, trace);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

FringeTrace read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_trace_csv(in);
}

}  // namespace pathid
