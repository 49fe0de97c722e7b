#pragma once

// Binned count series and its CSV form.
//
// CSV layout: optional "# key=value" metadata lines, then the header
// "bin_index,bin_start_s,counts" and one row per bin. Known metadata keys:
// kind, bin_duration_s, stage_velocity_m_s, fold_factor, pump_wavelength_m,
// distance_m. Unknown keys are kept in `extra`.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pathid {

struct FringeTrace {
    std::vector<double> counts;    // per bin; integral for measured/simulated data
    double bin_duration = 0.0;     // s
    double stage_velocity = 0.0;   // m/s, 0 if unknown
    double fold_factor = 2.0;
    double pump_wavelength = 0.0;  // m, 0 if unknown
    double distance = -1.0;        // m, < 0 if unknown
    std::string kind;              // "coincidences", "signal", "idler", ...
    std::map<std::string, std::string> extra;

    std::size_t size() const noexcept { return counts.size(); }
    double total() const;
};

void write_trace_csv(std::ostream& out, const FringeTrace& trace);
FringeTrace read_trace_csv(std::istream& in);

void write_trace_file(const std::filesystem::path& path, const FringeTrace& trace);
FringeTrace read_trace_file(const std::filesystem::path& path);

}  // namespace pathid
