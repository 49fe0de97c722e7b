#pragma once

// Two-channel coincidence counting over sorted time-tag streams.
//
// Greedy mode is a single two-pointer merge: compare the two stream heads,
// drop the earlier one if it is out of window, otherwise match both. Each tag
// is used at most once and the count is symmetric under channel exchange.
// All-pairs mode counts every (signal, idler) pair inside the window.
//
// `count_coincidences` is the sequential reference. The OpenMP variant splits
// the streams at quiet gaps longer than the window half-width, where no match
// can cross, so it returns exactly the same result.

#include <optional>
#include <utility>
#include <vector>

#include "pathid/fringe_trace.hpp"
#include "pathid/time_tags.hpp"

namespace pathid::coincidence {

// total_width: |dt| <= t_c / 2 (window of total width t_c; accidentals C_A C_B t_c).
// half_width:  |dt| <= t_c.
enum class WindowSpan { total_width, half_width };

enum class MatchMode { greedy, all_pairs };

struct MatchOptions {
    Picoseconds window = 1500;
    WindowSpan span = WindowSpan::total_width;
    MatchMode mode = MatchMode::greedy;
    bool keep_pairs = false;

    // Largest |dt| that still matches, in units of 0.5 ps (exact for odd windows).
    Picoseconds max_delta_half_ps() const noexcept { return span == WindowSpan::total_width ? window : 2 * window; }
    double half_width_seconds() const noexcept { return to_seconds(max_delta_half_ps()) / 2.0; }
};

struct CoincidenceResult {
    std::uint64_t total = 0;
    // Earlier timestamp of each matched pair, in match order (nondecreasing for greedy).
    std::vector<Picoseconds> event_times;
    std::vector<std::pair<Picoseconds, Picoseconds>> matched_pairs;  // (t_signal, t_idler) if kept
};

CoincidenceResult count_coincidences(const TimeTagStream& signal, const TimeTagStream& idler,
                                     const MatchOptions& options);

// Same result as count_coincidences; `segments` = 0 picks one per thread x 4.
CoincidenceResult count_coincidences_parallel(const TimeTagStream& signal, const TimeTagStream& idler,
                                              const MatchOptions& options, std::size_t segments = 0);

// Counts per consecutive bin of width `bin_width` over [0, duration); the last
// partial bin is dropped and later events are ignored.
std::vector<double> bin_times(const std::vector<Picoseconds>& times, Picoseconds bin_width, Picoseconds duration);

FringeTrace bin_counts(const std::vector<Picoseconds>& times, double bin_width_s, double duration_s);
FringeTrace bin_counts(const TimeTagStream& stream, double bin_width_s, double duration_s);
FringeTrace bin_counts(const CoincidenceResult& result, double bin_width_s, double duration_s);

// Delayed-window accidental estimate: coincidence rate after delaying the idler
// by `offset`, normalized by the overlapping exposure. Uses the signal stream's
// metadata duration.
double accidental_estimate(const TimeTagStream& signal, const TimeTagStream& idler, const MatchOptions& options,
                           Picoseconds offset);

}  // namespace pathid::coincidence
