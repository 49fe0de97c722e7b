#include "pathid/coincidence.hpp"

#include <algorithm>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pathid/error.hpp"

namespace pathid::coincidence {

namespace {

using Stamps = std::vector<Picoseconds>;

struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
};

[[noreturn]] void unsorted(Channel ch, std::size_t index) {
    throw OrderingError(std::string(to_string(ch)) + " stream is not sorted at index " + std::to_string(index));
}

void check_tail(const Stamps& v, std::size_t from, std::size_t to, Channel ch) {
    for (std::size_t k = std::max<std::size_t>(from, 1); k < to; ++k) {
        if (v[k] < v[k - 1]) unsorted(ch, k);
    }
}

inline bool in_window(Picoseconds a, Picoseconds b, Picoseconds max_delta_half) {
    const Picoseconds diff = a > b ? a - b : b - a;
    return 2 * diff <= max_delta_half;
}

void match_greedy(const Stamps& s, Range rs, const Stamps& d, Range rd, const MatchOptions& opt,
                  CoincidenceResult& out) {
    const Picoseconds m = opt.max_delta_half_ps();
    std::size_t i = rs.begin, j = rd.begin;
    Picoseconds last_s = i > 0 ? s[i - 1] : 0;
    Picoseconds last_d = j > 0 ? d[j - 1] : 0;
    while (i < rs.end && j < rd.end) {
        const Picoseconds a = s[i];
        const Picoseconds b = d[j];
        if (a < last_s) unsorted(Channel::signal, i);
        if (b < last_d) unsorted(Channel::idler, j);
        last_s = a;
        last_d = b;
        if (in_window(a, b, m)) {
            ++out.total;
            out.event_times.push_back(std::min(a, b));
            if (opt.keep_pairs) out.matched_pairs.emplace_back(a, b);
            ++i;
            ++j;
        } else if (a < b) {
            ++i;
        } else {
            ++j;
        }
    }
    check_tail(s, i, rs.end, Channel::signal);
    check_tail(d, j, rd.end, Channel::idler);
}

void match_all_pairs(const Stamps& s, Range rs, const Stamps& d, Range rd, const MatchOptions& opt,
                     CoincidenceResult& out) {
    const Picoseconds m = opt.max_delta_half_ps();
    check_tail(s, rs.begin, rs.end, Channel::signal);
    check_tail(d, rd.begin, rd.end, Channel::idler);
    std::size_t lo = rd.begin;
    for (std::size_t i = rs.begin; i < rs.end; ++i) {
        const Picoseconds a = s[i];
        while (lo < rd.end && d[lo] < a && !in_window(a, d[lo], m)) ++lo;
        for (std::size_t k = lo; k < rd.end && (d[k] <= a || in_window(a, d[k], m)); ++k) {
            ++out.total;
            out.event_times.push_back(std::min(a, d[k]));
            if (opt.keep_pairs) out.matched_pairs.emplace_back(a, d[k]);
        }
    }
}

void match_range(const Stamps& s, Range rs, const Stamps& d, Range rd, const MatchOptions& opt,
                 CoincidenceResult& out) {
    if (opt.mode == MatchMode::greedy) {
        match_greedy(s, rs, d, rd, opt, out);
    } else {
        match_all_pairs(s, rs, d, rd, opt, out);
    }
}

void validate(const MatchOptions& opt) {
    if (opt.window == 0) throw DomainError("coincidence window must be > 0");
}

// First cut time >= t such that every tag before it is more than the match
// half-width away from every tag at or after it. Returns max() if none exists.
Picoseconds find_quiet_cut(const Stamps& s, const Stamps& d, Picoseconds t, Picoseconds max_delta_half) {
    std::size_t i = std::lower_bound(s.begin(), s.end(), t) - s.begin();
    std::size_t j = std::lower_bound(d.begin(), d.end(), t) - d.begin();
    bool have_prev = i > 0 || j > 0;
    Picoseconds prev = std::max(i > 0 ? s[i - 1] : 0, j > 0 ? d[j - 1] : 0);
    while (i < s.size() || j < d.size()) {
        const bool take_s = j == d.size() || (i < s.size() && s[i] <= d[j]);
        const Picoseconds next = take_s ? s[i] : d[j];
        if (!have_prev || 2 * (next - prev) > max_delta_half) return next;
        prev = next;
        have_prev = true;
        take_s ? ++i : ++j;
    }
    return std::numeric_limits<Picoseconds>::max();
}

}  // namespace

CoincidenceResult count_coincidences(const TimeTagStream& signal, const TimeTagStream& idler,
                                     const MatchOptions& options) {
    validate(options);
    CoincidenceResult out;
    match_range(signal.timestamps, {0, signal.size()}, idler.timestamps, {0, idler.size()}, options, out);
    return out;
}

CoincidenceResult count_coincidences_parallel(const TimeTagStream& signal, const TimeTagStream& idler,
                                              const MatchOptions& options, std::size_t segments) {
    validate(options);
    const Stamps& s = signal.timestamps;
    const Stamps& d = idler.timestamps;
    if (auto it = std::is_sorted_until(s.begin(), s.end()); it != s.end()) unsorted(Channel::signal, it - s.begin());
    if (auto it = std::is_sorted_until(d.begin(), d.end()); it != d.end()) unsorted(Channel::idler, it - d.begin());

    if (segments == 0) {
#ifdef _OPENMP
        segments = 4 * static_cast<std::size_t>(omp_get_max_threads());
#else
        segments = 1;
#endif
    }
    const Picoseconds t_end = std::max(s.empty() ? 0 : s.back(), d.empty() ? 0 : d.back()) + 1;
    segments = std::max<std::size_t>(1, std::min<std::size_t>(segments, (s.size() + d.size()) / 1024 + 1));

    std::vector<Picoseconds> cuts{0};
    for (std::size_t k = 1; k < segments; ++k) {
        const Picoseconds nominal = t_end / segments * k;
        const Picoseconds cut = find_quiet_cut(s, d, std::max(nominal, cuts.back()), options.max_delta_half_ps());
        if (cut >= t_end) break;
        if (cut > cuts.back()) cuts.push_back(cut);
    }
    cuts.push_back(std::numeric_limits<Picoseconds>::max());

    const std::size_t n_seg = cuts.size() - 1;
    std::vector<CoincidenceResult> partial(n_seg);
    const auto index_of = [](const Stamps& v, Picoseconds t) {
        return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
    };

#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_seg); ++k) {
        const Range rs{index_of(s, cuts[k]), index_of(s, cuts[k + 1])};
        const Range rd{index_of(d, cuts[k]), index_of(d, cuts[k + 1])};
        match_range(s, rs, d, rd, options, partial[k]);
    }

    CoincidenceResult out;
    std::size_t n_events = 0;
    for (const auto& p : partial) n_events += p.event_times.size();
    out.event_times.reserve(n_events);
    for (auto& p : partial) {
        out.total += p.total;
        out.event_times.insert(out.event_times.end(), p.event_times.begin(), p.event_times.end());
        out.matched_pairs.insert(out.matched_pairs.end(), p.matched_pairs.begin(), p.matched_pairs.end());
    }
    return out;
}

std::vector<double> bin_times(const std::vector<Picoseconds>& times, Picoseconds bin_width, Picoseconds duration) {
    if (bin_width == 0) throw DomainError("bin width must be > 0");
    const std::size_t n_bins = duration / bin_width;
    std::vector<double> counts(n_bins, 0.0);
    for (const Picoseconds t : times) {
        const std::size_t b = t / bin_width;
        if (b < n_bins) counts[b] += 1.0;
    }
    return counts;
}

FringeTrace bin_counts(const std::vector<Picoseconds>& times, double bin_width_s, double duration_s) {
    if (!(bin_width_s > 0.0)) throw DomainError("t_int must be > 0");
    if (!(duration_s >= 0.0)) throw DomainError("duration must be >= 0");
    FringeTrace trace;
    trace.bin_duration = bin_width_s;
    // guard against 70 s / 70 ms landing one ulp short of 1000 bins
    const Picoseconds width = to_ps(bin_width_s);
    const Picoseconds duration = to_ps(duration_s);
    trace.counts = bin_times(times, width, duration);
    return trace;
}

FringeTrace bin_counts(const TimeTagStream& stream, double bin_width_s, double duration_s) {
    FringeTrace trace = bin_counts(stream.timestamps, bin_width_s, duration_s);
    trace.kind = std::string(to_string(stream.channel));
    return trace;
}

FringeTrace bin_counts(const CoincidenceResult& result, double bin_width_s, double duration_s) {
    FringeTrace trace = bin_counts(result.event_times, bin_width_s, duration_s);
    trace.kind = "coincidences";
    return trace;
}

double accidental_estimate(const TimeTagStream& signal, const TimeTagStream& idler, const MatchOptions& options,
                           Picoseconds offset) {
    const Picoseconds duration = signal.metadata.duration;
    if (duration <= offset) throw DomainError("accidental_estimate: offset must be shorter than the stream duration");
    if (idler.empty() || signal.empty()) return 0.0;
    TimeTagStream shifted = idler;
    for (auto& t : shifted.timestamps) t += offset;
    const auto result = count_coincidences(signal, shifted, options);
    return static_cast<double>(result.total) / to_seconds(duration - offset);
}

}  // namespace pathid::coincidence
