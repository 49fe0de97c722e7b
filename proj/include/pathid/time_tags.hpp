#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pathid {

using Picoseconds = std::uint64_t;

inline constexpr double kPicosecondsPerSecond = 1e12;

inline Picoseconds to_ps(double seconds) {
    return static_cast<Picoseconds>(std::llround(seconds * kPicosecondsPerSecond));
}

inline double to_seconds(Picoseconds ps) { return static_cast<double>(ps) / kPicosecondsPerSecond; }

enum class Channel : std::uint8_t { signal = 0, idler = 1 };

std::string_view to_string(Channel channel) noexcept;

struct TimeTag {
    Channel channel = Channel::signal;
    Picoseconds timestamp = 0;

    friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

struct StreamMetadata {
    Picoseconds duration = 0;
    std::uint64_t seed = 0;
    std::string scenario_id;

    friend bool operator==(const StreamMetadata&, const StreamMetadata&) = default;
};

// Detections of one channel, nondecreasing in time.
struct TimeTagStream {
    Channel channel = Channel::signal;
    std::vector<Picoseconds> timestamps;
    StreamMetadata metadata;

    std::size_t size() const noexcept { return timestamps.size(); }
    bool empty() const noexcept { return timestamps.empty(); }
    bool is_sorted() const { return std::is_sorted(timestamps.begin(), timestamps.end()); }
    double rate() const {
        return metadata.duration == 0 ? 0.0 : static_cast<double>(size()) / to_seconds(metadata.duration);
    }

    friend bool operator==(const TimeTagStream&, const TimeTagStream&) = default;
};

// Interleaves both channels by time (signal first on ties).
std::vector<TimeTag> merge_streams(const TimeTagStream& signal, const TimeTagStream& idler);

}  // namespace pathid
