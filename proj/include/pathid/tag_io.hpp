#pragma once

// Time-tag file formats.
//
// Binary (".ptag"): 16-byte header
//     bytes 0..3   magic "PTAG"
//     bytes 4..5   version, u16 little-endian (currently 1)
//     bytes 6..15  reserved, written as zero
// followed by 9-byte records
//     byte  0      channel (0 = signal, 1 = idler)
//     bytes 1..8   timestamp, u64 little-endian picoseconds
// Records are written in merged time order.
//
// CSV: header line "channel,timestamp_ps", one record per line, same channel
// codes.

#include <filesystem>
#include <iosfwd>
#include <utility>

#include "pathid/time_tags.hpp"

namespace pathid::tagio {

inline constexpr std::uint16_t kBinaryVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kRecordSize = 9;

struct TagPair {
    TimeTagStream signal;
    TimeTagStream idler;
};

void write_binary(std::ostream& out, const TimeTagStream& signal, const TimeTagStream& idler);
TagPair read_binary(std::istream& in);

void write_csv(std::ostream& out, const TimeTagStream& signal, const TimeTagStream& idler);
TagPair read_csv(std::istream& in);

void write_file(const std::filesystem::path& path, const TimeTagStream& signal, const TimeTagStream& idler);

// Chooses the format by content: binary if the file starts with "PTAG".
// The returned streams carry duration = last timestamp + 1 ps unless the caller
// overrides it.
TagPair read_file(const std::filesystem::path& path);

}  // namespace pathid::tagio
