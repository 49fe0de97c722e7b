#include "pathid/tag_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "pathid/error.hpp"

namespace pathid::tagio {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'T', 'A', 'G'};

void put_u64_le(char* dst, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) dst[b] = static_cast<char>((v >> (8 * b)) & 0xffu);
}

std::uint64_t get_u64_le(const unsigned char* src) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | src[b];
    return v;
}

TagPair split(const std::vector<TimeTag>& tags) {
    TagPair out;
    out.signal.channel = Channel::signal;
    out.idler.channel = Channel::idler;
    Picoseconds last = 0;
    for (const auto& t : tags) {
        (t.channel == Channel::signal ? out.signal : out.idler).timestamps.push_back(t.timestamp);
        last = std::max(last, t.timestamp);
    }
    const Picoseconds duration = tags.empty() ? 0 : last + 1;
    out.signal.metadata.duration = duration;
    out.idler.metadata.duration = duration;
    return out;
}

Channel channel_from_code(unsigned code, std::size_t record) {
    if (code > 1) {
        throw ParseError("invalid channel code " + std::to_string(code) + " in record " + std::to_string(record));
    }
    return static_cast<Channel>(code);
}

}  // namespace

void write_binary(std::ostream& out, const TimeTagStream& signal, const TimeTagStream& idler) {
    std::array<char, kHeaderSize> header{};
    std::copy(kMagic.begin(), kMagic.end(), header.begin());
    header[4] = static_cast<char>(kBinaryVersion & 0xffu);
    header[5] = static_cast<char>(kBinaryVersion >> 8);
    out.write(header.data(), header.size());

    std::array<char, kRecordSize> rec{};
    for (const auto& tag : merge_streams(signal, idler)) {
        rec[0] = static_cast<char>(tag.channel);
        put_u64_le(rec.data() + 1, tag.timestamp);
        out.write(rec.data(), rec.size());
    }
}

TagPair read_binary(std::istream& in) {
    std::array<unsigned char, kHeaderSize> header{};
    if (!in.read(reinterpret_cast<char*>(header.data()), header.size())) {
        throw ParseError("tag file shorter than its 16-byte header");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), header.begin())) throw ParseError("bad tag file magic");
    const unsigned version = header[4] | (header[5] << 8);
    if (version != kBinaryVersion) throw ParseError("unsupported tag file version " + std::to_string(version));

    std::vector<TimeTag> tags;
    std::array<unsigned char, kRecordSize> rec{};
    while (in.read(reinterpret_cast<char*>(rec.data()), rec.size())) {
        tags.push_back({channel_from_code(rec[0], tags.size()), get_u64_le(rec.data() + 1)});
    }
    if (in.gcount() != 0) throw ParseError("truncated record at end of tag file");
    return split(tags);
}

void write_csv(std::ostream& out, const TimeTagStream& signal, const TimeTagStream& idler) {
    out << "channel,timestamp_ps\n";
    for (const auto& tag : merge_streams(signal, idler)) {
        out << static_cast<unsigned>(tag.channel) << ',' << tag.timestamp << '\n';
    }
}

TagPair read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("channel,timestamp_ps", 0) != 0) {
        throw ParseError("tag CSV must start with header 'channel,timestamp_ps'");
    }
    std::vector<TimeTag> tags;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        unsigned code = 0;
        std::uint64_t ts = 0;
        const char* end = line.data() + line.size();
        bool ok = comma != std::string::npos;
        if (ok) {
            auto r1 = std::from_chars(line.data(), line.data() + comma, code);
            auto r2 = std::from_chars(line.data() + comma + 1, end, ts);
            ok = r1.ec == std::errc{} && r1.ptr == line.data() + comma && r2.ec == std::errc{} && r2.ptr == end;
        }
        if (!ok) throw ParseError("malformed tag CSV line " + std::to_string(lineno) + ": '" + line + "'");
        tags.push_back({channel_from_code(code, tags.size()), ts});
    }
    return split(tags);
}

void write_file(const std::filesystem::path& path, const TimeTagStream& signal, const TimeTagStream& idler) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (path.extension() == ".csv") {
        write_csv(out, signal, idler);
    } else {
        write_binary(out, signal, idler);
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

TagPair read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::array<char, 4> head{};
    in.read(head.data(), head.size());
    const bool binary = in.gcount() == 4 && head == kMagic;
    in.clear();
    in.seekg(0);
    return binary ? read_binary(in) : read_csv(in);
}

}  // namespace pathid::tagio
