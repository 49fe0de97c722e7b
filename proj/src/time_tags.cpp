#include "pathid/time_tags.hpp"

namespace pathid {

std::string_view to_string(Channel channel) noexcept {
    return channel == Channel::signal ? "signal" : "idler";
}

std::vector<TimeTag> merge_streams(const TimeTagStream& signal, const TimeTagStream& idler) {
    std::vector<TimeTag> out;
    out.reserve(signal.size() + idler.size());
    std::size_t i = 0, j = 0;
    const auto& s = signal.timestamps;
    const auto& d = idler.timestamps;
    while (i < s.size() || j < d.size()) {
        if (j == d.size() || (i < s.size() && s[i] <= d[j])) {
            out.push_back({Channel::signal, s[i++]});
        } else {
            out.push_back({Channel::idler, d[j++]});
        }
    }
    return out;
}

}  // namespace pathid
