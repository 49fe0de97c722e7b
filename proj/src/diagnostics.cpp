#include "pathid/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace pathid::diag {

namespace {

std::mutex g_sink_mutex;

WarningSink& sink_ref() {
    static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

void warn(std::string_view message) {
    std::lock_guard lock(g_sink_mutex);
    if (auto& sink = sink_ref()) sink(message);
}

WarningSink set_warning_sink(WarningSink sink) {
    std::lock_guard lock(g_sink_mutex);
    WarningSink previous = std::move(sink_ref());
    sink_ref() = std::move(sink);
    return previous;
}

}  // namespace pathid::diag
