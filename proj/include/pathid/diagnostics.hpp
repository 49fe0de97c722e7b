#pragma once

#include <functional>
#include <string_view>

namespace pathid::diag {

using WarningSink = std::function<void(std::string_view)>;

// Emits a non-fatal model warning. Default sink writes "warning: ..." to stderr.
void warn(std::string_view message);

// Replaces the sink; returns the previous one. Passing an empty function
// silences warnings.
WarningSink set_warning_sink(WarningSink sink);

// RAII capture used by tests and the CLI's --quiet mode.
class ScopedWarningSink {
public:
    explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
    ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
    ScopedWarningSink(const ScopedWarningSink&) = delete;
    ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
    WarningSink previous_;
};

}  // namespace pathid::diag
