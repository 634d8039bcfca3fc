#pragma once

#include <functional>
#include <string>

namespace electmap {

// Non-fatal problems (ragged rows, ignored files, winner ties) go through
// one process-wide sink. Defaults to stderr.
using WarningSink = std::function<void(const std::string&)>;

void warn(const std::string& message);

// Returns the previous sink.
WarningSink set_warning_sink(WarningSink sink);

// Restores the previous sink on destruction.
class ScopedWarningSink {
public:
  explicit ScopedWarningSink(WarningSink sink) : previous_(set_warning_sink(std::move(sink))) {}
  ~ScopedWarningSink() { set_warning_sink(std::move(previous_)); }
  ScopedWarningSink(const ScopedWarningSink&) = delete;
  ScopedWarningSink& operator=(const ScopedWarningSink&) = delete;

private:
  WarningSink previous_;
};

} // namespace electmap
