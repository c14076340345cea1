#pragma once

#include <functional>
#include <string_view>

namespace jasper {

using DiagnosticSink = std::function<void(std::string_view)>;

/// Replaces the process-wide diagnostic sink and returns the previous one.
/// A null sink, the default, discards messages.
DiagnosticSink set_diagnostic_sink(DiagnosticSink sink);

void diagnostic(std::string_view message);

/// Sink writing `jasper: <message>` lines to stderr.
DiagnosticSink stderr_sink();

} // namespace jasper
