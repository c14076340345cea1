#include "jasper/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace jasper {
namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

DiagnosticSink& sink() {
    static DiagnosticSink s;
    return s;
}

} // namespace

DiagnosticSink set_diagnostic_sink(DiagnosticSink next) {
    std::lock_guard lock(sink_mutex());
    return std::exchange(sink(), std::move(next));
}

DiagnosticSink stderr_sink() {
    return [](std::string_view msg) { std::cerr << "jasper: " << msg << '\n'; };
}

void diagnostic(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()(message);
}

} // namespace jasper
