#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "jasper/app.hpp"
#include "jasper/diagnostics.hpp"

namespace jasper::test {

namespace fs = std::filesystem;

inline const fs::path kFixtures = JASPER_FIXTURES_DIR;
inline const fs::path kDemo = JASPER_DEMO_DIR;

/// A scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("jasper-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const fs::path& rel) const { return path_ / rel; }

private:
    fs::path path_;
};

inline fs::path write_file(const fs::path& path, std::string_view content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

/// Copies the demo application into `dir` so tests can write its spool.
inline void copy_demo(const fs::path& dir) {
    fs::copy(kDemo, dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

inline std::string random_string(std::mt19937& rng, std::string_view alphabet,
                                 std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s(len(rng), '\0');
    for (auto& c : s) c = alphabet[pick(rng)];
    return s;
}

inline std::string random_bytes(std::mt19937& rng, std::size_t min_len, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<int> byte(0, 255);
    std::string s(len(rng), '\0');
    for (auto& c : s) c = static_cast<char>(byte(rng));
    return s;
}

/// Lines dense in bracket edge cases: `[[`, `]]`, `[[[`, unterminated openers,
/// colons and equals signs.
inline std::string random_template_line(std::mt19937& rng) {
    static const std::vector<std::string> pieces = {
        "[[", "]]", "[", "]", "[[[", "]]]", ":", "=", "a", "b", "x", " ", "<p>", "</p>",
        "[[a]]", "[[b:c]]", "[[:z]]", "[[]]", "[[x:y:z]]", "\t", "é",
    };
    std::uniform_int_distribution<std::size_t> count(0, 12);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::string s;
    for (auto n = count(rng); n > 0; --n) s += pieces[pick(rng)];
    return s;
}

/// Records diagnostics while alive.
class CaptureDiagnostics {
public:
    CaptureDiagnostics()
        : previous_(set_diagnostic_sink([this](std::string_view m) { messages.emplace_back(m); })) {}
    ~CaptureDiagnostics() { set_diagnostic_sink(previous_); }

    std::vector<std::string> messages;

private:
    DiagnosticSink previous_;
};

class RecordingTransport : public app::EmailTransport {
public:
    explicit RecordingTransport(bool succeed = true) : succeed_(succeed) {}
    bool send(const app::EmailMessage& m) override {
        sent.push_back(m);
        return succeed_;
    }
    std::vector<app::EmailMessage> sent;

private:
    bool succeed_;
};

} // namespace jasper::test
