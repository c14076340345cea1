#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jasper/error.hpp"
#include "jasper/properties.hpp"
#include "jasper/server.hpp"
#include "jasper/template.hpp"

namespace jasper::speccheck {

class HarnessError : public Error {
public:
    using Error::Error;
};

/// A file with a file pointer: `lines` keep their LF terminators (the last
/// one may lack it) and `pointer` is 1-based, 0 meaning consumed and closed.
struct FileModel {
    std::size_t pointer = 1;
    std::vector<std::string> lines;

    /// CRLF is normalised to LF. "" has zero lines.
    static FileModel from_text(std::string_view text);
    static FileModel load(const std::filesystem::path& path);
};

/// Reference implementation of file processing, written independently of the
/// engine: a character-at-a-time scanner with its own dispatch loop. Requires
/// `file.pointer == 1`; leaves it at 0.
std::string oracle_process_file(FileModel& file, const ResolverChain& chain,
                                PropertyMap& props);

/// A property the map must have: bound to `value`, or absent when nullopt.
struct EntryAssertion {
    std::string key;
    std::optional<std::string> value;
};

struct ReturnCheck {
    enum class Kind {
        Equals,
        Contains,
        Excludes,
        Unmatched,
        Exclaim,    // `!` in the exclaim span belonging to field `arg`
        NoExclaim,  // that span is empty
        Hidden,     // hidden input `arg` = "name=value"
        Input,      // text input or textarea `arg` = "name=value"
    };
    Kind kind = Kind::Equals;
    std::string arg;

    std::string describe() const;
};

struct Assertion {
    std::vector<EntryAssertion> entries;
    std::vector<ReturnCheck> return_checks;
    /// Number of messages handed to the email transport by the operation.
    std::optional<std::size_t> sent;
};

struct Operation {
    std::string name;
    std::string arg;
};

struct HoareTriple {
    std::string name;
    Assertion pre;
    Operation op;
    Assertion post;
};

/// Parses the triple file format:
///
///     # comment
///     [pre]
///     VAR.vExclaim=comments     bound entry
///     !FORM.comments            absent entry
///     [op]
///     form_errors_handler EXCLAIM:comments
///     [post]
///     VAR.vExclaim=comments
///     [return]
///     equals !
///     [effects]
///     sent 0
///
/// Return checks: `equals X`, `contains X`, `excludes X`, `unmatched`,
/// `exclaim FIELD`, `no-exclaim FIELD`, `hidden NAME=VALUE`,
/// `input NAME=VALUE`. Values may use `@ROOT@` for the harness root.
HoareTriple parse_triple(std::string_view text, std::string name);
HoareTriple load_triple(const std::filesystem::path& path);

struct TripleReport {
    bool passed = false;
    /// First violated assertion, empty on success.
    std::string message;
};

struct OpResult {
    /// nullopt when a handler did not claim the token.
    std::optional<std::string> value;
};

/// Runs triples against the real operations. The server configuration
/// supplies the root directory and config files for `main`, `preprocess`
/// and the handlers that read templates.
class Harness {
public:
    explicit Harness(server::ServerConfig cfg);

    /// Builds a map holding exactly the bound `pre` entries, runs the
    /// operation, then checks `post`, the frame (pre entries not named in
    /// `post` keep their values), the email count and the return checks.
    /// Throws HarnessError for an unknown operation.
    TripleReport check(const HoareTriple& triple) const;

    std::vector<std::string> operation_names() const;
    const server::ServerConfig& config() const noexcept { return cfg_; }

private:
    struct CountingTransport;

    server::ServerConfig cfg_;
    std::map<std::string, std::function<OpResult(PropertyMap&, std::string_view,
                                                 CountingTransport&)>>
        ops_;
};

/// Free-function form of `Harness::check`.
TripleReport check_triple(const Harness& harness, const HoareTriple& triple);

struct DispatchReport {
    bool passed = false;
    /// 1-based; handlers().size() + 1 denotes the terminal handler.
    std::size_t matched_position = 0;
    /// Names of the handlers consulted, in order.
    std::vector<std::string> consulted;
    std::string message;
};

/// Instruments every handler in `chain`, resolves `token` through the engine
/// and checks that the result came from the earliest handler that claims the
/// token, with no handler consulted after it. Each handler's claim is
/// established on its own copy of `props`.
DispatchReport check_dispatch(const ResolverChain& chain, const Token& token,
                              const PropertyMap& props);

struct SuiteSummary {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

/// Loads `<dir>/suite.config` (keys: `root`, relative to `dir`; `config`, a
/// comma list, and `error-config`, both relative to the root) and runs every `*.triple` in `dir`
/// in name order, printing one PASS/FAIL line each.
SuiteSummary run_suite(const std::filesystem::path& dir, std::ostream& out);

} // namespace jasper::speccheck
