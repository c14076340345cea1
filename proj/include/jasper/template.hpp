#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jasper/properties.hpp"

namespace jasper {

/// A `[[raw]]` directive. `name` is the text up to the first `:`, `arg` the
/// text after it (absent when `raw` has no colon).
struct Token {
    std::string raw;
    std::string name;
    std::optional<std::string> arg;

    /// Splits `raw` at its first colon. Does not validate `raw`.
    static Token from_raw(std::string raw);

    friend bool operator==(const Token&, const Token&) = default;
};

/// A line decomposed as s_1 t_1 s_2 t_2 ... s_N: `delimiters` always holds
/// exactly one more element than `tokens`.
struct ParsedLine {
    std::vector<std::string> delimiters;
    std::vector<Token> tokens;

    /// Concatenation of the delimiters and the `[[raw]]` forms, in order.
    std::string reassemble() const;

    friend bool operator==(const ParsedLine&, const ParsedLine&) = default;
};

/// Splits a line into delimiters and tokens.
///
/// A token is the shortest `[[raw]]` such that raw contains no `[[` and has a
/// nonempty name. Scanning is left to right and non-greedy, so `[[a]]b]]` is
/// token `a` followed by literal `b]]`. Unterminated openers and stray closers
/// are literal text. Total: never throws.
ParsedLine tokenize_line(std::string_view line);

/// Handler result: the replacement text, or nullopt to pass the token on.
using HandlerResult = std::optional<std::string>;
using TokenHandler = std::function<HandlerResult(const Token&, PropertyMap&)>;
using TerminalHandler = std::function<std::string(const Token&, PropertyMap&)>;

struct NamedHandler {
    std::string name;
    TokenHandler handle;
};

/// Ordered token handlers, most specific first, ending in a terminal handler
/// that always produces a value. Models the process_token fallback of a
/// template class hierarchy: each handler either claims the token or defers
/// to the next.
class ResolverChain {
public:
    /// Chain consisting only of the default echo resolver.
    ResolverChain();
    explicit ResolverChain(std::vector<NamedHandler> handlers);
    ResolverChain(std::vector<NamedHandler> handlers, TerminalHandler terminal);

    /// Returns a copy with `handler` consulted before every existing one.
    ResolverChain prepend(NamedHandler handler) const;

    const std::vector<NamedHandler>& handlers() const noexcept { return handlers_; }
    const TerminalHandler& terminal() const noexcept { return terminal_; }

private:
    std::vector<NamedHandler> handlers_;
    TerminalHandler terminal_;
};

/// The echo lookup shared by the HTML, GET and list modes: the first bound of
/// `VAR.<raw>`, `FORM.<raw>`, `CONFIG.<raw>`, else nullopt.
std::optional<std::string> lookup_echo(const Token& token, const PropertyMap& props);

/// `lookup_echo` or the empty string. Unbound tokens are reported through
/// the diagnostic sink.
std::string default_resolve(const Token& token, const PropertyMap& props);

/// Output of the first handler that claims the token, else the terminal's.
std::string resolve(const ResolverChain& chain, const Token& token, PropertyMap& props);

/// s_1 r_1 s_2 r_2 ... s_N, where r_j resolves t_j. Delimiters are verbatim.
std::string process_line(std::string_view line, const ResolverChain& chain,
                         PropertyMap& props);

/// `rel` resolved against CONFIG.rootDir (the working directory when unbound).
std::filesystem::path under_root(const PropertyMap& props, const std::filesystem::path& rel);

/// Reads a template file with CRLF normalised to LF and returns its lines.
/// A trailing newline produces a final empty line.
std::vector<std::string> read_template_lines(const std::filesystem::path& path);

/// Processes every line of a template file and joins the results with LF.
/// A trailing newline in the file is preserved. Throws IoError.
std::string process_file_plain(const std::filesystem::path& path,
                               const ResolverChain& chain, PropertyMap& props);

/// Processes a list file into a query string.
///
/// Every nonblank line is split at its first `=` outside any token; both sides
/// are processed and form-encoded, then rejoined as `name=value`. The pairs
/// are joined with `&`. Blank lines are skipped. Throws ListFormatError for a
/// nonblank line with no such `=`.
std::string process_file_list(const std::filesystem::path& path,
                              const ResolverChain& chain, PropertyMap& props);

} // namespace jasper
