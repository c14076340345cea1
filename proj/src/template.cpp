#include "jasper/template.hpp"

#include <utility>

#include "jasper/diagnostics.hpp"
#include "jasper/error.hpp"
#include "jasper/text.hpp"

namespace jasper {
namespace {

constexpr std::string_view kOpen = "[[";
constexpr std::string_view kClose = "]]";

bool valid_raw(std::string_view raw) noexcept {
    return !raw.empty() && raw.front() != ':' && raw.find(kOpen) == std::string_view::npos;
}

} // namespace

Token Token::from_raw(std::string raw) {
    Token t;
    auto colon = raw.find(':');
    if (colon == std::string::npos) {
        t.name = raw;
    } else {
        t.name = raw.substr(0, colon);
        t.arg = raw.substr(colon + 1);
    }
    t.raw = std::move(raw);
    return t;
}

std::string ParsedLine::reassemble() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out += delimiters[i];
        out += kOpen;
        out += tokens[i].raw;
        out += kClose;
    }
    out += delimiters.back();
    return out;
}

ParsedLine tokenize_line(std::string_view line) {
    ParsedLine parsed;
    std::size_t literal_start = 0;
    std::size_t search = 0;
    for (;;) {
        auto open = line.find(kOpen, search);
        if (open == std::string_view::npos) break;
        auto close = line.find(kClose, open + kOpen.size());
        if (close == std::string_view::npos) break;

        auto raw = line.substr(open + kOpen.size(), close - open - kOpen.size());
        if (!valid_raw(raw)) {
            search = open + 1;
            continue;
        }
        parsed.delimiters.emplace_back(line.substr(literal_start, open - literal_start));
        parsed.tokens.push_back(Token::from_raw(std::string(raw)));
        literal_start = search = close + kClose.size();
    }
    parsed.delimiters.emplace_back(line.substr(literal_start));
    return parsed;
}

ResolverChain::ResolverChain() : ResolverChain(std::vector<NamedHandler>{}) {}

ResolverChain::ResolverChain(std::vector<NamedHandler> handlers)
    : ResolverChain(std::move(handlers),
                    [](const Token& t, PropertyMap& p) { return default_resolve(t, p); }) {}

ResolverChain::ResolverChain(std::vector<NamedHandler> handlers, TerminalHandler terminal)
    : handlers_(std::move(handlers)), terminal_(std::move(terminal)) {}

ResolverChain ResolverChain::prepend(NamedHandler handler) const {
    std::vector<NamedHandler> hs;
    hs.reserve(handlers_.size() + 1);
    hs.push_back(std::move(handler));
    hs.insert(hs.end(), handlers_.begin(), handlers_.end());
    return ResolverChain(std::move(hs), terminal_);
}

std::optional<std::string> lookup_echo(const Token& token, const PropertyMap& props) {
    for (std::string_view ns : {"VAR.", "FORM.", "CONFIG."}) {
        if (auto v = props.get(std::string(ns) + token.raw)) return v;
    }
    return std::nullopt;
}

std::string default_resolve(const Token& token, const PropertyMap& props) {
    if (auto v = lookup_echo(token, props)) return *std::move(v);
    diagnostic("unresolved token [[" + token.raw + "]]");
    return {};
}

std::string resolve(const ResolverChain& chain, const Token& token, PropertyMap& props) {
    for (const auto& h : chain.handlers()) {
        if (auto out = h.handle(token, props)) return *std::move(out);
    }
    return chain.terminal()(token, props);
}

std::string process_line(std::string_view line, const ResolverChain& chain,
                         PropertyMap& props) {
    auto parsed = tokenize_line(line);
    std::string out;
    for (std::size_t i = 0; i < parsed.tokens.size(); ++i) {
        out += parsed.delimiters[i];
        out += resolve(chain, parsed.tokens[i], props);
    }
    out += parsed.delimiters.back();
    return out;
}

std::filesystem::path under_root(const PropertyMap& props, const std::filesystem::path& rel) {
    auto root = props.get("CONFIG.rootDir");
    if (!root || root->empty()) return rel;
    return std::filesystem::path(*root) / rel;
}

std::vector<std::string> read_template_lines(const std::filesystem::path& path) {
    return text::split_lines(text::normalize_newlines(text::read_file(path)));
}

std::string process_file_plain(const std::filesystem::path& path,
                               const ResolverChain& chain, PropertyMap& props) {
    auto lines = read_template_lines(path);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out += '\n';
        out += process_line(lines[i], chain, props);
    }
    return out;
}

namespace {

// Renders the tokens and delimiters of `parsed` in [first, last) token slots,
// starting inside delimiter `first` at offset `from` and ending inside
// delimiter `last` before offset `to`.
std::string render_span(const ParsedLine& parsed, std::size_t first, std::size_t from,
                        std::size_t last, std::size_t to, const ResolverChain& chain,
                        PropertyMap& props) {
    std::string out;
    for (std::size_t i = first; i <= last; ++i) {
        std::string_view d = parsed.delimiters[i];
        std::size_t begin = (i == first) ? from : 0;
        std::size_t end = (i == last) ? to : d.size();
        out += d.substr(begin, end - begin);
        if (i < last) out += resolve(chain, parsed.tokens[i], props);
    }
    return out;
}

} // namespace

std::string process_file_list(const std::filesystem::path& path,
                              const ResolverChain& chain, PropertyMap& props) {
    auto lines = read_template_lines(path);
    std::string out;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const auto& line = lines[n];
        if (text::trim(line).empty()) continue;

        auto parsed = tokenize_line(line);
        std::size_t seg = 0;
        std::size_t eq = std::string::npos;
        for (; seg < parsed.delimiters.size(); ++seg) {
            eq = parsed.delimiters[seg].find('=');
            if (eq != std::string::npos) break;
        }
        if (eq == std::string::npos) {
            throw ListFormatError(path.string() + ":" + std::to_string(n + 1) +
                                      ": list line has no '='",
                                  n + 1);
        }
        auto last = parsed.delimiters.size() - 1;
        auto name = render_span(parsed, 0, 0, seg, eq, chain, props);
        auto value = render_span(parsed, seg, eq + 1, last, parsed.delimiters[last].size(),
                                 chain, props);
        if (!out.empty()) out += '&';
        out += text::form_encode(name);
        out += '=';
        out += text::form_encode(value);
    }
    return out;
}

} // namespace jasper
