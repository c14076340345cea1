#include "jasper/speccheck.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>

#include "jasper/app.hpp"
#include "jasper/config.hpp"
#include "jasper/forms.hpp"

namespace jasper::speccheck {
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

FileModel FileModel::from_text(std::string_view text) {
    FileModel f;
    std::string current;
    for (std::size_t k = 0; k < text.size(); ++k) {
        char c = text[k];
        if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') continue;
        current.push_back(c);
        if (c == '\n') {
            f.lines.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) f.lines.push_back(std::move(current));
    return f;
}

FileModel FileModel::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file '" + path.string() + "'");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return from_text(text);
}

namespace {

bool pair_at(const std::string& s, std::size_t k, char c) {
    return k + 1 < s.size() && s[k] == c && s[k + 1] == c;
}

std::string dispatch(const std::string& raw, const ResolverChain& chain, PropertyMap& props) {
    Token t;
    t.raw = raw;
    bool in_arg = false;
    for (char c : raw) {
        if (!in_arg && c == ':') {
            in_arg = true;
            t.arg.emplace();
        } else if (in_arg) {
            t.arg->push_back(c);
        } else {
            t.name.push_back(c);
        }
    }
    for (const auto& h : chain.handlers()) {
        auto r = h.handle(t, props);
        if (r.has_value()) return *r;
    }
    return chain.terminal()(t, props);
}

std::string oracle_line(const std::string& line, const ResolverChain& chain,
                        PropertyMap& props) {
    std::string out;
    std::size_t k = 0;
    while (k < line.size()) {
        if (pair_at(line, k, '[')) {
            std::string raw;
            std::size_t m = k + 2;
            bool closed = false;
            while (m < line.size()) {
                if (pair_at(line, m, ']')) {
                    closed = true;
                    break;
                }
                if (pair_at(line, m, '[')) break;
                raw.push_back(line[m]);
                ++m;
            }
            if (closed && !raw.empty() && raw[0] != ':') {
                out += dispatch(raw, chain, props);
                k = m + 2;
                continue;
            }
        }
        out.push_back(line[k]);
        ++k;
    }
    return out;
}

} // namespace

std::string oracle_process_file(FileModel& file, const ResolverChain& chain,
                                PropertyMap& props) {
    if (file.pointer != 1) throw HarnessError("oracle_process_file requires pointer 1");
    std::string out;
    while (file.pointer <= file.lines.size()) {
        const auto& line = file.lines[file.pointer - 1];
        bool terminated = !line.empty() && line.back() == '\n';
        out += oracle_line(terminated ? line.substr(0, line.size() - 1) : line, chain, props);
        if (terminated) out += '\n';
        ++file.pointer;
    }
    file.pointer = 0;
    return out;
}

// ---------------------------------------------------------------------------
// Triple files
// ---------------------------------------------------------------------------

std::string ReturnCheck::describe() const {
    switch (kind) {
    case Kind::Equals: return "return equals '" + arg + "'";
    case Kind::Contains: return "return contains '" + arg + "'";
    case Kind::Excludes: return "return excludes '" + arg + "'";
    case Kind::Unmatched: return "return unmatched";
    case Kind::Exclaim: return "return exclaim " + arg;
    case Kind::NoExclaim: return "return no-exclaim " + arg;
    case Kind::Hidden: return "return hidden " + arg;
    case Kind::Input: return "return input " + arg;
    }
    return "return ?";
}

namespace {

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

std::pair<std::string_view, std::string_view> split_word(std::string_view s) {
    auto sp = s.find(' ');
    if (sp == std::string_view::npos) return {s, {}};
    return {s.substr(0, sp), s.substr(sp + 1)};
}

EntryAssertion parse_entry(std::string_view line, const std::string& where) {
    if (line.starts_with('!')) {
        auto key = std::string(line.substr(1));
        if (!is_namespaced_key(key)) throw HarnessError(where + ": bad key '" + key + "'");
        return {key, std::nullopt};
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw HarnessError(where + ": expected KEY=VALUE or !KEY");
    auto key = std::string(line.substr(0, eq));
    if (!is_namespaced_key(key)) throw HarnessError(where + ": bad key '" + key + "'");
    return {key, std::string(line.substr(eq + 1))};
}

ReturnCheck parse_return(std::string_view line, const std::string& where) {
    using K = ReturnCheck::Kind;
    static const std::map<std::string, K, std::less<>> kinds = {
        {"equals", K::Equals},   {"contains", K::Contains},   {"excludes", K::Excludes},
        {"unmatched", K::Unmatched}, {"exclaim", K::Exclaim}, {"no-exclaim", K::NoExclaim},
        {"hidden", K::Hidden},   {"input", K::Input},
    };
    auto [word, rest] = split_word(line);
    auto it = kinds.find(word);
    if (it == kinds.end()) throw HarnessError(where + ": unknown return check '" + std::string(word) + "'");
    return {it->second, std::string(rest)};
}

} // namespace

HoareTriple parse_triple(std::string_view text, std::string name) {
    HoareTriple t;
    t.name = std::move(name);
    std::string section;
    bool have_op = false;
    std::size_t number = 0;

    while (!text.empty()) {
        auto nl = text.find('\n');
        auto line = strip_cr(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
        ++number;
        std::string where = t.name + ":" + std::to_string(number);

        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = std::string(line.substr(1, line.size() - 2));
            if (section != "pre" && section != "op" && section != "post" &&
                section != "return" && section != "effects") {
                throw HarnessError(where + ": unknown section [" + section + "]");
            }
            continue;
        }
        if (section == "pre") {
            t.pre.entries.push_back(parse_entry(line, where));
        } else if (section == "post") {
            t.post.entries.push_back(parse_entry(line, where));
        } else if (section == "op") {
            if (have_op) throw HarnessError(where + ": more than one operation");
            auto [op, arg] = split_word(line);
            t.op = {std::string(op), std::string(arg)};
            have_op = true;
        } else if (section == "return") {
            t.post.return_checks.push_back(parse_return(line, where));
        } else if (section == "effects") {
            auto [word, count] = split_word(line);
            if (word != "sent") throw HarnessError(where + ": expected 'sent N'");
            try {
                t.post.sent = std::stoul(std::string(count));
            } catch (const std::exception&) {
                throw HarnessError(where + ": expected 'sent N'");
            }
        } else {
            throw HarnessError(where + ": content outside a section");
        }
    }
    if (!have_op) throw HarnessError(t.name + ": no [op] section");

    std::set<std::string> seen;
    for (const auto* a : {&t.pre, &t.post}) {
        seen.clear();
        for (const auto& e : a->entries) {
            if (!seen.insert(e.key).second) throw HarnessError(t.name + ": key " + e.key + " repeated");
        }
    }
    return t;
}

HoareTriple load_triple(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read triple '" + path.string() + "'");
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_triple(text, path.filename().string());
}

// ---------------------------------------------------------------------------
// Harness
// ---------------------------------------------------------------------------

struct Harness::CountingTransport : app::EmailTransport {
    std::atomic<std::size_t> sent{0};
    bool send(const app::EmailMessage&) override {
        ++sent;
        return true;
    }
};

namespace {

std::string substitute_root(std::string value, const std::string& root) {
    constexpr std::string_view kRoot = "@ROOT@";
    for (auto pos = value.find(kRoot); pos != std::string::npos; pos = value.find(kRoot, pos)) {
        value.replace(pos, kRoot.size(), root);
        pos += root.size();
    }
    return value;
}

std::string quoted(const std::optional<std::string>& v) {
    return v ? "'" + *v + "'" : "absent";
}

std::optional<std::string> exclaim_span_for(std::string_view html, std::string_view field) {
    auto at = html.find("name=\"" + std::string(field) + "\"");
    if (at == std::string_view::npos) return std::nullopt;
    constexpr std::string_view kSpan = "<span class=\"exclaim\">";
    auto open = html.rfind(kSpan, at);
    if (open == std::string_view::npos) return std::nullopt;
    auto start = open + kSpan.size();
    auto close = html.find("</span>", start);
    if (close == std::string_view::npos || close > at) return std::nullopt;
    return std::string(html.substr(start, close - start));
}

bool has_input(std::string_view html, std::string_view name_value, bool hidden) {
    auto eq = name_value.find('=');
    auto name = std::string(name_value.substr(0, eq));
    auto value = eq == std::string_view::npos ? std::string() : std::string(name_value.substr(eq + 1));
    auto attrs = "name=\"" + name + "\" value=\"" + value + "\"";
    if (hidden) return html.find("type=\"hidden\" " + attrs) != std::string_view::npos;
    return html.find("type=\"text\" " + attrs) != std::string_view::npos ||
           html.find("<textarea name=\"" + name + "\">" + value + "</textarea>") !=
               std::string_view::npos;
}

std::optional<std::string> failed_return_check(const ReturnCheck& c,
                                               const std::optional<std::string>& value) {
    using K = ReturnCheck::Kind;
    if (c.kind == K::Unmatched) {
        if (value) return c.describe() + ": handler returned " + quoted(value);
        return std::nullopt;
    }
    if (!value) return c.describe() + ": operation did not produce a value";
    const std::string& v = *value;
    bool ok = false;
    switch (c.kind) {
    case K::Equals: ok = v == c.arg; break;
    case K::Contains: ok = v.find(c.arg) != std::string::npos; break;
    case K::Excludes: ok = v.find(c.arg) == std::string::npos; break;
    case K::Exclaim: ok = exclaim_span_for(v, c.arg) == "!"; break;
    case K::NoExclaim: ok = exclaim_span_for(v, c.arg) == ""; break;
    case K::Hidden: ok = has_input(v, c.arg, true); break;
    case K::Input: ok = has_input(v, c.arg, false); break;
    case K::Unmatched: break;
    }
    if (ok) return std::nullopt;
    if (c.kind == K::Equals) return c.describe() + ": got '" + v + "'";
    return c.describe() + ": not satisfied";
}

OpResult handler_op(HandlerResult (*fn)(const Token&, PropertyMap&), PropertyMap& p,
                    std::string_view arg) {
    return {fn(Token::from_raw(std::string(arg)), p)};
}

} // namespace

Harness::Harness(server::ServerConfig cfg) : cfg_(std::move(cfg)) {
    ops_["form_errors_handler"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return handler_op(forms::form_errors_handler, p, a);
    };
    ops_["form_controls_handler"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return handler_op(forms::form_controls_handler, p, a);
    };
    ops_["base_handler"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return handler_op(app::base_handler, p, a);
    };
    ops_["main_handler"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return handler_op(app::main_handler, p, a);
    };
    ops_["default_resolve"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return OpResult{default_resolve(Token::from_raw(std::string(a)), p)};
    };
    ops_["resolve"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return OpResult{resolve(app::full_chain(), Token::from_raw(std::string(a)), p)};
    };
    ops_["process_line"] = [](PropertyMap& p, std::string_view a, CountingTransport&) {
        return OpResult{process_line(a, app::full_chain(), p)};
    };
    ops_["validate"] = [](PropertyMap& p, std::string_view, CountingTransport&) {
        auto failure = forms::validate(app::feedback_form(), p);
        return OpResult{failure ? failure->field : std::string()};
    };
    ops_["preprocess"] = [](PropertyMap& p, std::string_view, CountingTransport& t) {
        app::preprocess(p, t);
        return OpResult{std::string()};
    };
    ops_["main"] = [this](PropertyMap& p, std::string_view, CountingTransport& t) {
        auto response = server::run_main(p, server::load_configuration(cfg_), t);
        if (response.status != 200) {
            return OpResult{"<status " + std::to_string(response.status) + ">"};
        }
        return OpResult{std::move(response.body)};
    };
}

std::vector<std::string> Harness::operation_names() const {
    std::vector<std::string> names;
    for (const auto& [name, fn] : ops_) names.push_back(name);
    return names;
}

TripleReport Harness::check(const HoareTriple& triple) const {
    auto op = ops_.find(triple.op.name);
    if (op == ops_.end()) throw HarnessError("unknown operation '" + triple.op.name + "'");

    auto root = cfg_.root_dir.generic_string();
    PropertyMap props;
    for (const auto& e : triple.pre.entries) {
        if (e.value) props.set(e.key, substitute_root(*e.value, root));
    }
    const PropertyMap before = props;

    CountingTransport transport;
    auto result = op->second(props, substitute_root(triple.op.arg, root), transport);

    std::set<std::string, std::less<>> mentioned;
    for (const auto& e : triple.post.entries) {
        mentioned.insert(e.key);
        auto expected = e.value ? std::optional(substitute_root(*e.value, root)) : std::nullopt;
        auto actual = props.get(e.key);
        if (actual != expected) {
            return {false, "post " + e.key + ": expected " + quoted(expected) + ", got " +
                               quoted(actual)};
        }
    }
    for (const auto& e : triple.pre.entries) {
        if (mentioned.contains(e.key)) continue;
        if (props.get(e.key) != before.get(e.key)) {
            return {false, "frame " + e.key + ": was " + quoted(before.get(e.key)) +
                               ", now " + quoted(props.get(e.key))};
        }
    }
    if (triple.post.sent && *triple.post.sent != transport.sent) {
        return {false, "effects: expected " + std::to_string(*triple.post.sent) +
                           " message(s) sent, got " + std::to_string(transport.sent.load())};
    }
    for (const auto& c : triple.post.return_checks) {
        if (auto why = failed_return_check(c, result.value)) return {false, *why};
    }
    return {true, {}};
}

TripleReport check_triple(const Harness& harness, const HoareTriple& triple) {
    return harness.check(triple);
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

DispatchReport check_dispatch(const ResolverChain& chain, const Token& token,
                              const PropertyMap& props) {
    DispatchReport report;
    const auto& handlers = chain.handlers();

    // Which handler should win, asking each in isolation.
    std::size_t expected = handlers.size();
    std::string expected_output;
    for (std::size_t i = 0; i < handlers.size(); ++i) {
        PropertyMap scratch = props;
        if (auto out = handlers[i].handle(token, scratch)) {
            expected = i;
            expected_output = *out;
            break;
        }
    }
    if (expected == handlers.size()) {
        PropertyMap scratch = props;
        expected_output = chain.terminal()(token, scratch);
    }

    std::vector<NamedHandler> instrumented;
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < handlers.size(); ++i) {
        instrumented.push_back({handlers[i].name, [&, i](const Token& t, PropertyMap& p) {
                                    order.push_back(i);
                                    report.consulted.push_back(handlers[i].name);
                                    return handlers[i].handle(t, p);
                                }});
    }
    bool terminal_called = false;
    ResolverChain probe(std::move(instrumented), [&](const Token& t, PropertyMap& p) {
        terminal_called = true;
        report.consulted.push_back("<default>");
        return chain.terminal()(t, p);
    });

    PropertyMap scratch = props;
    auto output = resolve(probe, token, scratch);

    report.matched_position = expected + 1;
    std::vector<std::size_t> prefix(std::min(expected + 1, handlers.size()));
    for (std::size_t i = 0; i < prefix.size(); ++i) prefix[i] = i;

    if (order != prefix) {
        report.message = "handlers consulted out of order or after a match";
    } else if (terminal_called != (expected == handlers.size())) {
        report.message = terminal_called ? "terminal consulted after a match"
                                         : "terminal not consulted";
    } else if (output != expected_output) {
        report.message = "resolved output differs from the earliest matching handler";
    } else {
        report.passed = true;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    while (!s.empty()) {
        auto comma = s.find(',');
        auto item = s.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        s = comma == std::string_view::npos ? std::string_view() : s.substr(comma + 1);
    }
    return out;
}

server::ServerConfig suite_config(const fs::path& dir) {
    server::ServerConfig cfg;
    cfg.root_dir = dir;
    auto file = dir / "suite.config";
    if (!fs::exists(file)) return cfg;
    for (const auto& a : config::read_assignments(file)) {
        if (a.name == "root") {
            cfg.root_dir = (dir / a.value).lexically_normal();
        } else if (a.name == "config") {
            for (const auto& c : split_list(a.value)) cfg.config_files.push_back(c);
        } else if (a.name == "error-config") {
            cfg.error_config = a.value;
        } else {
            throw HarnessError(file.string() + ": unknown key '" + a.name + "'");
        }
    }
    return cfg;
}

} // namespace

SuiteSummary run_suite(const fs::path& dir, std::ostream& out) {
    if (!fs::is_directory(dir)) throw HarnessError("no suite directory '" + dir.string() + "'");
    Harness harness(suite_config(dir));

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".triple") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    SuiteSummary summary;
    for (const auto& file : files) {
        TripleReport report;
        try {
            report = harness.check(load_triple(file));
        } catch (const std::exception& e) {
            report = {false, e.what()};
        }
        if (report.passed) {
            ++summary.passed;
            out << "PASS " << file.filename().string() << '\n';
        } else {
            ++summary.failed;
            out << "FAIL " << file.filename().string() << ": " << report.message << '\n';
        }
    }
    out << summary.passed << " passed, " << summary.failed << " failed\n";
    return summary;
}

} // namespace jasper::speccheck
