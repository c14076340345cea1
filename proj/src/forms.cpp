#include "jasper/forms.hpp"

#include "jasper/diagnostics.hpp"
#include "jasper/error.hpp"
#include "jasper/text.hpp"

namespace jasper::forms {
namespace {

constexpr std::string_view kExclaimVar = "VAR.vExclaim";
constexpr std::string_view kErrorVar = "VAR.vError";

bool is_form_urlencoded(std::string_view content_type) {
    auto media = text::trim(content_type.substr(0, content_type.find(';')));
    if (media.empty()) return true;
    constexpr std::string_view kExpected = "application/x-www-form-urlencoded";
    if (media.size() != kExpected.size()) return false;
    for (std::size_t i = 0; i < media.size(); ++i) {
        char c = media[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != kExpected[i]) return false;
    }
    return true;
}

// Restores VAR.vExclaim and VAR.vError to absent however rendering exits.
struct ErrorVarsGuard {
    PropertyMap& props;
    ~ErrorVarsGuard() {
        props.unset(kExclaimVar);
        props.unset(kErrorVar);
    }
};

std::string render(const FormDefinition& def, const ResolverChain& chain, PropertyMap& props) {
    return process_file_plain(under_root(props, def.template_path), chain, props);
}

} // namespace

std::string_view to_string(FormOutcome outcome) noexcept {
    switch (outcome) {
    case FormOutcome::Passive: return "PASSIVE";
    case FormOutcome::Invalid: return "INVALID";
    case FormOutcome::Success: return "SUCCESS";
    case FormOutcome::Failure: return "FAILURE";
    }
    return "?";
}

std::vector<std::pair<std::string, std::string>> decode_pairs(std::string_view encoded) {
    std::vector<std::pair<std::string, std::string>> pairs;
    while (!encoded.empty()) {
        auto amp = encoded.find('&');
        auto segment = encoded.substr(0, amp);
        encoded = amp == std::string_view::npos ? std::string_view() : encoded.substr(amp + 1);
        if (segment.empty()) continue;

        auto eq = segment.find('=');
        auto name = text::form_decode(segment.substr(0, eq));
        if (name.empty()) continue;
        auto value = eq == std::string_view::npos ? std::string()
                                                  : text::form_decode(segment.substr(eq + 1));
        pairs.emplace_back(std::move(name), std::move(value));
    }
    return pairs;
}

void parse_request(const RequestData& req, PropertyMap& props) {
    std::string_view source = req.query;
    if (req.method == Method::Post) {
        if (!is_form_urlencoded(req.content_type)) {
            throw RequestError("unsupported content type '" + req.content_type + "'");
        }
        source = req.body;
    }
    for (auto& [name, value] : decode_pairs(source)) {
        props.set("FORM." + name, std::move(value));
    }
}

bool nonempty_rule(std::string_view value) {
    return !text::trim(value).empty();
}

std::optional<ValidationFailure> validate(const FormDefinition& def, const PropertyMap& props) {
    for (const auto& field : def.fields) {
        auto value = props.get("FORM." + field.name);
        if (!value || !field.rule(*value)) {
            return ValidationFailure{field.name, "ERROR." + field.name};
        }
    }
    return std::nullopt;
}

HandlerResult form_errors_handler(const Token& token, PropertyMap& props) {
    if (token.name == "EXCLAIM") {
        auto invalid = props.get(kExclaimVar);
        return (token.arg && invalid && *token.arg == *invalid) ? "!" : "";
    }
    if (token.name == "ERROR") return props.value_or_empty(kErrorVar);
    return std::nullopt;
}

HandlerResult form_controls_handler(const Token& token, PropertyMap& props) {
    std::string_view attribute;
    if (token.name == "CHECKED") {
        attribute = R"( checked="checked")";
    } else if (token.name == "SELECTED") {
        attribute = R"( selected="selected")";
    } else {
        return std::nullopt;
    }
    if (!token.arg) return "";
    auto colon = token.arg->find(':');
    if (colon == std::string::npos || colon == 0) return "";
    auto current = props.get("FORM." + token.arg->substr(0, colon));
    if (current && *current == token.arg->substr(colon + 1)) return std::string(attribute);
    return "";
}

ResolverChain form_chain(std::vector<NamedHandler> base) {
    std::vector<NamedHandler> hs;
    hs.push_back({"form_controls", form_controls_handler});
    for (auto& h : base) hs.push_back(std::move(h));
    return ResolverChain(std::move(hs));
}

ResolverChain form_errors_chain(std::vector<NamedHandler> base) {
    return form_chain(std::move(base)).prepend({"form_errors", form_errors_handler});
}

FormOutcome preprocess_form(const FormDefinition& def, const FormEffect& effect,
                            PropertyMap& props, std::vector<NamedHandler> base) {
    auto command = props.get("FORM.command");
    if (!command || *command != def.command) {
        props.set(def.serial_key, render(def, form_chain(std::move(base)), props));
        return FormOutcome::Passive;
    }

    if (auto failure = validate(def, props)) {
        ErrorVarsGuard guard{props};
        auto message = props.get(failure->error_key);
        if (!message) diagnostic("no message bound for " + failure->error_key);
        props.set(kExclaimVar, failure->field);
        props.set(kErrorVar, message.value_or(""));
        props.set(def.serial_key, render(def, form_errors_chain(std::move(base)), props));
        return FormOutcome::Invalid;
    }

    return effect(props) ? FormOutcome::Success : FormOutcome::Failure;
}

} // namespace jasper::forms
