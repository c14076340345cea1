#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jasper/properties.hpp"
#include "jasper/template.hpp"

namespace jasper::forms {

enum class FormOutcome { Passive, Invalid, Success, Failure };

std::string_view to_string(FormOutcome outcome) noexcept;

enum class Method { Get, Post };

struct RequestData {
    Method method = Method::Get;
    std::string query;
    std::string body;
    std::string content_type;
};

/// Decodes a form-urlencoded string into (name, value) pairs in order. Empty
/// segments and segments with an empty name are skipped; a segment without
/// `=` has an empty value.
std::vector<std::pair<std::string, std::string>> decode_pairs(std::string_view encoded);

/// Binds each request variable as `FORM.<name>`; the last duplicate wins.
/// GET reads the query string, POST the body. POST bodies must be
/// application/x-www-form-urlencoded (an empty content type is accepted);
/// anything else throws RequestError.
void parse_request(const RequestData& req, PropertyMap& props);

using FieldRule = std::function<bool(std::string_view)>;

/// Accepts values that are nonempty after trimming whitespace.
bool nonempty_rule(std::string_view value);

struct FieldSpec {
    std::string name;
    FieldRule rule = nonempty_rule;
};

/// One form bound to one page. `template_path` is relative to CONFIG.rootDir.
struct FormDefinition {
    std::string page;
    std::string command;
    std::vector<FieldSpec> fields;
    std::filesystem::path template_path;
    std::string serial_key;
};

/// The side effect a successfully validated form triggers. Returns true on
/// success. Implementations must tolerate concurrent calls.
using FormEffect = std::function<bool(const PropertyMap&)>;

struct ValidationFailure {
    std::string field;
    std::string error_key;

    friend bool operator==(const ValidationFailure&, const ValidationFailure&) = default;
};

/// First field, in definition order, whose `FORM.` value is absent or fails
/// its rule.
std::optional<ValidationFailure> validate(const FormDefinition& def, const PropertyMap& props);

/// EXCLAIM:<field> prints `!` when <field> is VAR.vExclaim and nothing
/// otherwise; ERROR prints VAR.vError. Everything else is passed on.
HandlerResult form_errors_handler(const Token& token, PropertyMap& props);

/// CHECKED:<name>:<value> and SELECTED:<name>:<value> print the matching HTML
/// attribute when FORM.<name> equals <value>, and nothing otherwise.
HandlerResult form_controls_handler(const Token& token, PropertyMap& props);

/// Chain for a form shown without errors. `base` holds the handlers the form
/// template may need beyond form controls (e.g. MAIN).
ResolverChain form_chain(std::vector<NamedHandler> base = {});

/// `form_chain` with the error tokens in front.
ResolverChain form_errors_chain(std::vector<NamedHandler> base = {});

/// Runs the form lifecycle and returns its outcome.
///
/// Without a matching FORM.command the form template is rendered with
/// `form_chain` and serialised under `def.serial_key` (Passive). A submitted
/// form that fails validation is rendered with `form_errors_chain` while
/// VAR.vExclaim and VAR.vError are bound (Invalid). Otherwise `effect` runs
/// and decides Success or Failure. Never touches FORM.page.
FormOutcome preprocess_form(const FormDefinition& def, const FormEffect& effect,
                            PropertyMap& props, std::vector<NamedHandler> base = {});

} // namespace jasper::forms
