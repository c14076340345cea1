#include "jasper/app.hpp"

#include <fstream>

#include "jasper/diagnostics.hpp"
#include "jasper/error.hpp"
#include "jasper/text.hpp"

namespace jasper::app {
namespace {

constexpr std::string_view kFeedbackSerialKey = "SERIAL.feedbackForm";

std::string header_value(std::string_view v) {
    std::string out(v);
    for (char& c : out) {
        if (c == '\r' || c == '\n') c = ' ';
    }
    return out;
}

std::vector<NamedHandler> form_base() {
    return {{"base", base_handler}};
}

} // namespace

AppContext AppContext::from_props(const PropertyMap& props) {
    auto root = props.get("CONFIG.rootDir");
    if (!root) throw Error("CONFIG.rootDir is not configured");
    AppContext ctx;
    ctx.root_dir = *root;
    ctx.app_path = props.get("CONFIG.appPath").value_or("/");
    ctx.proc_path = props.value_or_empty("CONFIG.procPath");
    ctx.proc_ext = props.value_or_empty("CONFIG.procExt");
    return ctx;
}

HandlerResult base_handler(const Token& token, PropertyMap& props) {
    if (token.name == "MAIN") {
        auto ctx = AppContext::from_props(props);
        auto uri = process_file_plain(ctx.root_dir / kMainInclude, ResolverChain(), props);
        return std::string(text::trim(uri));
    }
    if (token.name == "PAGE") {
        if (!token.arg || token.arg->empty()) {
            throw TokenUsageError("[[PAGE]] requires a page name, as in [[PAGE:name]]");
        }
        auto ctx = AppContext::from_props(props);
        props.set("VAR.vPage", *token.arg);
        struct Unset {
            PropertyMap& p;
            ~Unset() { p.unset("VAR.vPage"); }
        } unset{props};
        return process_file_list(ctx.root_dir / kPageList, ResolverChain(), props);
    }
    return std::nullopt;
}

HandlerResult main_handler(const Token& token, PropertyMap& props) {
    if (token.name != "FEEDBACK_FORM") return std::nullopt;
    auto form = props.get(kFeedbackSerialKey);
    if (!form) {
        diagnostic("[[FEEDBACK_FORM]] rendered before the feedback form was preprocessed");
        return "";
    }
    return *form;
}

ResolverChain full_chain() {
    return ResolverChain({
        {"main", main_handler},
        {"base", base_handler},
        {"form_errors", forms::form_errors_handler},
        {"form_controls", forms::form_controls_handler},
    });
}

const forms::FormDefinition& feedback_form() {
    static const forms::FormDefinition def{
        std::string(kFeedbackPage),
        "FEEDBACK",
        {{"fullname"}, {"comments"}},
        "template/_inc/feedback_form.html",
        std::string(kFeedbackSerialKey),
    };
    return def;
}

SpoolFileTransport::SpoolFileTransport(std::filesystem::path path) : path_(std::move(path)) {}

bool SpoolFileTransport::send(const EmailMessage& message) {
    std::string record;
    record += "to: " + header_value(message.to) + "\n";
    record += "from-name: " + header_value(message.from_name) + "\n";
    record += "subject: " + header_value(message.subject) + "\n\n";
    for (const auto& line : text::split_lines(text::normalize_newlines(message.body))) {
        if (!line.empty() && line.front() == '.') record += '.';
        record += line;
        record += '\n';
    }
    record += ".\n";

    std::lock_guard lock(mutex_);
    std::error_code ec;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) {
        diagnostic("cannot open spool file '" + path_.string() + "'");
        return false;
    }
    out << record;
    out.flush();
    return static_cast<bool>(out);
}

std::size_t count_spool_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::size_t count = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line == ".") ++count;
    }
    return count;
}

bool send_feedback_email(const PropertyMap& props, EmailTransport& transport) {
    auto host = props.get("CONFIG.smtpHost");
    auto sender = props.get("CONFIG.gFeedbackSenderName");
    auto subject = props.get("CONFIG.gFeedbackSubject");
    if (!host || !sender || !subject) {
        diagnostic("feedback email needs CONFIG.smtpHost, CONFIG.gFeedbackSenderName "
                   "and CONFIG.gFeedbackSubject");
        return false;
    }
    EmailMessage msg;
    msg.to = props.get("CONFIG.gFeedbackRecipient").value_or("webmaster@" + *host);
    msg.from_name = *sender;
    msg.subject = *subject;
    msg.body = "Full name: " + props.value_or_empty("FORM.fullname") + "\n\nComments:\n" +
               props.value_or_empty("FORM.comments");
    return transport.send(msg);
}

void preprocess(PropertyMap& props, EmailTransport& transport) {
    if (props.get("FORM.page") != kFeedbackPage) return;

    auto effect = [&transport](const PropertyMap& p) {
        return send_feedback_email(p, transport);
    };
    switch (forms::preprocess_form(feedback_form(), effect, props, form_base())) {
    case forms::FormOutcome::Success:
        props.set("FORM.page", std::string(kFeedbackSuccessPage));
        break;
    case forms::FormOutcome::Failure:
        props.set("FORM.page", std::string(kFeedbackFailurePage));
        break;
    case forms::FormOutcome::Invalid:
    case forms::FormOutcome::Passive:
        break;
    }
}

} // namespace jasper::app
