#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>

#include "jasper/forms.hpp"
#include "jasper/properties.hpp"
#include "jasper/template.hpp"

namespace jasper::app {

/// Where the application sits: filesystem root and the pieces of the
/// server-process URI.
struct AppContext {
    std::filesystem::path root_dir;
    std::string app_path;
    std::string proc_path;
    std::string proc_ext;

    /// Throws Error when CONFIG.rootDir is unbound. The URI parts default to
    /// "/", "" and "".
    static AppContext from_props(const PropertyMap& props);
};

inline constexpr std::string_view kMainInclude = "template/_inc/main.html";
inline constexpr std::string_view kPageList = "template/_inc/page.list";
inline constexpr std::string_view kFeedbackPage = "feedback";
inline constexpr std::string_view kFeedbackSuccessPage = "feedback_success";
inline constexpr std::string_view kFeedbackFailurePage = "feedback_failure";

/// MAIN: URI of the main server process, rendered from the main include.
/// PAGE:<name>: query string selecting page <name>, rendered from the page
/// list with VAR.vPage bound for the duration.
HandlerResult base_handler(const Token& token, PropertyMap& props);

/// FEEDBACK_FORM: the serialised feedback form left by preprocessing.
HandlerResult main_handler(const Token& token, PropertyMap& props);

/// main, base, form errors, form controls, then the default echo.
ResolverChain full_chain();

const forms::FormDefinition& feedback_form();

struct EmailMessage {
    std::string to;
    std::string from_name;
    std::string subject;
    std::string body;
};

class EmailTransport {
public:
    virtual ~EmailTransport() = default;
    /// Returns false when the message could not be handed off.
    virtual bool send(const EmailMessage& message) = 0;
};

/// Appends each message to a spool file, one record per message:
///
///     to: <to>
///     from-name: <from_name>
///     subject: <subject>
///     <empty line>
///     <body, lines starting with '.' get an extra leading '.'>
///     .
///
/// Header values have CR and LF replaced by spaces. Appends are serialised.
class SpoolFileTransport : public EmailTransport {
public:
    explicit SpoolFileTransport(std::filesystem::path path);
    bool send(const EmailMessage& message) override;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mutex_;
};

/// Number of complete records in a spool file; 0 when it does not exist.
std::size_t count_spool_records(const std::filesystem::path& path);

/// Builds the feedback message from FORM.fullname and FORM.comments and the
/// gFeedback* config and hands it to `transport`.
bool send_feedback_email(const PropertyMap& props, EmailTransport& transport);

/// Page transitions run before rendering. On page "feedback" the feedback
/// form is preprocessed and FORM.page becomes "feedback_success" or
/// "feedback_failure" after a successful or failed send; it is otherwise
/// left alone. Other pages are untouched.
void preprocess(PropertyMap& props, EmailTransport& transport);

} // namespace jasper::app
