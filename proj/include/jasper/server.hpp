#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jasper/app.hpp"
#include "jasper/forms.hpp"
#include "jasper/properties.hpp"

namespace jasper::server {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Application root; must contain `template/`. Becomes CONFIG.rootDir.
    std::filesystem::path root_dir;
    /// Parsed in order under CONFIG. (platform file first, then global), so
    /// later files win on collisions. Relative paths are taken from root_dir.
    std::vector<std::filesystem::path> config_files;
    /// Parsed under ERROR. after the config files.
    std::optional<std::filesystem::path> error_config;
    /// Feedback spool; empty means `<root_dir>/spool/feedback.spool`.
    std::filesystem::path spool_path;
    /// Parse config files once instead of on every request.
    bool cache_config = false;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    std::filesystem::path effective_spool_path() const;
};

struct Response {
    int status = 200;
    std::string content_type = "text/html; charset=utf-8";
    std::string body;
};

/// Accepts nonempty names made of ASCII letters, digits and `_`.
bool sanitize_page(std::string_view name);

/// CONFIG. and ERROR. entries for one request: the config files, the error
/// file, defaults for appPath/procPath/procExt, and CONFIG.rootDir.
PropertyMap load_configuration(const ServerConfig& cfg);

/// The main server process after request parsing: default FORM.page to
/// "main", validate it, preprocess, then render `template/<page>.html` with
/// the full chain. `cfg_props` is merged into `props` first.
Response run_main(PropertyMap& props, const PropertyMap& cfg_props,
                  app::EmailTransport& transport);

/// Fresh properties, request parse, config parse, then `run_main`.
Response handle_request(const forms::RequestData& req, const ServerConfig& cfg,
                        app::EmailTransport& transport);

/// A configured application with its spool transport and optional config
/// cache. Safe to call `handle` concurrently.
class Service {
public:
    explicit Service(ServerConfig cfg);
    Service(ServerConfig cfg, std::shared_ptr<app::EmailTransport> transport);

    Response handle(const forms::RequestData& req) const;
    const ServerConfig& config() const noexcept { return cfg_; }

private:
    ServerConfig cfg_;
    std::shared_ptr<app::EmailTransport> transport_;
    std::optional<PropertyMap> cached_;
};

/// HTTP/1.1 front end serving `/main` for GET and POST.
class HttpServer {
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds to `port` (0 picks a free port) and returns the bound port, or
    /// -1 on failure.
    int bind(const std::string& host, int port);
    /// Blocks until `stop`.
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RenderOptions {
    std::filesystem::path template_path;
    std::vector<std::filesystem::path> config_files;
    std::optional<std::filesystem::path> error_config;
    std::optional<std::filesystem::path> root_dir;
    /// `name=value`, bound as `VAR.<name>`.
    std::vector<std::string> vars;
};

/// Offline rendering with the full chain. Paths are used as given.
std::string cli_render(const RenderOptions& opts);

} // namespace jasper::server
