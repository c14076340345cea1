#include "jasper/server.hpp"

#include <httplib.h>

#include "jasper/config.hpp"
#include "jasper/diagnostics.hpp"
#include "jasper/error.hpp"
#include "jasper/template.hpp"

namespace jasper::server {
namespace fs = std::filesystem;

namespace {

Response plain(int status, std::string body) {
    return {status, "text/plain; charset=utf-8", std::move(body)};
}

void merge(PropertyMap& into, const PropertyMap& from) {
    for (const auto& [k, v] : from) into.set(k, v);
}

} // namespace

fs::path ServerConfig::resolve(const fs::path& p) const {
    return p.is_absolute() ? p : root_dir / p;
}

fs::path ServerConfig::effective_spool_path() const {
    return spool_path.empty() ? root_dir / "spool" / "feedback.spool" : resolve(spool_path);
}

bool sanitize_page(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_';
        if (!ok) return false;
    }
    return true;
}

PropertyMap load_configuration(const ServerConfig& cfg) {
    PropertyMap props;
    for (const auto& file : cfg.config_files) config::parse(cfg.resolve(file), props);
    if (cfg.error_config) config::parse_bare(cfg.resolve(*cfg.error_config), "ERROR", props);

    if (!props.contains("CONFIG.appPath")) props.set("CONFIG.appPath", "/");
    if (!props.contains("CONFIG.procPath")) props.set("CONFIG.procPath", "");
    if (!props.contains("CONFIG.procExt")) props.set("CONFIG.procExt", "");

    auto root = cfg.root_dir.generic_string();
    if (root.empty()) root = ".";
    if (root.back() != '/') root += '/';
    props.set("CONFIG.rootDir", root);
    return props;
}

Response run_main(PropertyMap& props, const PropertyMap& cfg_props,
                  app::EmailTransport& transport) {
    merge(props, cfg_props);

    if (!props.contains("FORM.page")) props.set("FORM.page", "main");
    if (!sanitize_page(props.value_or_empty("FORM.page"))) {
        return plain(400, "invalid page name\n");
    }

    app::preprocess(props, transport);

    auto page = props.value_or_empty("FORM.page");
    auto path = under_root(props, fs::path("template") / (page + ".html"));
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return plain(404, "no such page: " + page + "\n");

    return {200, "text/html; charset=utf-8", process_file_plain(path, app::full_chain(), props)};
}

namespace {

Response guarded(const forms::RequestData& req, const PropertyMap* cached,
                 const ServerConfig& cfg, app::EmailTransport& transport) {
    try {
        PropertyMap props;
        forms::parse_request(req, props);
        auto cfg_props = cached ? *cached : load_configuration(cfg);
        return run_main(props, cfg_props, transport);
    } catch (const RequestError& e) {
        return plain(400, std::string(e.what()) + "\n");
    } catch (const std::exception& e) {
        diagnostic(std::string("request failed: ") + e.what());
        return plain(500, "internal server error\n");
    }
}

} // namespace

Response handle_request(const forms::RequestData& req, const ServerConfig& cfg,
                        app::EmailTransport& transport) {
    return guarded(req, nullptr, cfg, transport);
}

Service::Service(ServerConfig cfg)
    : Service(cfg, std::make_shared<app::SpoolFileTransport>(cfg.effective_spool_path())) {}

Service::Service(ServerConfig cfg, std::shared_ptr<app::EmailTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (cfg_.cache_config) cached_ = load_configuration(cfg_);
}

Response Service::handle(const forms::RequestData& req) const {
    return guarded(req, cached_ ? &*cached_ : nullptr, cfg_, *transport_);
}

struct HttpServer::Impl {
    const Service& service;
    httplib::Server http;

    explicit Impl(const Service& s) : service(s) {
        auto respond = [this](const httplib::Request& req, httplib::Response& res) {
            forms::RequestData data;
            if (req.method == "POST") {
                data.method = forms::Method::Post;
                data.body = req.body;
                data.content_type = req.get_header_value("Content-Type");
            }
            auto q = req.target.find('?');
            if (q != std::string::npos) data.query = req.target.substr(q + 1);

            auto out = service.handle(data);
            res.status = out.status;
            res.set_content(out.body, out.content_type);
        };
        http.Get("/main", respond);
        http.Post("/main", respond);
    }
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void HttpServer::stop() { impl_->http.stop(); }

void HttpServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

std::string cli_render(const RenderOptions& opts) {
    PropertyMap props;
    for (const auto& file : opts.config_files) config::parse(file, props);
    if (opts.error_config) config::parse_bare(*opts.error_config, "ERROR", props);
    if (opts.root_dir) props.set("CONFIG.rootDir", opts.root_dir->generic_string() + "/");
    for (const auto& var : opts.vars) {
        auto eq = var.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw Error("--var expects name=value, got '" + var + "'");
        }
        props.set("VAR." + var.substr(0, eq), var.substr(eq + 1));
    }
    return process_file_plain(opts.template_path, app::full_chain(), props);
}

} // namespace jasper::server
