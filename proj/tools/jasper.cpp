// jasper: serve the demo application or render a template offline.

#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "jasper/diagnostics.hpp"
#include "jasper/server.hpp"

namespace {

jasper::server::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Jasper template engine and feedback application"};
    cli.require_subcommand(1);
    bool verbose = false;
    cli.add_flag("-v,--verbose", verbose, "Report unresolved tokens and other diagnostics");

    jasper::server::ServerConfig cfg;
    std::string root;
    std::vector<std::string> configs;
    std::string error_config;
    std::string spool;
    auto* serve = cli.add_subcommand("serve", "Serve /main over HTTP");
    serve->add_option("--root", root, "Application root (contains template/)")
        ->envname("JASPER_ROOT")
        ->required();
    serve->add_option("--port", cfg.port, "Listen port")->envname("JASPER_PORT");
    serve->add_option("--host", cfg.host, "Listen address");
    serve->add_option("--config", configs, "Config files, platform first, relative to root");
    serve->add_option("--error-config", error_config, "Validation message file");
    serve->add_option("--spool", spool, "Feedback email spool file");
    serve->add_flag("--cache-config", cfg.cache_config, "Parse config files once at startup");

    jasper::server::RenderOptions render_opts;
    std::string template_path;
    std::vector<std::string> render_configs;
    std::string render_error_config;
    std::string render_root;
    auto* render = cli.add_subcommand("render", "Render a template to standard output");
    render->add_option("template", template_path, "Template file")->required();
    render->add_option("--config", render_configs, "Config files");
    render->add_option("--error-config", render_error_config, "Validation message file");
    render->add_option("--root", render_root, "Value for CONFIG.rootDir");
    render->add_option("--var", render_opts.vars, "Temporary variable name=value");

    CLI11_PARSE(cli, argc, argv);
    if (verbose) jasper::set_diagnostic_sink(jasper::stderr_sink());

    try {
        if (*render) {
            render_opts.template_path = template_path;
            for (const auto& c : render_configs) render_opts.config_files.emplace_back(c);
            if (!render_error_config.empty()) render_opts.error_config = render_error_config;
            if (!render_root.empty()) render_opts.root_dir = render_root;
            std::cout << jasper::server::cli_render(render_opts);
            std::cout.flush();
            return EXIT_SUCCESS;
        }

        cfg.root_dir = root;
        for (const auto& c : configs) cfg.config_files.emplace_back(c);
        if (!error_config.empty()) cfg.error_config = error_config;
        cfg.spool_path = spool;

        jasper::server::Service service(cfg);
        jasper::server::HttpServer http(service);
        int port = http.bind(cfg.host, cfg.port);
        if (port < 0) {
            std::cerr << "jasper: cannot bind " << cfg.host << ":" << cfg.port << '\n';
            return EXIT_FAILURE;
        }
        g_server = &http;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "jasper: serving http://" << cfg.host << ":" << port << "/main\n";
        http.listen_after_bind();
        return EXIT_SUCCESS;
    } catch (const std::exception& e) {
        std::cerr << "jasper: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
}
