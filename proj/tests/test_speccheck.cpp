#include <doctest.h>

#include <random>
#include <sstream>

#include "jasper/app.hpp"
#include "jasper/forms.hpp"
#include "jasper/speccheck.hpp"
#include "jasper/text.hpp"
#include "support.hpp"

using namespace jasper;
using namespace jasper::speccheck;
using namespace jasper::test;

namespace {

server::ServerConfig demo_config() {
    server::ServerConfig cfg;
    cfg.root_dir = kDemo;
    cfg.config_files = {"config/platform.config", "config/global.config"};
    cfg.error_config = "config/error.config";
    return cfg;
}

} // namespace

TEST_CASE("FileModel") {
    auto f = FileModel::from_text("a\r\nb\nc");
    CHECK(f.pointer == 1);
    CHECK(f.lines == std::vector<std::string>{"a\n", "b\n", "c"});
    CHECK(FileModel::from_text("").lines.empty());
    CHECK(FileModel::from_text("x\n").lines == std::vector<std::string>{"x\n"});
}

TEST_CASE("oracle_process_file") {
    PropertyMap props{{"VAR.vCurrentDate", "10th May 2011"}};
    auto file = FileModel::load(kFixtures / "date.html");
    CHECK(oracle_process_file(file, ResolverChain(), props) ==
          "<p>The current date is <strong>10th May 2011</strong></p>\n");
    CHECK(file.pointer == 0);

    auto empty = FileModel::from_text("");
    CHECK(oracle_process_file(empty, ResolverChain(), props) == "");
    CHECK(empty.pointer == 0);

    CHECK_THROWS_AS(oracle_process_file(file, ResolverChain(), props), HarnessError);
}

TEST_CASE("oracle agrees with the engine on fixtures") {
    std::vector<fs::path> files;
    for (const auto& dir : {kFixtures, kDemo / "template", kDemo / "template/_inc"}) {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file()) files.push_back(e.path());
        }
    }
    CHECK(files.size() > 10);
    for (const auto& path : files) {
        PropertyMap a{{"CONFIG.rootDir", kDemo.string()}, {"VAR.vCurrentDate", "today"},
                      {"FORM.page", "feedback"}, {"VAR.vPage", "p"}};
        PropertyMap b = a;
        auto model = FileModel::load(path);
        CHECK_MESSAGE(oracle_process_file(model, app::full_chain(), a) ==
                          process_file_plain(path, app::full_chain(), b),
                      path);
    }
}

TEST_CASE("property: oracle agrees with the engine on random templates") {
    std::mt19937 rng(41);
    std::uniform_int_distribution<int> lines(0, 5), coin(0, 1);
    TempDir dir;
    ResolverChain chain({{"upper", [](const Token& t, PropertyMap&) -> HandlerResult {
                              if (t.name == "b") return "B(" + t.arg.value_or("-") + ")";
                              return std::nullopt;
                          }}});
    for (int i = 0; i < 200; ++i) {
        std::string text;
        for (int n = lines(rng); n > 0; --n) {
            text += random_template_line(rng);
            text += coin(rng) ? "\n" : "\r\n";
        }
        if (coin(rng)) text += random_template_line(rng);

        PropertyMap props;
        if (coin(rng)) props.set("VAR.a", "va");
        if (coin(rng)) props.set("FORM.a", "fa");
        if (coin(rng)) props.set("CONFIG.x:y:z", "cxyz");
        PropertyMap copy = props;

        auto path = write_file(dir / "t.html", text);
        auto model = FileModel::from_text(text);
        CHECK(oracle_process_file(model, chain, props) == process_file_plain(path, chain, copy));
    }
}

TEST_CASE("parse_triple") {
    auto t = parse_triple("# c\n[pre]\nVAR.vExclaim=comments\n!FORM.comments\n[op]\n"
                          "form_errors_handler EXCLAIM:comments\n[post]\nVAR.vExclaim=comments\n"
                          "[return]\nequals !\ncontains x y\n[effects]\nsent 2\n",
                          "t");
    REQUIRE(t.pre.entries.size() == 2);
    CHECK(t.pre.entries[0].value == "comments");
    CHECK_FALSE(t.pre.entries[1].value);
    CHECK(t.op.name == "form_errors_handler");
    CHECK(t.op.arg == "EXCLAIM:comments");
    REQUIRE(t.post.return_checks.size() == 2);
    CHECK(t.post.return_checks[1].arg == "x y");
    CHECK(t.post.sent == 2);

    CHECK_THROWS_AS(parse_triple("[pre]\nVAR.x=1\n", "no-op"), HarnessError);
    CHECK_THROWS_AS(parse_triple("[op]\nmain\n[pre]\nnoprefix=1\n", "bad-key"), HarnessError);
    CHECK_THROWS_AS(parse_triple("[op]\nmain\n[pre]\nVAR.x=1\nVAR.x=2\n", "dup"), HarnessError);
    CHECK_THROWS_AS(parse_triple("[op]\nmain\n[return]\nresembles x\n", "bad-check"), HarnessError);
    CHECK_THROWS_AS(parse_triple("main\n", "no-section"), HarnessError);
    CHECK_THROWS_AS(parse_triple("[wat]\n", "bad-section"), HarnessError);
}

TEST_CASE("check_triple") {
    Harness harness(demo_config());

    SUBCASE("the EXCLAIM triple holds") {
        auto t = parse_triple("[pre]\nVAR.vExclaim=comments\n[op]\nform_errors_handler EXCLAIM:comments\n"
                              "[post]\nVAR.vExclaim=comments\n[return]\nequals !\n",
                              "exclaim");
        auto report = check_triple(harness, t);
        CHECK(report.passed);
        CHECK(report.message.empty());
    }
    SUBCASE("the main triple holds") {
        auto t = load_triple(kDemo / "triples/07_validation_errors_shown.triple");
        auto report = harness.check(t);
        CHECK_MESSAGE(report.passed, report.message);
    }
    SUBCASE("a false return expectation fails and is named") {
        auto t = parse_triple("[pre]\nVAR.vExclaim=comments\n[op]\nform_errors_handler EXCLAIM:comments\n"
                              "[return]\nequals ?\n",
                              "false");
        auto report = harness.check(t);
        CHECK_FALSE(report.passed);
        CHECK(report.message == "return equals '?': got '!'");
    }
    SUBCASE("a false post entry fails") {
        auto t = parse_triple("[pre]\nVAR.vExclaim=comments\n[op]\nform_errors_handler EXCLAIM:comments\n"
                              "[post]\nVAR.vExclaim=fullname\n",
                              "false-post");
        auto report = harness.check(t);
        CHECK_FALSE(report.passed);
        CHECK(report.message.starts_with("post VAR.vExclaim"));
    }
    SUBCASE("frame violations are reported") {
        auto t = parse_triple("[pre]\nFORM.page=feedback\nFORM.command=FEEDBACK\nFORM.fullname=a\n"
                              "FORM.comments=b\n[op]\npreprocess\n",
                              "frame");
        auto report = harness.check(t);
        CHECK_FALSE(report.passed);
        CHECK(report.message.starts_with("frame FORM.page"));
    }
    SUBCASE("effect counts are checked") {
        auto t = parse_triple("[pre]\nFORM.page=feedback\n[op]\nmain\n[effects]\nsent 1\n", "sent");
        auto report = harness.check(t);
        CHECK_FALSE(report.passed);
        CHECK(report.message.starts_with("effects"));
    }
    SUBCASE("unmatched tokens") {
        auto pass = parse_triple("[op]\nform_controls_handler EXCLAIM:x\n[return]\nunmatched\n", "u");
        CHECK(harness.check(pass).passed);
        auto fail = parse_triple("[op]\nform_errors_handler EXCLAIM:x\n[return]\nunmatched\n", "u2");
        CHECK_FALSE(harness.check(fail).passed);
    }
    SUBCASE("unknown operation") {
        auto t = parse_triple("[op]\nno_such_op\n", "unknown");
        CHECK_THROWS_AS(harness.check(t), HarnessError);
    }
}

TEST_CASE("check_dispatch") {
    auto chain = app::full_chain();
    PropertyMap props{{"SERIAL.feedbackForm", "<form/>"}, {"VAR.vExclaim", "x"}};

    auto feedback = check_dispatch(chain, Token::from_raw("FEEDBACK_FORM"), props);
    CHECK(feedback.passed);
    CHECK(feedback.matched_position == 1);
    CHECK(feedback.consulted == std::vector<std::string>{"main"});

    auto exclaim = check_dispatch(chain, Token::from_raw("EXCLAIM:x"), props);
    CHECK(exclaim.passed);
    CHECK(exclaim.matched_position == 3);
    CHECK(exclaim.consulted == std::vector<std::string>{"main", "base", "form_errors"});

    auto unresolved = check_dispatch(chain, Token::from_raw("nothing"), props);
    CHECK(unresolved.passed);
    CHECK(unresolved.matched_position == chain.handlers().size() + 1);
    CHECK(unresolved.consulted.back() == "<default>");

    SUBCASE("a handler that answers differently each time is caught") {
        auto flips = std::make_shared<int>(0);
        ResolverChain flaky({{"flaky", [flips](const Token&, PropertyMap&) -> HandlerResult {
                                 if ((*flips)++ % 2 == 0) return "first";
                                 return std::nullopt;
                             }}});
        auto report = check_dispatch(flaky, Token::from_raw("t"), PropertyMap{});
        CHECK_FALSE(report.passed);
    }
}

TEST_CASE("shipped suite passes and covers the four behaviours") {
    std::ostringstream out;
    auto summary = run_suite(kDemo / "triples", out);
    CHECK_MESSAGE(summary.failed == 0, out.str());
    CHECK(summary.passed >= 13);

    std::size_t behaviours = 0;
    for (const auto& e : fs::directory_iterator(kDemo / "triples")) {
        auto content = text::read_file(e.path());
        if (content.find("# Behaviour:") != std::string::npos) ++behaviours;
    }
    CHECK(behaviours >= 4);
}

TEST_CASE("run_suite reports failures") {
    TempDir dir;
    write_file(dir / "a.triple", "[op]\nform_errors_handler EXCLAIM:x\n[return]\nequals ?\n");
    write_file(dir / "b.triple", "[op]\nbogus\n");
    write_file(dir / "c.triple", "[pre]\nVAR.vExclaim=x\n[op]\nform_errors_handler EXCLAIM:x\n[return]\nequals !\n");
    std::ostringstream out;
    auto summary = run_suite(dir.path(), out);
    CHECK(summary.passed == 1);
    CHECK(summary.failed == 2);
    CHECK(out.str().find("FAIL a.triple: return equals '?'") != std::string::npos);
    CHECK(out.str().find("FAIL b.triple: unknown operation 'bogus'") != std::string::npos);
    CHECK(out.str().find("PASS c.triple") != std::string::npos);

    CHECK_THROWS_AS(run_suite(dir / "missing", out), HarnessError);
}
