#include <doctest.h>

#include "jasper/app.hpp"
#include "jasper/config.hpp"
#include "jasper/error.hpp"
#include "jasper/text.hpp"
#include "support.hpp"

using namespace jasper;
using namespace jasper::app;
using namespace jasper::test;

namespace {

PropertyMap demo_props(const fs::path& root) {
    PropertyMap props;
    config::parse(root / "config/platform.config", props);
    config::parse(root / "config/global.config", props);
    config::parse_bare(root / "config/error.config", "ERROR", props);
    props.set("CONFIG.rootDir", root.string() + "/");
    return props;
}

} // namespace

TEST_CASE("base_handler MAIN") {
    PropertyMap props{{"CONFIG.rootDir", kDemo.string()},
                      {"CONFIG.appPath", "/"},
                      {"CONFIG.procPath", "php/"},
                      {"CONFIG.procExt", ".php"}};
    CHECK(base_handler(Token::from_raw("MAIN"), props) == "/php/main.php");

    props.set("CONFIG.procPath", "");
    props.set("CONFIG.procExt", "");
    CHECK(base_handler(Token::from_raw("MAIN"), props) == "/main");

    PropertyMap via_config;
    config::parse(kFixtures / "php.config", via_config);
    config::parse(kFixtures / "global.config", via_config);
    via_config.set("CONFIG.rootDir", kDemo.string());
    CHECK(base_handler(Token::from_raw("MAIN"), via_config) == "/php/main.php");
}

TEST_CASE("base_handler PAGE") {
    PropertyMap props{{"CONFIG.rootDir", kDemo.string()}};
    CHECK(base_handler(Token::from_raw("PAGE:test"), props) == "page=test");
    CHECK_FALSE(props.contains("VAR.vPage"));
    CHECK(base_handler(Token::from_raw("PAGE:a b&c"), props) == "page=a+b%26c");
    CHECK_THROWS_AS(base_handler(Token::from_raw("PAGE"), props), TokenUsageError);
    CHECK_THROWS_AS(base_handler(Token::from_raw("PAGE:"), props), TokenUsageError);
    CHECK_FALSE(base_handler(Token::from_raw("FEEDBACK_FORM"), props));
}

TEST_CASE("base_handler errors") {
    TempDir dir;
    PropertyMap props{{"CONFIG.rootDir", dir.path().string()}};
    CHECK_THROWS_AS(base_handler(Token::from_raw("MAIN"), props), IoError);
    CHECK_THROWS_AS(base_handler(Token::from_raw("PAGE:x"), props), IoError);
    CHECK_FALSE(props.contains("VAR.vPage"));

    PropertyMap no_root;
    CHECK_THROWS_AS(base_handler(Token::from_raw("MAIN"), no_root), Error);
}

TEST_CASE("full chain renders a link") {
    PropertyMap props{{"CONFIG.rootDir", kDemo.string()}, {"CONFIG.appPath", "/"}};
    CHECK(process_file_plain(kFixtures / "link.html", full_chain(), props) ==
          "<a href=\"/main?page=test\">Test page</a>\n");
}

TEST_CASE("main_handler") {
    auto props = demo_props(kDemo);
    props.set("FORM.page", "feedback");
    RecordingTransport transport;
    preprocess(props, transport);
    auto form = main_handler(Token::from_raw("FEEDBACK_FORM"), props);
    REQUIRE(form);
    CHECK(form->find(R"(<form action="/main" method="POST">)") != std::string::npos);
    CHECK(form->find(R"(<input type="text" name="fullname" value=""/>)") != std::string::npos);

    PropertyMap fresh;
    CaptureDiagnostics diag;
    CHECK(main_handler(Token::from_raw("FEEDBACK_FORM"), fresh) == "");
    CHECK(diag.messages.size() == 1);
    CHECK_FALSE(main_handler(Token::from_raw("MAIN"), fresh));
}

TEST_CASE("preprocess page transitions") {
    SUBCASE("first showing keeps the page") {
        auto props = demo_props(kDemo);
        props.set("FORM.page", "feedback");
        RecordingTransport t;
        preprocess(props, t);
        CHECK(props.get("FORM.page") == "feedback");
        CHECK(t.sent.empty());
    }
    SUBCASE("success") {
        auto props = demo_props(kDemo);
        props.set("FORM.page", "feedback");
        props.set("FORM.command", "FEEDBACK");
        props.set("FORM.fullname", "James Smith");
        props.set("FORM.comments", "Hello, world!!");
        RecordingTransport t;
        preprocess(props, t);
        CHECK(props.get("FORM.page") == "feedback_success");
        REQUIRE(t.sent.size() == 1);
        CHECK(t.sent[0].subject == "Site feedback");
        CHECK(t.sent[0].from_name == "Site feedback");
        CHECK(t.sent[0].to == "webmaster@localhost");
        CHECK(t.sent[0].body.find("James Smith") != std::string::npos);
        CHECK(t.sent[0].body.find("Hello, world!!") != std::string::npos);
    }
    SUBCASE("failure") {
        auto props = demo_props(kDemo);
        props.set("FORM.page", "feedback");
        props.set("FORM.command", "FEEDBACK");
        props.set("FORM.fullname", "James Smith");
        props.set("FORM.comments", "Hi");
        RecordingTransport t(false);
        preprocess(props, t);
        CHECK(props.get("FORM.page") == "feedback_failure");
    }
    SUBCASE("other pages are untouched") {
        auto props = demo_props(kDemo);
        props.set("FORM.page", "about");
        props.set("FORM.command", "FEEDBACK");
        auto before = props;
        RecordingTransport t;
        preprocess(props, t);
        CHECK(props == before);
    }
}

TEST_CASE("property: preprocess only ever yields the three page values") {
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int i = 0; i < 200; ++i) {
        auto props = demo_props(kDemo);
        std::string page = coin(rng) ? "feedback" : random_string(rng, "abfk_", 8) + "p";
        props.set("FORM.page", page);
        if (coin(rng)) props.set("FORM.command", "FEEDBACK");
        if (coin(rng)) props.set("FORM.fullname", random_string(rng, "ab ", 3));
        if (coin(rng)) props.set("FORM.comments", random_string(rng, "cd ", 3));
        RecordingTransport t(coin(rng));
        preprocess(props, t);
        auto after = props.value_or_empty("FORM.page");
        CHECK((after == page || after == "feedback_success" || after == "feedback_failure"));
        if (after != page) CHECK(page == "feedback");
    }
}

TEST_CASE("double submission is precluded once the page moves on") {
    TempDir dir;
    SpoolFileTransport spool(dir / "spool" / "mail.spool");
    auto props = demo_props(kDemo);
    props.set("FORM.page", "feedback");
    props.set("FORM.command", "FEEDBACK");
    props.set("FORM.fullname", "James Smith");
    props.set("FORM.comments", "Hello");
    preprocess(props, spool);
    REQUIRE(props.get("FORM.page") == "feedback_success");
    CHECK(count_spool_records(spool.path()) == 1);

    auto replay = demo_props(kDemo);
    for (const auto& [k, v] : props) {
        if (k.starts_with("FORM.")) replay.set(k, v);
    }
    preprocess(replay, spool);
    CHECK(count_spool_records(spool.path()) == 1);
    CHECK(replay.get("FORM.page") == "feedback_success");
}

TEST_CASE("spool file transport") {
    TempDir dir;
    auto path = dir / "mail.spool";
    SpoolFileTransport spool(path);
    CHECK(count_spool_records(path) == 0);

    auto props = demo_props(kDemo);
    props.set("FORM.fullname", "James Smith");
    props.set("FORM.comments", "line one\n.\n.dot");
    CHECK(send_feedback_email(props, spool));
    CHECK(count_spool_records(path) == 1);

    props.set("FORM.fullname", "Second\r\nInjected: header");
    CHECK(send_feedback_email(props, spool));
    CHECK(count_spool_records(path) == 2);

    auto content = text::read_file(path);
    CHECK(content.starts_with("to: webmaster@localhost\nfrom-name: Site feedback\nsubject: Site feedback\n\n"
                              "Full name: James Smith\n\nComments:\nline one\n..\n..dot\n.\n"));
    CHECK(content.find("Full name: James Smith") < content.find("Full name: Second"));
}

TEST_CASE("send_feedback_email failure paths") {
    auto props = demo_props(kDemo);
    props.set("FORM.fullname", "a");
    props.set("FORM.comments", "b");
    RecordingTransport failing(false);
    CHECK_FALSE(send_feedback_email(props, failing));
    CHECK(failing.sent.size() == 1);

    props.unset("CONFIG.smtpHost");
    RecordingTransport ok;
    CaptureDiagnostics diag;
    CHECK_FALSE(send_feedback_email(props, ok));
    CHECK(ok.sent.empty());

    TempDir dir;
    write_file(dir / "blocker", "");
    SpoolFileTransport unwritable(dir / "blocker" / "mail.spool");
    props.set("CONFIG.smtpHost", "localhost");
    CHECK_FALSE(send_feedback_email(props, unwritable));
}

TEST_CASE("MAIN output is fully resolved") {
    for (auto platform : {"php.config", "global.config"}) {
        PropertyMap props;
        config::parse(kFixtures / platform, props);
        props.set("CONFIG.rootDir", kDemo.string());
        auto uri = base_handler(Token::from_raw("MAIN"), props);
        REQUIRE(uri);
        CHECK(uri->find("[[") == std::string::npos);
    }
}
