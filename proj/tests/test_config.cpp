#include <doctest.h>

#include <string>

#include "akd/config.hpp"
#include "akd/errors.hpp"

using namespace akd;

namespace {

const char* kMinimal = R"(
[dataset]
kind = synthetic
classes = 4
per_class = 10
dim = 6

[loop]
strategies = pcoreset
)";

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
    const ExperimentConfig config = parse_config_text(kMinimal, "<test>");
    CHECK(config.lambda == 0.5);
    CHECK(config.eta == 2.0);
    CHECK(config.teacher.zeta == 0.01);
    CHECK(config.alpha == 0.5);
    CHECK(config.beta == 1.0);
    CHECK(config.epsilon_threshold == 0.3);
    CHECK(config.rounds == 16);
    CHECK(config.query_size == 0);  // resolves to one per class
    CHECK(config.shots_per_class == 1);
    CHECK(config.epochs == 200);
    CHECK(config.seeds == std::vector<std::uint64_t>{0, 1, 2, 3, 4});
    CHECK(config.strategies == std::vector<std::string>{"pcoreset"});
    CHECK(config.frameworks == std::vector<std::string>{"zero_shot"});
}

TEST_CASE("out-of-range lambda is reported by name") {
    const std::string text = std::string(kMinimal) + "\n[student]\nlambda = 1.5\n";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lambda") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with a suggestion") {
    const std::string text = std::string(kMinimal) + "\n[student]\nlamda = 0.5\n";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("lamda") != std::string::npos);
        CHECK(msg.find("did you mean 'lambda'") != std::string::npos);
    }
}

TEST_CASE("all range violations are listed together") {
    const std::string text = R"(
[dataset]
kind = synthetic
classes = 1
per_class = 0
dim = 6

[student]
lambda = -0.2
eta = 0

[run]
workers = 0
)";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("classes") != std::string::npos);
        CHECK(msg.find("per_class") != std::string::npos);
        CHECK(msg.find("lambda") != std::string::npos);
        CHECK(msg.find("eta") != std::string::npos);
        CHECK(msg.find("workers") != std::string::npos);
    }
}

TEST_CASE("lists, booleans and comments parse") {
    const std::string text = R"(
# experiment sweep
[dataset]
kind = synthetic
classes = 3
per_class = 8
dim = 4
seed = 99

[loop]
strategies = random, entropy, pcoreset   # three of them
frameworks = no_distill, zero_shot
rounds = 2

[student]
single_head = true
warm_start = false

[run]
seeds = 7, 8
workers = 2
)";
    const ExperimentConfig config = parse_config_text(text, "<test>");
    CHECK(config.strategies == std::vector<std::string>{"random", "entropy", "pcoreset"});
    CHECK(config.frameworks == std::vector<std::string>{"no_distill", "zero_shot"});
    CHECK(config.single_head);
    CHECK_FALSE(config.warm_start);
    CHECK(config.seeds == std::vector<std::uint64_t>{7, 8});
    CHECK(config.dataset.seed == 99);
    CHECK(config.workers == 2);
}

TEST_CASE("type errors carry line numbers") {
    const std::string text = std::string(kMinimal) + "\n[student]\nepochs = soon\n";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("epochs must be an integer") != std::string::npos);
        CHECK(msg.find("line") != std::string::npos);
    }
}

TEST_CASE("unknown strategy and framework names are rejected") {
    const std::string text = R"(
[dataset]
kind = synthetic
classes = 3
per_class = 8
dim = 4

[loop]
strategies = pcoresett
frameworks = full_shot
)";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("pcoresett") != std::string::npos);
        CHECK(msg.find("full_shot") != std::string::npos);
    }
}

TEST_CASE("few_shot framework requires a prototype teacher") {
    const std::string text = R"(
[dataset]
kind = synthetic
classes = 3
per_class = 8
dim = 4

[loop]
strategies = random
frameworks = few_shot
)";
    CHECK_THROWS_AS(parse_config_text(text, "<test>"), ConfigError);
    const std::string fixed = std::string(text) + "\n[teacher]\nkind = prototype\n";
    CHECK_NOTHROW(parse_config_text(fixed, "<test>"));
}

TEST_CASE("config hash is stable under reordering and sensitive to values") {
    const std::string a = R"(
[dataset]
kind = synthetic
classes = 4
per_class = 10
dim = 6

[student]
lambda = 0.5
eta = 2

[loop]
strategies = pcoreset
)";
    const std::string b = R"(
[student]
eta = 2
lambda = 0.5

[loop]
strategies = pcoreset

[dataset]
dim = 6
classes = 4
kind = synthetic
per_class = 10
)";
    const ExperimentConfig ca = parse_config_text(a, "<a>");
    const ExperimentConfig cb = parse_config_text(b, "<b>");
    CHECK(ca.hash() == cb.hash());

    const std::string c = std::string(a) + "\n[metrics]\nknn_k = 5\n";
    CHECK(parse_config_text(c, "<c>").hash() != ca.hash());
}

TEST_CASE("missing files are reported for file-backed datasets") {
    const std::string text = R"(
[dataset]
kind = files
features_path = /nonexistent/features.csv
labels_path = /nonexistent/labels.txt
test_features_path = /nonexistent/test_features.csv
test_labels_path = /nonexistent/test_labels.txt

[loop]
strategies = random
)";
    try {
        parse_config_text(text, "<test>");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("file not found") != std::string::npos);
    }
}
