#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "econlab/parsing.hpp"

using namespace econlab;

namespace {

struct LabeledCase {
    std::string file;
    std::string parser;
    std::string group;
    std::string answer_type;
    std::string status;
    std::string value_a;
    std::string value_b;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    while (fields.size() < 7) fields.emplace_back();
    return fields;
}

std::vector<LabeledCase> load_labels() {
    const auto path = std::filesystem::path(ECONLAB_FIXTURE_DIR) / "labels.csv";
    std::ifstream in(path);
    REQUIRE_MESSAGE(in.good(), "missing ", path.string());
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line == "file,parser,group,answer_type,status,value_a,value_b");
    std::vector<LabeledCase> cases;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        cases.push_back({f[0], f[1], f[2], f[3], f[4], f[5], f[6]});
    }
    return cases;
}

std::string read_fixture(const std::string& name) {
    const auto path = std::filesystem::path(ECONLAB_FIXTURE_DIR) / name;
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing fixture ", path.string());
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

}  // namespace

TEST_CASE("every labeled completion classifies as annotated") {
    const auto cases = load_labels();
    REQUIRE(cases.size() == 72);
    for (const auto& c : cases) {
        INFO("fixture ", c.file);
        const std::string text = read_fixture(c.file);
        if (c.parser == "json") {
            const auto fields = answer_fields(domain_from_string(c.group));
            const auto outcomes = extract_json_allocation(text, fields, 1);
            REQUIRE(outcomes.size() == 1);
            const auto& out = outcomes.front();
            CHECK_MESSAGE(to_string(out.status) == c.status, out.detail);
            if (c.status == "valid") {
                REQUIRE(out.allocation.has_value());
                CHECK(out.allocation->points_a ==
                      doctest::Approx(std::stod(c.value_a)).epsilon(1e-12));
                CHECK(out.allocation->points_b ==
                      doctest::Approx(std::stod(c.value_b)).epsilon(1e-12));
            } else {
                CHECK(!out.allocation.has_value());
                CHECK(!out.detail.empty());
            }
        } else {
            REQUIRE(c.parser == "bracket");
            const auto spec = scenario_spec(scenario_from_string(c.group));
            const auto at = answer_type_from_string(c.answer_type);
            const auto out = extract_bracket_value(text, spec, at);
            CHECK_MESSAGE(to_string(out.status) == c.status, out.detail);
            if (c.status == "valid") {
                REQUIRE(out.game.has_value());
                CHECK(out.game->scenario == spec.id);
                CHECK(out.game->value == std::stod(c.value_a));
            } else {
                CHECK(!out.game.has_value());
                CHECK(!out.detail.empty());
            }
        }
    }
}

TEST_CASE("multi-block extraction keeps block order") {
    std::string text = "Here are my decisions for the three rounds.\n\n";
    const double splits[3][2] = {{60, 40}, {25, 75}, {100, 0}};
    for (const auto& s : splits) {
        std::ostringstream block;
        block << "```json\n{\n\"Points for investing Asset A\": " << s[0]
              << ",\n\"Points for investing Asset B\": " << s[1] << "\n}\n```\n\n";
        text += block.str();
    }
    const auto outcomes =
        extract_json_allocation(text, answer_fields(Domain::risk), 3);
    REQUIRE(outcomes.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(outcomes[i].status == ParseStatus::valid);
        CHECK(outcomes[i].allocation->points_a == splits[i][0]);
        CHECK(outcomes[i].allocation->points_b == splits[i][1]);
    }
}

TEST_CASE("per-block failures keep working blocks intact") {
    const std::string text =
        "```json\n"
        "{\"Points for investing Asset A\": 55, \"Points for investing Asset B\": 45}\n"
        "```\n"
        "```json\n"
        "{\"Points for investing Asset A\": 55}\n"
        "```\n";
    const auto outcomes =
        extract_json_allocation(text, answer_fields(Domain::risk), 2);
    REQUIRE(outcomes.size() == 2);
    CHECK(outcomes[0].status == ParseStatus::valid);
    CHECK(outcomes[1].status == ParseStatus::format);
    CHECK(outcomes[1].detail.find("block 2") != std::string::npos);
}

TEST_CASE("block count mismatches name both numbers") {
    const std::string one_block =
        "```json\n"
        "{\"Points for investing Asset A\": 55, \"Points for investing Asset B\": 45}\n"
        "```\n";
    const auto outcomes =
        extract_json_allocation(one_block + one_block, answer_fields(Domain::risk), 1);
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].status == ParseStatus::format);
    CHECK(outcomes[0].detail.find("expected 1") != std::string::npos);
    CHECK(outcomes[0].detail.find("found 2") != std::string::npos);
}

TEST_CASE("extra bracket values are ignored but counted") {
    const auto spec = scenario_spec(Scenario::dictator);
    const auto out = extract_bracket_value("I give [[$40]] or maybe [[$45]].", spec,
                                           AnswerType::open);
    CHECK(out.status == ParseStatus::valid);
    CHECK(out.game->value == 40.0);
    CHECK(out.detail.find("extra highlighted") != std::string::npos);
}

TEST_CASE("refusal battery") {
    CHECK(classify_refusal("As an AI, I cannot participate in gambling."));
    CHECK(classify_refusal("I must decline to answer this."));
    CHECK(classify_refusal("Sorry, but I don't feel comfortable with this game."));
    CHECK(classify_refusal("I am not capable of making decisions on investments."));

    CHECK(!classify_refusal(""));
    CHECK(!classify_refusal("I cannot wait to answer!"));
    CHECK(!classify_refusal("The allocation is 60 and 40."));
    CHECK(!classify_refusal("Participation pays off: I allocate 50 points each."));
}

TEST_CASE("refusal classification never overrides an extractable answer") {
    const std::string mixed =
        "As an AI, I cannot participate in real gambling, but in this "
        "hypothetical I allocate points as follows.\n"
        "```json\n"
        "{\"Points for investing Asset A\": 70, \"Points for investing Asset B\": 30}\n"
        "```\n";
    const auto outcomes =
        extract_json_allocation(mixed, answer_fields(Domain::risk), 1);
    REQUIRE(outcomes.size() == 1);
    CHECK(outcomes[0].status == ParseStatus::valid);
    CHECK(outcomes[0].allocation->points_a == 70.0);
}
