#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "botmut/error.hpp"
#include "botmut/model.hpp"
#include "botmut/rasa.hpp"
#include "test_support.hpp"

using namespace botmut;

namespace {

ChatbotProject load_rps() { return rasa::parse_project(testsupport::rps_dir()); }

std::vector<std::string> broken_codes(const ValidationReport& report) {
    std::vector<std::string> codes;
    for (const auto& issue : report.broken()) codes.push_back(issue.code);
    std::sort(codes.begin(), codes.end());
    return codes;
}

}  // namespace

TEST_CASE("validate accepts the rps-mini fixture with no issues") {
    ChatbotProject project = load_rps();
    ValidationReport report = validate(project);
    CHECK(report.issues.empty());
    CHECK(report.deployable());
}

TEST_CASE("validate reports an unresolvable intent reference in a story") {
    ChatbotProject project = load_rps();
    for (auto& flow : project.flows) {
        if (flow.kind == FlowKind::Story) flow.steps.insert(flow.steps.begin(), FlowStep::intent("flee"));
    }
    ValidationReport report = validate(project);
    CHECK(!report.deployable());
    auto codes = broken_codes(report);
    REQUIRE(codes.size() == 1);
    CHECK(codes[0] == "UndefinedIntentRef");
}

TEST_CASE("validate reports contradictory rules") {
    ChatbotProject project = load_rps();
    project.responses.push_back({"utter_bye", {"Bye."}});
    Flow second;
    second.kind = FlowKind::Rule;
    second.name = "greet-rule-2";
    second.steps = {FlowStep::intent("greet"), FlowStep::action("utter_bye")};
    project.flows.push_back(second);
    ValidationReport report = validate(project);
    CHECK(report.has_code("ContradictoryRules"));
    CHECK(!report.deployable());
}

TEST_CASE("identical rules are duplicates of behavior, not contradictions") {
    ChatbotProject project = load_rps();
    Flow copy = *project.find_flow(FlowKind::Rule, "greet-rule");
    copy.name = "greet-rule-copy";
    project.flows.push_back(copy);
    CHECK(!validate(project).has_code("ContradictoryRules"));
}

TEST_CASE("validate reports a rule that starts with an action") {
    ChatbotProject project = load_rps();
    Flow* rule = nullptr;
    for (auto& flow : project.flows) {
        if (flow.kind == FlowKind::Rule) rule = &flow;
    }
    REQUIRE(rule != nullptr);
    rule->steps.erase(rule->steps.begin());
    ValidationReport report = validate(project);
    CHECK(report.has_code("DanglingRuleAction"));
}

TEST_CASE("validate reports an empty flow") {
    ChatbotProject project = load_rps();
    project.flows.push_back({FlowKind::Story, "hollow", {}});
    CHECK(validate(project).has_code("EmptyFlow"));
}

TEST_CASE("validate reports undeclared entities in mappings and annotations") {
    ChatbotProject project = load_rps();
    project.entities.clear();
    ValidationReport report = validate(project);
    auto codes = broken_codes(report);
    CHECK(std::count(codes.begin(), codes.end(), "UndefinedEntityRef") >= 2);
}

TEST_CASE("validate is deterministic") {
    ChatbotProject project = load_rps();
    project.flows.push_back({FlowKind::Story, "hollow", {}});
    ValidationReport first = validate(project);
    ValidationReport second = validate(project);
    REQUIRE(first.issues.size() == second.issues.size());
    for (size_t i = 0; i < first.issues.size(); ++i) {
        CHECK(first.issues[i].code == second.issues[i].code);
        CHECK(first.issues[i].location == second.issues[i].location);
    }
}

TEST_CASE("usage sites of an intent cover the nlu block and the flows") {
    ChatbotProject project = load_rps();
    auto sites = usage_sites(project, ElementKind::Intent, "greet");
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].file_role == "nlu");
    CHECK(sites[1].file_role == "rules");
    CHECK(sites[1].path.find("greet-rule") != std::string::npos);
}

TEST_CASE("usage sites of an entity cover slot mappings and annotations") {
    ChatbotProject project = load_rps();
    auto sites = usage_sites(project, ElementKind::Entity, "choice");
    REQUIRE(sites.size() == 2);
    CHECK(sites[0].file_role == "domain");
    CHECK(sites[0].path.find("slot choice") != std::string::npos);
    CHECK(sites[1].file_role == "nlu");
    CHECK(sites[1].path.find("intent play") != std::string::npos);
}

TEST_CASE("usage sites of a slot are its response placeholders") {
    ChatbotProject project = load_rps();
    auto sites = usage_sites(project, ElementKind::Slot, "choice");
    REQUIRE(sites.size() == 2);  // utter_greet and utter_result interpolate it
    for (const auto& site : sites) CHECK(site.file_role == "domain");
}

TEST_CASE("usage sites of an action cover flow steps and custom-action dispatch") {
    ChatbotProject project = load_rps();
    auto action_sites = usage_sites(project, ElementKind::Action, "action_play_result");
    REQUIRE(action_sites.size() == 1);
    CHECK(action_sites[0].file_role == "stories");

    auto uttered_sites = usage_sites(project, ElementKind::Action, "utter_result");
    REQUIRE(uttered_sites.size() == 1);
    CHECK(uttered_sites[0].path.find("action_play_result") != std::string::npos);
}

TEST_CASE("a placeholder naming an unknown slot is a deploy blocker") {
    ChatbotProject project = load_rps();
    std::erase_if(project.slots, [](const Slot& s) { return s.name == "choice"; });
    ValidationReport report = validate(project);
    CHECK(report.has_code("UndefinedSlotRef"));
    CHECK(!report.deployable());
}

TEST_CASE("usage sites of an unknown element raise UnknownElement") {
    ChatbotProject project = load_rps();
    CHECK_THROWS_WITH_AS(usage_sites(project, ElementKind::Intent, "nonexistent"),
                         doctest::Contains("nonexistent"), Error);
    try {
        usage_sites(project, ElementKind::Intent, "nonexistent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnknownElement);
    }
}

TEST_CASE("removing any used fixture element breaks validation") {
    ChatbotProject original = load_rps();

    struct Element {
        ElementKind kind;
        std::string name;
    };
    std::vector<Element> elements;
    for (const auto& intent : original.intents) elements.push_back({ElementKind::Intent, intent.name});
    for (const auto& entity : original.entities) elements.push_back({ElementKind::Entity, entity.name});
    for (const auto& slot : original.slots) elements.push_back({ElementKind::Slot, slot.name});
    for (const auto& action : original.actions) elements.push_back({ElementKind::Action, action.name});
    for (const auto& response : original.responses) elements.push_back({ElementKind::Action, response.name});

    for (const auto& element : elements) {
        CAPTURE(element.name);
        auto sites = usage_sites(original, element.kind, element.name);
        if (sites.empty()) continue;
        ChatbotProject project = original;
        switch (element.kind) {
            case ElementKind::Intent:
                std::erase_if(project.intents, [&](const Intent& i) { return i.name == element.name; });
                break;
            case ElementKind::Entity:
                std::erase_if(project.entities, [&](const Entity& e) { return e.name == element.name; });
                break;
            case ElementKind::Slot:
                std::erase_if(project.slots, [&](const Slot& s) { return s.name == element.name; });
                break;
            case ElementKind::Action:
                std::erase_if(project.actions, [&](const ActionDef& a) { return a.name == element.name; });
                std::erase_if(project.responses,
                              [&](const ResponseTemplate& r) { return r.name == element.name; });
                break;
        }
        CHECK(!validate(project).deployable());
    }
}

TEST_CASE("every usage site of a valid project resolves") {
    ChatbotProject project = load_rps();
    REQUIRE(validate(project).deployable());
    for (const auto& intent : project.intents) {
        CHECK_NOTHROW(usage_sites(project, ElementKind::Intent, intent.name));
    }
    for (const auto& entity : project.entities) {
        CHECK_NOTHROW(usage_sites(project, ElementKind::Entity, entity.name));
    }
}

TEST_CASE("structural equality ignores declaration order of top-level collections") {
    ChatbotProject a = load_rps();
    ChatbotProject b = a;
    std::mt19937 rng(7);
    std::shuffle(b.intents.begin(), b.intents.end(), rng);
    std::shuffle(b.entities.begin(), b.entities.end(), rng);
    std::shuffle(b.responses.begin(), b.responses.end(), rng);
    std::shuffle(b.flows.begin(), b.flows.end(), rng);
    CHECK(structurally_equal(a, b));
    CHECK(structurally_equal(b, a));
}

TEST_CASE("structural equality sees real differences") {
    ChatbotProject a = load_rps();
    ChatbotProject b = a;
    b.session.carry_over_slots = !b.session.carry_over_slots;
    CHECK(!structurally_equal(a, b));

    ChatbotProject c = a;
    c.responses.front().variants.front() += "!";
    CHECK(!structurally_equal(a, c));

    ChatbotProject d = a;
    std::reverse(d.intents.front().examples.begin(), d.intents.front().examples.end());
    CHECK(!structurally_equal(a, d));
}
