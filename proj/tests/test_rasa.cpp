#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "botmut/error.hpp"
#include "botmut/operators.hpp"
#include "botmut/rasa.hpp"
#include "test_support.hpp"

using namespace botmut;
using testsupport::TempDir;

namespace {

bool has_entry(const std::vector<rasa::DiffEntry>& entries, const std::string& role,
               const std::string& section) {
    return std::any_of(entries.begin(), entries.end(), [&](const rasa::DiffEntry& e) {
        return e.file_role == role && e.section == section;
    });
}

}  // namespace

TEST_CASE("parsing the rps-mini fixture finds every declared element") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    CHECK(project.intents.size() == 3);
    CHECK(project.entities.size() == 1);
    CHECK(project.slots.size() == 1);
    CHECK(project.actions.size() == 1);
    CHECK(project.responses.size() == 3);

    int rules = 0, stories = 0;
    for (const auto& flow : project.flows) {
        (flow.kind == FlowKind::Rule ? rules : stories) += 1;
    }
    CHECK(rules == 1);
    CHECK(stories == 1);

    const Intent* play = project.find_intent("play");
    REQUIRE(play != nullptr);
    REQUIRE(play->examples.size() == 3);
    CHECK(play->examples[0].text == "I pick rock");
    REQUIRE(play->examples[0].annotations.size() == 1);
    CHECK(play->examples[0].annotations[0].entity == "choice");
    CHECK(play->examples[0].annotations[0].value == "rock");
    CHECK(play->examples[0].annotations[0].start == 7);

    const Entity* choice = project.find_entity("choice");
    REQUIRE(choice != nullptr);
    REQUIRE(choice->values.size() == 3);
    CHECK(choice->values[1].value == "paper");

    const Slot* slot = project.find_slot("choice");
    REQUIRE(slot != nullptr);
    CHECK(slot->kind == SlotKind::Categorical);
    REQUIRE(slot->mappings.size() == 1);
    CHECK(slot->mappings[0].from_entity == "choice");

    const ActionDef* action = project.find_action("action_play_result");
    REQUIRE(action != nullptr);
    CHECK(action->kind == ActionKind::Custom);
    REQUIRE(action->utters.size() == 1);
    CHECK(action->utters[0] == "utter_result");

    CHECK(project.session.expiration_minutes == 60.0);
    CHECK(project.session.carry_over_slots);

    // config.yml is carried through as opaque content
    REQUIRE(project.opaque.size() == 1);
    CHECK(project.opaque[0].path == "config.yml");
    CHECK(project.opaque[0].content.find("pipeline:") != std::string::npos);
}

TEST_CASE("a directory without a domain file is rejected") {
    TempDir tmp("nodomain");
    try {
        rasa::parse_project(tmp.path());
        FAIL("expected MissingDomainFile");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MissingDomainFile);
    }
}

TEST_CASE("duplicate declarations are rejected at parse time") {
    TempDir tmp("dup");
    testsupport::spit(tmp.path() / "domain.yml",
                      "version: \"3.1\"\nintents:\n  - greet\n  - greet\n");
    try {
        rasa::parse_project(tmp.path());
        FAIL("expected DuplicateName");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DuplicateName);
        CHECK(std::string(e.what()).find("greet") != std::string::npos);
    }
}

TEST_CASE("malformed yaml reports the file and line") {
    TempDir tmp("bad");
    testsupport::spit(tmp.path() / "domain.yml", "version: \"3.1\"\nintents:\n  - greet\n   oops: [\n");
    try {
        rasa::parse_project(tmp.path());
        FAIL("expected MalformedDocument");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::MalformedDocument);
        CHECK(std::string(e.what()).find("domain.yml") != std::string::npos);
    }
}

TEST_CASE("absent data files parse to empty collections") {
    TempDir tmp("minimal");
    testsupport::spit(tmp.path() / "domain.yml", "version: \"3.1\"\nintents:\n  - ping\n");
    ChatbotProject project = rasa::parse_project(tmp.path());
    CHECK(project.intents.size() == 1);
    CHECK(project.flows.empty());
    CHECK(project.session.expiration_minutes == 60.0);  // platform default
    CHECK(project.session.carry_over_slots);
}

TEST_CASE("round trip is the identity for fixtures and all of their mutants") {
    for (const auto& fixture : {testsupport::rps_dir(), testsupport::two_story_dir()}) {
        CAPTURE(fixture.string());
        ChatbotProject original = rasa::parse_project(fixture);

        TempDir tmp("roundtrip");
        rasa::write_project(original, tmp.path() / "copy");
        ChatbotProject reparsed = rasa::parse_project(tmp.path() / "copy");
        CHECK(structurally_equal(original, reparsed));

        int index = 0;
        for (OperatorId op : kAllOperators) {
            for (const auto& site : enumerate_sites(original, op)) {
                ChatbotProject mutant = apply(original, site);
                auto dir = tmp.path() / ("m" + std::to_string(index++));
                rasa::write_project(mutant, dir);
                ChatbotProject back = rasa::parse_project(dir);
                CAPTURE(site.description);
                CHECK(structurally_equal(mutant, back));
            }
        }
    }
}

TEST_CASE("serialization is byte-deterministic") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    auto first = rasa::serialize_project(project);
    auto second = rasa::serialize_project(rasa::parse_project(testsupport::rps_dir()));
    REQUIRE(first.size() == second.size());
    for (size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].first == second[i].first);
        CHECK(first[i].second == second[i].second);
    }
    CHECK(rasa::fingerprint(project) == rasa::fingerprint(rasa::parse_project(testsupport::rps_dir())));
}

TEST_CASE("unrecognized sections are preserved byte for byte") {
    TempDir tmp("opaque");
    testsupport::copy_tree(testsupport::rps_dir(), tmp.path() / "src");
    std::string forms = "forms:\n  play_form:\n    required_slots:\n      - choice\n";
    std::string domain = testsupport::slurp(tmp.path() / "src" / "domain.yml");
    testsupport::spit(tmp.path() / "src" / "domain.yml", domain + forms);

    ChatbotProject project = rasa::parse_project(tmp.path() / "src");
    rasa::write_project(project, tmp.path() / "out");

    std::string rewritten = testsupport::slurp(tmp.path() / "out" / "domain.yml");
    CHECK(rewritten.find(forms) != std::string::npos);

    std::string config_in = testsupport::slurp(tmp.path() / "src" / "config.yml");
    std::string config_out = testsupport::slurp(tmp.path() / "out" / "config.yml");
    CHECK(config_in == config_out);

    CHECK(structurally_equal(project, rasa::parse_project(tmp.path() / "out")));
}

TEST_CASE("removing an nlu block removes it from the emitted file") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    MutationSite site;
    for (const auto& candidate : enumerate_sites(project, OperatorId::RemoveIntentFromNLU)) {
        if (candidate.target == "greet") site = candidate;
    }
    ChatbotProject mutant = apply(project, site);
    for (const auto& [path, content] : rasa::serialize_project(mutant)) {
        if (path == "data/nlu.yml") {
            CHECK(content.find("intent: greet") == std::string::npos);
            CHECK(content.find("intent: play") != std::string::npos);
        }
        if (path == "domain.yml") {
            CHECK(content.find("- greet") != std::string::npos);  // declaration retained
        }
    }
}

TEST_CASE("diff of a project against itself is empty") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    CHECK(rasa::diff_projects(project, project).empty());
}

TEST_CASE("diff localizes an entity removal to its logical sections") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    auto sites = enumerate_sites(project, OperatorId::RemoveEntity);
    REQUIRE(sites.size() == 1);
    ChatbotProject mutant = apply(project, sites[0]);
    auto entries = rasa::diff_projects(project, mutant);
    CHECK(has_entry(entries, "domain", "entities"));
    CHECK(has_entry(entries, "domain", "slots"));
    CHECK(has_entry(entries, "nlu", "annotations"));
    CHECK(entries.size() == 3);
}

TEST_CASE("diff of a session change is a single entry") {
    ChatbotProject project = rasa::parse_project(testsupport::rps_dir());
    ChatbotProject changed = project;
    changed.session.expiration_minutes = 120;
    auto entries = rasa::diff_projects(project, changed);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].file_role == "domain");
    CHECK(entries[0].section == "session_config");
    CHECK(entries[0].summary.find("60 -> 120") != std::string::npos);
}

TEST_CASE("intent step entity bindings survive a round trip") {
    TempDir tmp("bindings");
    testsupport::spit(tmp.path() / "domain.yml",
                      "version: \"3.1\"\n"
                      "intents:\n  - order\n"
                      "entities:\n  - size\n"
                      "responses:\n"
                      "  utter_ok:\n    - text: \"ok\"\n");
    testsupport::spit(tmp.path() / "data" / "stories.yml",
                      "version: \"3.1\"\n"
                      "stories:\n"
                      "  - story: order-large\n"
                      "    steps:\n"
                      "      - intent: order\n"
                      "        entities:\n"
                      "          - size: large\n"
                      "      - action: utter_ok\n");
    ChatbotProject project = rasa::parse_project(tmp.path());
    const Flow* story = project.find_flow(FlowKind::Story, "order-large");
    REQUIRE(story != nullptr);
    REQUIRE(story->steps.size() == 2);
    REQUIRE(story->steps[0].bindings.size() == 1);
    CHECK(story->steps[0].bindings[0].entity == "size");
    CHECK(story->steps[0].bindings[0].value == "large");

    rasa::write_project(project, tmp.path() / "out");
    CHECK(structurally_equal(project, rasa::parse_project(tmp.path() / "out")));
}

TEST_CASE("texts needing quotes survive a round trip") {
    TempDir tmp("quoting");
    testsupport::spit(tmp.path() / "domain.yml",
                      "version: \"3.1\"\n"
                      "intents:\n  - ask\n"
                      "responses:\n"
                      "  utter_tricky:\n"
                      "    - text: \"She said: \\\"42\\\" {x} [ok]\"\n"
                      "  utter_number:\n"
                      "    - text: \"3.14\"\n");
    ChatbotProject project = rasa::parse_project(tmp.path());
    CHECK(project.find_response("utter_tricky")->variants[0] == "She said: \"42\" {x} [ok]");
    CHECK(project.find_response("utter_number")->variants[0] == "3.14");
    rasa::write_project(project, tmp.path() / "out");
    ChatbotProject back = rasa::parse_project(tmp.path() / "out");
    CHECK(structurally_equal(project, back));
}

TEST_CASE("phrases with two annotations parse and round-trip") {
    TempDir tmp("twoann");
    testsupport::spit(tmp.path() / "domain.yml",
                      "version: \"3.1\"\n"
                      "intents:\n  - move\n"
                      "entities:\n"
                      "  - from:\n      values:\n        - here\n"
                      "  - to:\n      values:\n        - there\n");
    testsupport::spit(tmp.path() / "data" / "nlu.yml",
                      "version: \"3.1\"\n"
                      "nlu:\n"
                      "  - intent: move\n"
                      "    examples: |\n"
                      "      - go from [here](from) to [there](to)\n");
    ChatbotProject project = rasa::parse_project(tmp.path());
    const Intent* move = project.find_intent("move");
    REQUIRE(move != nullptr);
    REQUIRE(move->examples.size() == 1);
    CHECK(move->examples[0].text == "go from here to there");
    REQUIRE(move->examples[0].annotations.size() == 2);
    CHECK(move->examples[0].annotations[0].entity == "from");
    CHECK(move->examples[0].annotations[1].entity == "to");
    CHECK(move->examples[0].annotations[1].start == 16);

    rasa::write_project(project, tmp.path() / "out");
    std::string nlu = testsupport::slurp(tmp.path() / "out" / "data" / "nlu.yml");
    CHECK(nlu.find("go from [here](from) to [there](to)") != std::string::npos);
    CHECK(structurally_equal(project, rasa::parse_project(tmp.path() / "out")));
}

TEST_CASE("entity synonyms and slot types survive a round trip") {
    TempDir tmp("synonyms");
    testsupport::spit(tmp.path() / "domain.yml",
                      "version: \"3.1\"\n"
                      "intents:\n  - order\n"
                      "entities:\n"
                      "  - size:\n"
                      "      values:\n"
                      "        - value: large\n"
                      "          synonyms:\n"
                      "            - big\n"
                      "            - huge\n"
                      "        - small\n"
                      "slots:\n"
                      "  size:\n"
                      "    type: text\n"
                      "    mappings:\n"
                      "      - type: from_entity\n"
                      "        entity: size\n"
                      "  confirmed:\n"
                      "    type: bool\n");
    ChatbotProject project = rasa::parse_project(tmp.path());
    const Entity* size = project.find_entity("size");
    REQUIRE(size != nullptr);
    REQUIRE(size->values.size() == 2);
    CHECK(size->values[0].synonyms == std::vector<std::string>{"big", "huge"});
    CHECK(project.find_slot("confirmed")->kind == SlotKind::Boolean);

    rasa::write_project(project, tmp.path() / "out");
    CHECK(structurally_equal(project, rasa::parse_project(tmp.path() / "out")));
}
