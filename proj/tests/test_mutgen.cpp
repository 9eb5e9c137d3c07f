#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "botmut/mutgen.hpp"
#include "botmut/rasa.hpp"
#include "test_support.hpp"

using namespace botmut;
using testsupport::TempDir;

namespace {

// Recursive byte comparison of two directory trees.
bool trees_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::vector<std::string> rel_a, rel_b;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(a)) {
        if (entry.is_regular_file()) rel_a.push_back(std::filesystem::relative(entry.path(), a).string());
    }
    for (const auto& entry : std::filesystem::recursive_directory_iterator(b)) {
        if (entry.is_regular_file()) rel_b.push_back(std::filesystem::relative(entry.path(), b).string());
    }
    std::sort(rel_a.begin(), rel_a.end());
    std::sort(rel_b.begin(), rel_b.end());
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a) {
        if (testsupport::slurp(a / rel) != testsupport::slurp(b / rel)) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("generating all mutants of rps-mini yields the full catalog") {
    TempDir tmp("mutgen");
    MutantManifest manifest = generate_mutants(testsupport::rps_dir(), tmp.path() / "out");

    CHECK(manifest.entries.size() == 17);
    CHECK(manifest.original_hash == rasa::fingerprint(rasa::parse_project(testsupport::rps_dir())));

    int structure = 0, flow = 0;
    for (const auto& entry : manifest.entries) {
        (entry.category == "ChatbotStructure" ? structure : flow) += 1;
    }
    CHECK(structure == 6);
    CHECK(flow == 11);

    std::set<std::string> ids;
    for (const auto& entry : manifest.entries) ids.insert(entry.id);
    CHECK(ids.size() == manifest.entries.size());

    // entries appear in (operator, site) order
    ChatbotProject original = rasa::parse_project(testsupport::rps_dir());
    size_t cursor = 0;
    for (OperatorId op : kAllOperators) {
        for (size_t i = 0; i < enumerate_sites(original, op).size(); ++i) {
            REQUIRE(cursor < manifest.entries.size());
            CHECK(manifest.entries[cursor].op == std::string(operator_name(op)));
            std::string prefix = std::string(operator_name(op)) + "_" + std::to_string(i) + "_";
            CHECK(manifest.entries[cursor].id.rfind(prefix, 0) == 0);
            CHECK(manifest.entries[cursor].id.size() == prefix.size() + 8);
            ++cursor;
        }
    }
    CHECK(cursor == manifest.entries.size());
}

TEST_CASE("every mutant directory reparses and differs from the original as cataloged") {
    TempDir tmp("mutdirs");
    MutantManifest manifest = generate_mutants(testsupport::rps_dir(), tmp.path() / "out");
    ChatbotProject original = rasa::parse_project(testsupport::rps_dir());

    for (const auto& entry : manifest.entries) {
        CAPTURE(entry.id);
        ChatbotProject mutant = rasa::parse_project(tmp.path() / "out" / entry.dir);
        auto diff = rasa::diff_projects(original, mutant);
        CHECK(!diff.empty());
        std::set<std::string> roles;
        for (const auto& d : diff) roles.insert(d.file_role);
        CHECK(std::vector<std::string>(roles.begin(), roles.end()) == entry.changed);
    }
}

TEST_CASE("an empty operator set produces an empty manifest, not an error") {
    TempDir tmp("empty");
    GenerateOptions options;
    options.operators.clear();
    MutantManifest manifest = generate_mutants(testsupport::rps_dir(), tmp.path() / "out", options);
    CHECK(manifest.entries.empty());
    CHECK(std::filesystem::exists(tmp.path() / "out" / "mutants.json"));
    MutantManifest reread = read_manifest(tmp.path() / "out" / "mutants.json");
    CHECK(reread.entries.empty());
    CHECK(reread.original_hash == manifest.original_hash);
}

TEST_CASE("a subset of operators generates only its own sites") {
    TempDir tmp("subset");
    GenerateOptions options;
    options.operators = {OperatorId::RemoveIntentFromNLU, OperatorId::ToggleCarryOverSlots};
    MutantManifest manifest = generate_mutants(testsupport::rps_dir(), tmp.path() / "out", options);
    REQUIRE(manifest.entries.size() == 4);
    CHECK(manifest.entries[0].op == "removeIntentFromNLU");
    CHECK(manifest.entries[3].op == "toggleCarryOverSlots");

    // the manifest order is canonical even when the set is given reversed
    GenerateOptions reversed;
    reversed.operators = {OperatorId::ToggleCarryOverSlots, OperatorId::RemoveIntentFromNLU};
    MutantManifest mirrored = generate_mutants(testsupport::rps_dir(), tmp.path() / "out2", reversed);
    REQUIRE(mirrored.entries.size() == manifest.entries.size());
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        CHECK(mirrored.entries[i] == manifest.entries[i]);
    }
}

TEST_CASE("regeneration with identical inputs is byte-identical") {
    TempDir tmp("regen");
    generate_mutants(testsupport::rps_dir(), tmp.path() / "a", {});
    GenerateOptions serial;
    serial.jobs = 1;
    generate_mutants(testsupport::rps_dir(), tmp.path() / "b", serial);
    CHECK(trees_identical(tmp.path() / "a", tmp.path() / "b"));
}

TEST_CASE("the manifest file round-trips through its json form") {
    TempDir tmp("manifest");
    MutantManifest manifest = generate_mutants(testsupport::rps_dir(), tmp.path() / "out");
    MutantManifest reread = read_manifest(tmp.path() / "out" / "mutants.json");
    CHECK(reread.original_hash == manifest.original_hash);
    REQUIRE(reread.entries.size() == manifest.entries.size());
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        CHECK(reread.entries[i] == manifest.entries[i]);
    }
}
