#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "botmut/model.hpp"

namespace botmut::rasa {

// File roles of a Rasa-style project directory. The domain file must
// exist; every other file is optional and parses to empty collections.
struct ProjectLayout {
    std::filesystem::path root;
    std::string domain_file = "domain.yml";
    std::vector<std::string> nlu_files = {"data/nlu.yml"};
    std::vector<std::string> rules_files = {"data/rules.yml"};
    std::vector<std::string> stories_files = {"data/stories.yml"};
    std::string config_file = "config.yml";  // pass-through only

    static ProjectLayout at(std::filesystem::path root_dir) {
        ProjectLayout layout;
        layout.root = std::move(root_dir);
        return layout;
    }
};

ChatbotProject parse_project(const ProjectLayout& layout);
ChatbotProject parse_project(const std::filesystem::path& root);

// Canonical serialization of the recognized subset plus verbatim opaque
// content, as (project-relative path, file content) pairs. Deterministic:
// the same model always yields byte-identical output.
std::vector<std::pair<std::string, std::string>> serialize_project(const ChatbotProject& project);

std::vector<std::filesystem::path> write_project(const ChatbotProject& project,
                                                 const std::filesystem::path& root);

struct DiffEntry {
    std::string file_role;  // domain | nlu | rules | stories | config
    std::string section;
    std::string summary;

    bool operator==(const DiffEntry&) const = default;
};

// Empty iff the two models are structurally equal; otherwise one entry per
// changed logical section.
std::vector<DiffEntry> diff_projects(const ChatbotProject& a, const ChatbotProject& b);

// FNV-1a 64 over the canonical serialization, as 16 lowercase hex digits.
std::string fingerprint(const ChatbotProject& project);

}  // namespace botmut::rasa
