#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace botmut {

// One test case: ordered user turns, bot expectations, pause directives.
//
// Plain-text format, one directive per line:
//   #me                   (the next line is the user utterance)
//   #bot intent <name>
//   #bot action <name>
//   #bot contains <text>
//   #pause <minutes>
//   // comment
struct ScriptStep {
    enum class Kind { UserTurn, ExpectIntent, ExpectAction, ExpectContains, Pause };

    Kind kind = Kind::UserTurn;
    std::string text;     // utterance, expected name, or expected substring
    double minutes = 0;   // pause only
    int line = 0;         // 1-based source line, for diagnostics

    bool operator==(const ScriptStep&) const = default;
};

struct ConversationScript {
    std::string name;
    std::vector<ScriptStep> steps;
};

// Throws MalformedScript (with line) on unknown directives, a pause that is
// not a positive number, a bot expectation with nothing to observe before
// it, or a script that does not start with a user turn.
ConversationScript parse_script(const std::string& text, const std::string& name);

ConversationScript load_script(const std::filesystem::path& file);

// A suite is a directory of *.convo.txt files, ordered by file name.
std::vector<ConversationScript> load_suite(const std::filesystem::path& dir);

}  // namespace botmut
