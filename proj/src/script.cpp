#include "botmut/script.hpp"

#include <algorithm>
#include <cstdlib>

#include "botmut/error.hpp"
#include "text_util.hpp"

namespace botmut {

namespace {

using detail::starts_with;
using detail::trim;

[[noreturn]] void bad(const std::string& name, int line, const std::string& what) {
    throw Error(Errc::MalformedScript, name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

ConversationScript parse_script(const std::string& text, const std::string& name) {
    ConversationScript script;
    script.name = name;
    auto lines = detail::split_lines(text);

    bool awaiting_utterance = false;
    int me_line = 0;
    for (size_t i = 0; i < lines.size(); ++i) {
        int line_no = static_cast<int>(i) + 1;
        std::string line = trim(lines[i]);
        if (line.empty() || starts_with(line, "//")) continue;

        if (awaiting_utterance) {
            if (starts_with(line, "#")) bad(name, line_no, "expected an utterance after #me");
            script.steps.push_back({ScriptStep::Kind::UserTurn, line, 0, me_line});
            awaiting_utterance = false;
            continue;
        }

        if (line == "#me") {
            awaiting_utterance = true;
            me_line = line_no;
        } else if (starts_with(line, "#bot ")) {
            std::string rest = trim(line.substr(5));
            ScriptStep step;
            step.line = line_no;
            if (starts_with(rest, "intent ")) {
                step.kind = ScriptStep::Kind::ExpectIntent;
                step.text = trim(rest.substr(7));
            } else if (starts_with(rest, "action ")) {
                step.kind = ScriptStep::Kind::ExpectAction;
                step.text = trim(rest.substr(7));
            } else if (starts_with(rest, "contains ")) {
                step.kind = ScriptStep::Kind::ExpectContains;
                step.text = rest.substr(9);
            } else {
                bad(name, line_no, "unknown #bot assertion '" + rest + "'");
            }
            if (step.text.empty()) bad(name, line_no, "#bot assertion needs an argument");
            script.steps.push_back(std::move(step));
        } else if (starts_with(line, "#pause")) {
            std::string arg = trim(line.substr(6));
            char* end = nullptr;
            double minutes = std::strtod(arg.c_str(), &end);
            if (arg.empty() || !end || *end != '\0' || minutes <= 0) {
                bad(name, line_no, "#pause needs a positive number of minutes");
            }
            script.steps.push_back({ScriptStep::Kind::Pause, "", minutes, line_no});
        } else {
            bad(name, line_no, "unknown directive '" + line + "'");
        }
    }
    if (awaiting_utterance) bad(name, me_line, "#me at end of script without an utterance");
    if (script.steps.empty()) bad(name, 1, "script has no steps");
    if (script.steps.front().kind != ScriptStep::Kind::UserTurn) {
        bad(name, script.steps.front().line, "the first step must be a user turn");
    }
    for (size_t i = 1; i < script.steps.size(); ++i) {
        const auto& step = script.steps[i];
        const auto& prev = script.steps[i - 1];
        bool is_expect = step.kind == ScriptStep::Kind::ExpectIntent ||
                         step.kind == ScriptStep::Kind::ExpectAction ||
                         step.kind == ScriptStep::Kind::ExpectContains;
        bool prev_ok = prev.kind == ScriptStep::Kind::UserTurn || prev.kind == ScriptStep::Kind::ExpectIntent ||
                       prev.kind == ScriptStep::Kind::ExpectAction ||
                       prev.kind == ScriptStep::Kind::ExpectContains;
        if (is_expect && !prev_ok) {
            bad(name, step.line, "a #bot assertion must follow a user turn or another assertion");
        }
    }
    return script;
}

ConversationScript load_script(const std::filesystem::path& file) {
    return parse_script(detail::read_file(file), file.filename().string());
}

std::vector<ConversationScript> load_suite(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(Errc::IoFailure, "suite directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto& path = entry.path();
        if (path.filename().string().ends_with(".convo.txt")) files.push_back(path);
    }
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
    std::vector<ConversationScript> scripts;
    scripts.reserve(files.size());
    for (const auto& file : files) scripts.push_back(load_script(file));
    return scripts;
}

}  // namespace botmut
