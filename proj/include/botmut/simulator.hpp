#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "botmut/model.hpp"
#include "botmut/script.hpp"

namespace botmut {

struct IntentMatch {
    std::string intent;
    std::vector<EntityBinding> entities;

    bool operator==(const IntentMatch&) const = default;
};

// Deterministic stand-in for NLU: an utterance matches an intent iff,
// after normalization (lowercase, trim, collapse whitespace), it equals a
// training phrase with each annotation replaced by any declared value or
// synonym of the annotated entity (or the annotated text itself). First
// intent in declaration order wins, so a match is never ambiguous.
std::optional<IntentMatch> match_intent(const ChatbotProject& project, const std::string& utterance);

struct DialogueState {
    std::map<std::string, std::string> slots;     // set slots only
    std::vector<std::string> story_intents;       // matched intents not consumed by a rule
    std::vector<std::string> history;             // alternating intents and actions, full log
    double clock_minutes = 0;                     // virtual clock, advanced by pauses
    double last_activity = 0;
};

struct StepOutcome {
    std::optional<std::string> intent;    // matched intent, if any
    std::vector<std::string> actions;     // executed action/response names
    std::vector<std::string> responses;   // rendered response texts
    bool session_restarted = false;

    bool operator==(const StepOutcome&) const = default;
};

// One user turn:
//   1. if the idle gap exceeds a positive expiration, the session restarts
//      (history cleared; slots cleared unless carry-over is on);
//   2. the utterance is matched and extracted entities fill mapped slots;
//   3. a single-interaction rule triggered by the matched intent takes
//      precedence; otherwise the story whose intent sequence continues the
//      session's story history supplies the next action run (declaration
//      order breaks ties); otherwise the turn produces no action;
//   4. response templates render with slot interpolation, unset slots
//      rendering as "None".
StepOutcome step(const ChatbotProject& project, DialogueState& state, const std::string& utterance);

// First variant of the template, slots interpolated against the state.
std::string render_template(const ChatbotProject& project, const DialogueState& state,
                            const ResponseTemplate& tmpl);

struct TestResult {
    enum class Verdict { Pass, Fail, Timeout };

    Verdict verdict = Verdict::Pass;
    int step_index = -1;  // first failing script step, if any
    std::string reason;
    std::vector<std::string> transcript;

    bool passed() const { return verdict == Verdict::Pass; }
};

std::string to_string(TestResult::Verdict verdict);

// Executes the script through `step`. Bot expectations check the most
// recent turn outcome; an expectation with nothing observed (no match, no
// action, no response) is the harness-visible "response never arrives"
// condition and yields a timeout verdict. The first non-pass stops the
// script.
TestResult run_script(const ChatbotProject& project, const ConversationScript& script);

struct ScriptRuns {
    std::string script;
    std::vector<TestResult> runs;

    bool passed() const;
    const TestResult* first_failure() const;
};

struct SuiteResult {
    std::vector<ScriptRuns> scripts;

    bool all_pass() const;
    std::vector<std::string> failing_scripts() const;
};

// Runs every script `repeat` times; a script fails if any repetition is
// non-pass. The engine is deterministic, so repetitions only exist for
// parity with external runners.
SuiteResult run_suite(const ChatbotProject& project, const std::vector<ConversationScript>& scripts,
                      int repeat = 1);

}  // namespace botmut
