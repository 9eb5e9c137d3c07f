#include "botmut/simulator.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace botmut {

namespace {

using detail::normalize_utterance;

// Candidate texts one annotation may stand for, paired with the entity
// value each candidate extracts. Synonyms extract their canonical value;
// the literal annotated text extracts itself.
std::vector<std::pair<std::string, std::string>> annotation_candidates(const ChatbotProject& project,
                                                                       const EntityAnnotation& ann) {
    std::vector<std::pair<std::string, std::string>> candidates;
    auto push = [&](const std::string& text, const std::string& value) {
        for (const auto& [existing, _] : candidates) {
            if (existing == text) return;
        }
        candidates.emplace_back(text, value);
    };
    if (const Entity* entity = project.find_entity(ann.entity)) {
        for (const auto& value : entity->values) {
            push(value.value, value.value);
            for (const auto& synonym : value.synonyms) push(synonym, value.value);
        }
    }
    push(ann.value, ann.value);
    return candidates;
}

constexpr size_t kMaxSubstitutions = 20000;  // guard for pathological phrases

bool phrase_matches(const ChatbotProject& project, const TrainingPhrase& phrase,
                    const std::string& normalized_utterance, std::vector<EntityBinding>& extracted) {
    if (phrase.annotations.empty() || !phrase.annotations_well_formed()) {
        return normalize_utterance(phrase.text) == normalized_utterance;
    }

    std::vector<std::vector<std::pair<std::string, std::string>>> options;
    size_t combinations = 1;
    for (const auto& ann : phrase.annotations) {
        options.push_back(annotation_candidates(project, ann));
        combinations *= std::max<size_t>(1, options.back().size());
        if (combinations > kMaxSubstitutions) return false;
    }

    std::vector<size_t> pick(phrase.annotations.size(), 0);
    while (true) {
        std::string candidate;
        std::vector<EntityBinding> bindings;
        size_t cursor = 0;
        for (size_t i = 0; i < phrase.annotations.size(); ++i) {
            const auto& ann = phrase.annotations[i];
            candidate += phrase.text.substr(cursor, ann.start - cursor);
            const auto& [text, value] = options[i][pick[i]];
            candidate += text;
            bindings.push_back({ann.entity, value});
            cursor = ann.start + ann.length;
        }
        candidate += phrase.text.substr(cursor);
        if (normalize_utterance(candidate) == normalized_utterance) {
            extracted = std::move(bindings);
            return true;
        }
        size_t level = 0;
        while (level < pick.size()) {
            if (++pick[level] < options[level].size()) break;
            pick[level] = 0;
            ++level;
        }
        if (level == pick.size()) return false;
    }
}

// A rule fires only in its single-interaction form: one leading intent
// step followed by actions.
const Flow* matching_rule(const ChatbotProject& project, const std::string& intent) {
    for (const auto& flow : project.flows) {
        if (flow.kind != FlowKind::Rule || flow.steps.empty()) continue;
        if (!flow.steps.front().is_intent() || flow.steps.front().name != intent) continue;
        int intent_steps = 0;
        for (const auto& s : flow.steps) {
            if (s.is_intent()) ++intent_steps;
        }
        if (intent_steps == 1) return &flow;
    }
    return nullptr;
}

std::vector<std::string> story_intent_sequence(const Flow& flow) {
    std::vector<std::string> seq;
    for (const auto& s : flow.steps) {
        if (s.is_intent()) seq.push_back(s.name);
    }
    return seq;
}

// The story tracks the session from its start: it supplies the next action
// run iff its intent sequence begins with the whole story history. The
// run is the actions immediately after the story's |history|-th intent
// step. Declaration order breaks ties.
std::vector<std::string> story_action_run(const ChatbotProject& project,
                                          const std::vector<std::string>& history) {
    if (history.empty()) return {};
    for (const auto& flow : project.flows) {
        if (flow.kind != FlowKind::Story) continue;
        auto seq = story_intent_sequence(flow);
        if (seq.size() < history.size()) continue;
        if (!std::equal(history.begin(), history.end(), seq.begin())) continue;
        std::vector<std::string> run;
        size_t seen = 0;
        for (size_t i = 0; i < flow.steps.size(); ++i) {
            if (!flow.steps[i].is_intent()) continue;
            if (++seen < history.size()) continue;
            for (size_t j = i + 1; j < flow.steps.size() && flow.steps[j].is_action(); ++j) {
                run.push_back(flow.steps[j].name);
            }
            break;
        }
        return run;
    }
    return {};
}

}  // namespace

std::optional<IntentMatch> match_intent(const ChatbotProject& project, const std::string& utterance) {
    const std::string normalized = normalize_utterance(utterance);
    for (const auto& intent : project.intents) {
        for (const auto& phrase : intent.examples) {
            std::vector<EntityBinding> extracted;
            if (phrase_matches(project, phrase, normalized, extracted)) {
                return IntentMatch{intent.name, std::move(extracted)};
            }
        }
    }
    return std::nullopt;
}

std::string render_template(const ChatbotProject& project, const DialogueState& state,
                            const ResponseTemplate& tmpl) {
    (void)project;
    if (tmpl.variants.empty()) return "";
    const std::string& text = tmpl.variants.front();
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            continue;
        }
        auto close = text.find('}', i + 1);
        if (close == std::string::npos) {
            out.push_back(text[i]);
            continue;
        }
        std::string name = text.substr(i + 1, close - i - 1);
        if (name.empty() || name.find_first_of("{} \t") != std::string::npos) {
            out.push_back(text[i]);
            continue;
        }
        auto it = state.slots.find(name);
        out += it == state.slots.end() ? "None" : it->second;
        i = close;
    }
    return out;
}

StepOutcome step(const ChatbotProject& project, DialogueState& state, const std::string& utterance) {
    StepOutcome outcome;

    const SessionConfig& session = project.session;
    if (session.expiration_minutes > 0 &&
        state.clock_minutes - state.last_activity > session.expiration_minutes) {
        state.story_intents.clear();
        state.history.clear();
        if (!session.carry_over_slots) state.slots.clear();
        outcome.session_restarted = true;
    }
    state.last_activity = state.clock_minutes;

    auto match = match_intent(project, utterance);
    if (!match) return outcome;  // nothing recognized, nothing answered

    outcome.intent = match->intent;
    state.history.push_back("intent:" + match->intent);
    for (const auto& binding : match->entities) {
        for (const auto& slot : project.slots) {
            for (const auto& mapping : slot.mappings) {
                if (mapping.from_entity == binding.entity) state.slots[slot.name] = binding.value;
            }
        }
    }

    std::vector<std::string> run;
    if (const Flow* rule = matching_rule(project, match->intent)) {
        // rules take precedence and do not advance story tracking
        for (size_t i = 1; i < rule->steps.size(); ++i) {
            if (rule->steps[i].is_action()) run.push_back(rule->steps[i].name);
        }
    } else {
        state.story_intents.push_back(match->intent);
        run = story_action_run(project, state.story_intents);
    }

    for (const auto& name : run) {
        outcome.actions.push_back(name);
        state.history.push_back("action:" + name);
        if (const ResponseTemplate* tmpl = project.find_response(name)) {
            outcome.responses.push_back(render_template(project, state, *tmpl));
        } else if (const ActionDef* action = project.find_action(name)) {
            for (const auto& uttered : action->utters) {
                if (const ResponseTemplate* t = project.find_response(uttered)) {
                    outcome.responses.push_back(render_template(project, state, *t));
                }
            }
        }
        // otherwise an opaque named event with no rendered response
    }
    return outcome;
}

std::string to_string(TestResult::Verdict verdict) {
    switch (verdict) {
        case TestResult::Verdict::Pass: return "pass";
        case TestResult::Verdict::Fail: return "fail";
        case TestResult::Verdict::Timeout: return "timeout";
    }
    return "unknown";
}

TestResult run_script(const ChatbotProject& project, const ConversationScript& script) {
    TestResult result;
    DialogueState state;
    std::optional<StepOutcome> last;

    auto stop = [&](TestResult::Verdict verdict, int index, std::string reason) {
        result.verdict = verdict;
        result.step_index = index;
        result.reason = std::move(reason);
    };

    for (size_t i = 0; i < script.steps.size() && result.passed(); ++i) {
        const ScriptStep& directive = script.steps[i];
        int index = static_cast<int>(i);
        switch (directive.kind) {
            case ScriptStep::Kind::UserTurn: {
                result.transcript.push_back("me: " + directive.text);
                StepOutcome outcome = step(project, state, directive.text);
                if (outcome.session_restarted) result.transcript.push_back("(session restarted)");
                result.transcript.push_back("intent: " + (outcome.intent ? *outcome.intent : "<none>"));
                for (const auto& action : outcome.actions) result.transcript.push_back("action: " + action);
                for (const auto& response : outcome.responses) result.transcript.push_back("bot: " + response);
                last = std::move(outcome);
                break;
            }
            case ScriptStep::Kind::Pause:
                state.clock_minutes += directive.minutes;
                result.transcript.push_back("pause: " + detail::format_number(directive.minutes));
                break;
            case ScriptStep::Kind::ExpectIntent:
                if (!last || !last->intent) {
                    stop(TestResult::Verdict::Timeout, index,
                         "expected intent '" + directive.text + "' but no intent was recognized");
                } else if (*last->intent != directive.text) {
                    stop(TestResult::Verdict::Fail, index,
                         "expected intent '" + directive.text + "', got '" + *last->intent + "'");
                }
                break;
            case ScriptStep::Kind::ExpectAction:
                if (!last || last->actions.empty()) {
                    stop(TestResult::Verdict::Timeout, index,
                         "expected action '" + directive.text + "' but no action was executed");
                } else if (std::find(last->actions.begin(), last->actions.end(), directive.text) ==
                           last->actions.end()) {
                    stop(TestResult::Verdict::Fail, index, "expected action '" + directive.text + "' was not executed");
                }
                break;
            case ScriptStep::Kind::ExpectContains:
                if (!last || last->responses.empty()) {
                    stop(TestResult::Verdict::Timeout, index,
                         "expected a response containing '" + directive.text + "' but none arrived");
                } else {
                    bool found = std::any_of(last->responses.begin(), last->responses.end(),
                                             [&](const std::string& r) {
                                                 return r.find(directive.text) != std::string::npos;
                                             });
                    if (!found) {
                        stop(TestResult::Verdict::Fail, index,
                             "no response contains '" + directive.text + "'");
                    }
                }
                break;
        }
    }
    return result;
}

bool ScriptRuns::passed() const {
    return std::all_of(runs.begin(), runs.end(), [](const TestResult& r) { return r.passed(); });
}

const TestResult* ScriptRuns::first_failure() const {
    for (const auto& run : runs) {
        if (!run.passed()) return &run;
    }
    return nullptr;
}

bool SuiteResult::all_pass() const {
    return std::all_of(scripts.begin(), scripts.end(), [](const ScriptRuns& s) { return s.passed(); });
}

std::vector<std::string> SuiteResult::failing_scripts() const {
    std::vector<std::string> names;
    for (const auto& script : scripts) {
        if (!script.passed()) names.push_back(script.script);
    }
    return names;
}

SuiteResult run_suite(const ChatbotProject& project, const std::vector<ConversationScript>& scripts,
                      int repeat) {
    SuiteResult result;
    for (const auto& script : scripts) {
        ScriptRuns runs;
        runs.script = script.name;
        for (int i = 0; i < std::max(1, repeat); ++i) {
            runs.runs.push_back(run_script(project, script));
        }
        result.scripts.push_back(std::move(runs));
    }
    return result;
}

}  // namespace botmut
