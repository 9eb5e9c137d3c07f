#include <algorithm>
#include <set>

#include "botmut/analysis.hpp"
#include "text_util.hpp"

namespace botmut {

namespace {

constexpr const char* kOovProbe = "oov probe utterance";
constexpr double kPauseEpsilon = 0.5;
constexpr size_t kMaxExpansions = 20000;

void expand_phrase(const ChatbotProject& project, const TrainingPhrase& phrase,
                   std::vector<std::string>& out) {
    if (phrase.annotations.empty() || !phrase.annotations_well_formed()) {
        out.push_back(phrase.text);
        return;
    }
    std::vector<std::vector<std::string>> options;
    size_t combinations = 1;
    for (const auto& ann : phrase.annotations) {
        std::vector<std::string> texts;
        auto push = [&](const std::string& t) {
            if (std::find(texts.begin(), texts.end(), t) == texts.end()) texts.push_back(t);
        };
        if (const Entity* entity = project.find_entity(ann.entity)) {
            for (const auto& value : entity->values) {
                push(value.value);
                for (const auto& synonym : value.synonyms) push(synonym);
            }
        }
        push(ann.value);
        options.push_back(std::move(texts));
        combinations *= options.back().size();
        if (combinations > kMaxExpansions) {
            out.push_back(phrase.text);  // too wide to expand, keep the literal
            return;
        }
    }
    std::vector<size_t> pick(options.size(), 0);
    while (true) {
        std::string text;
        size_t cursor = 0;
        for (size_t i = 0; i < phrase.annotations.size(); ++i) {
            const auto& ann = phrase.annotations[i];
            text += phrase.text.substr(cursor, ann.start - cursor);
            text += options[i][pick[i]];
            cursor = ann.start + ann.length;
        }
        text += phrase.text.substr(cursor);
        out.push_back(std::move(text));
        size_t level = 0;
        while (level < pick.size()) {
            if (++pick[level] < options[level].size()) break;
            pick[level] = 0;
            ++level;
        }
        if (level == pick.size()) return;
    }
}

// Union over both projects keeps the check symmetric; for a mutant of the
// original (operators only remove) this is exactly the original's phrases.
std::vector<std::string> input_alphabet(const ChatbotProject& a, const ChatbotProject& b) {
    std::vector<std::string> raw;
    for (const ChatbotProject* project : {&a, &b}) {
        for (const auto& intent : project->intents) {
            for (const auto& phrase : intent.examples) expand_phrase(*project, phrase, raw);
        }
    }
    raw.push_back(kOovProbe);
    std::vector<std::string> alphabet;
    std::set<std::string> seen;
    for (const auto& text : raw) {
        std::string normalized = detail::normalize_utterance(text);
        if (normalized.empty()) continue;
        if (seen.insert(normalized).second) alphabet.push_back(normalized);
    }
    return alphabet;
}

std::vector<double> pause_alphabet(const ChatbotProject& a, const ChatbotProject& b) {
    std::set<double> pauses{0.0};
    for (double expiration : {a.session.expiration_minutes, b.session.expiration_minutes}) {
        if (expiration <= 0) continue;
        pauses.insert(std::max(0.0, expiration - kPauseEpsilon));
        pauses.insert(expiration + kPauseEpsilon);
    }
    return {pauses.begin(), pauses.end()};
}

std::string describe_outcome(const StepOutcome& outcome) {
    std::string out = "intent=" + (outcome.intent ? *outcome.intent : "<none>");
    out += " actions=[";
    for (size_t i = 0; i < outcome.actions.size(); ++i) {
        if (i) out += ", ";
        out += outcome.actions[i];
    }
    out += "] responses=[";
    for (size_t i = 0; i < outcome.responses.size(); ++i) {
        if (i) out += ", ";
        out += "\"" + outcome.responses[i] + "\"";
    }
    out += "]";
    return out;
}

// Harness-visible behavior only; whether a session silently restarted is
// not observable.
bool same_behavior(const StepOutcome& x, const StepOutcome& y) {
    return x.intent == y.intent && x.actions == y.actions && x.responses == y.responses;
}

struct Search {
    const ChatbotProject& a;
    const ChatbotProject& b;
    std::vector<std::string> utterances;
    std::vector<double> pauses;
    Conversation trail;
    EquivalenceResult result;

    bool explore(const DialogueState& state_a, const DialogueState& state_b, int depth_left) {
        // A pause before the first turn only ever restarts an empty
        // session, which is unobservable, so the first turn pause is 0.
        const std::vector<double> first_pause{0.0};
        const auto& turn_pauses = trail.turns.empty() ? first_pause : pauses;
        for (double pause : turn_pauses) {
            for (const auto& utterance : utterances) {
                DialogueState next_a = state_a;
                DialogueState next_b = state_b;
                next_a.clock_minutes += pause;
                next_b.clock_minutes += pause;
                StepOutcome out_a = step(a, next_a, utterance);
                StepOutcome out_b = step(b, next_b, utterance);
                trail.turns.push_back({pause, utterance});
                if (!same_behavior(out_a, out_b)) {
                    result.equivalent = false;
                    result.witness = trail;
                    result.divergence = "turn " + std::to_string(trail.turns.size()) + ": original " +
                                        describe_outcome(out_a) + " vs mutant " + describe_outcome(out_b);
                    return false;
                }
                if (depth_left > 1 && !explore(next_a, next_b, depth_left - 1)) return false;
                trail.turns.pop_back();
            }
        }
        return true;
    }
};

}  // namespace

std::string to_string(const Conversation& conversation) {
    std::string out;
    for (const auto& turn : conversation.turns) {
        if (!out.empty()) out += " ; ";
        if (turn.pause_minutes > 0) out += "[pause " + detail::format_number(turn.pause_minutes) + "] ";
        out += "\"" + turn.utterance + "\"";
    }
    return out;
}

std::vector<StepOutcome> replay_conversation(const ChatbotProject& project,
                                             const Conversation& conversation) {
    std::vector<StepOutcome> outcomes;
    DialogueState state;
    for (const auto& turn : conversation.turns) {
        state.clock_minutes += turn.pause_minutes;
        outcomes.push_back(step(project, state, turn.utterance));
    }
    return outcomes;
}

EquivalenceResult bounded_equivalence(const ChatbotProject& original, const ChatbotProject& mutant,
                                      int depth) {
    Search search{original,
                  mutant,
                  input_alphabet(original, mutant),
                  pause_alphabet(original, mutant),
                  {},
                  {}};
    search.result.equivalent = true;
    // iterative deepening so the witness is a shortest distinguishing
    // conversation
    for (int level = 1; level <= depth; ++level) {
        if (!search.explore(DialogueState{}, DialogueState{}, level)) break;
    }
    return search.result;
}

}  // namespace botmut
