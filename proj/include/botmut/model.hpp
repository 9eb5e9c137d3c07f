#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace botmut {

// Platform-agnostic chatbot model. Construction never judges validity:
// mutants are deliberately defective and must still be representable and
// serializable. validate() is the only place that passes judgment.

struct EntityAnnotation {
    std::size_t start = 0;   // byte offset into the plain phrase text
    std::size_t length = 0;
    std::string entity;
    std::string value;

    bool operator==(const EntityAnnotation&) const = default;
};

struct TrainingPhrase {
    std::string text;  // annotation markup stripped
    std::vector<EntityAnnotation> annotations;

    // in-bounds, in order, non-overlapping
    bool annotations_well_formed() const;

    bool operator==(const TrainingPhrase&) const = default;
};

struct Intent {
    std::string name;
    std::vector<TrainingPhrase> examples;

    // An intent with no examples is declared but untrained (no NLU block).
    bool has_training_data() const { return !examples.empty(); }

    bool operator==(const Intent&) const = default;
};

struct EntityValue {
    std::string value;
    std::vector<std::string> synonyms;

    bool operator==(const EntityValue&) const = default;
};

struct Entity {
    std::string name;
    std::vector<EntityValue> values;  // empty => free-form entity

    bool operator==(const Entity&) const = default;
};

enum class SlotKind { Text, Categorical, Boolean };

struct SlotMapping {
    std::string from_entity;

    bool operator==(const SlotMapping&) const = default;
};

struct Slot {
    std::string name;
    SlotKind kind = SlotKind::Text;
    std::vector<std::string> allowed_values;  // categorical only
    std::vector<SlotMapping> mappings;

    bool operator==(const Slot&) const = default;
};

enum class ActionKind { Response, Custom };

struct ActionDef {
    std::string name;
    ActionKind kind = ActionKind::Custom;
    // Simulation stub for custom actions: templates the action dispatches
    // when executed. Response-kind actions utter their own name.
    std::vector<std::string> utters;

    bool operator==(const ActionDef&) const = default;
};

struct ResponseTemplate {
    std::string name;
    std::vector<std::string> variants;  // may contain {slot} placeholders

    bool operator==(const ResponseTemplate&) const = default;
};

enum class FlowKind { Story, Rule };

struct EntityBinding {
    std::string entity;
    std::string value;

    bool operator==(const EntityBinding&) const = default;
};

struct FlowStep {
    enum class Kind { Intent, Action };

    Kind kind = Kind::Intent;
    std::string name;
    std::vector<EntityBinding> bindings;  // intent steps only

    static FlowStep intent(std::string name, std::vector<EntityBinding> bindings = {}) {
        return FlowStep{Kind::Intent, std::move(name), std::move(bindings)};
    }
    static FlowStep action(std::string name) {
        return FlowStep{Kind::Action, std::move(name), {}};
    }

    bool is_intent() const { return kind == Kind::Intent; }
    bool is_action() const { return kind == Kind::Action; }

    bool operator==(const FlowStep&) const = default;
};

struct Flow {
    FlowKind kind = FlowKind::Story;
    std::string name;
    std::vector<FlowStep> steps;

    bool operator==(const Flow&) const = default;
};

struct SessionConfig {
    double expiration_minutes = 60.0;  // 0 = session never expires
    bool carry_over_slots = true;

    bool operator==(const SessionConfig&) const = default;
};

// Unrecognized file content, carried through byte-identical so mutants stay
// deployable on the real platform.
struct OpaqueFile {
    std::string path;  // project-relative
    std::string content;

    bool operator==(const OpaqueFile&) const = default;
};

struct ChatbotProject {
    std::vector<Intent> intents;
    std::vector<Entity> entities;
    std::vector<Slot> slots;
    std::vector<ResponseTemplate> responses;
    std::vector<ActionDef> actions;
    std::vector<Flow> flows;
    SessionConfig session;
    std::vector<OpaqueFile> opaque;

    const Intent* find_intent(const std::string& name) const;
    const Entity* find_entity(const std::string& name) const;
    const Slot* find_slot(const std::string& name) const;
    const ActionDef* find_action(const std::string& name) const;
    const ResponseTemplate* find_response(const std::string& name) const;
    const Flow* find_flow(FlowKind kind, const std::string& name) const;
};

// Structural equality, independent of the declaration order of the
// top-level collections (they are name-keyed). Order inside an element
// (examples, steps, variants) is significant.
bool structurally_equal(const ChatbotProject& a, const ChatbotProject& b);

enum class Severity { Broken, Warning };

struct ValidationIssue {
    Severity severity = Severity::Warning;
    std::string code;
    std::string message;
    std::string location;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    // Deployable iff nothing broken; warnings do not block deployment.
    bool deployable() const;
    std::vector<ValidationIssue> broken() const;
    bool has_code(const std::string& code) const;
};

// Pure and total: accepts arbitrary models, including mutants, and reports
// every detected issue instead of throwing.
ValidationReport validate(const ChatbotProject& project);

enum class ElementKind { Intent, Entity, Slot, Action };

struct UseSite {
    std::string file_role;  // domain | nlu | rules | stories
    std::string path;       // human-readable path into the model

    bool operator==(const UseSite&) const = default;
};

// Every location referencing the named element. Throws UnknownElement if
// the name is not declared. Action names resolve against both custom
// actions and response templates.
std::vector<UseSite> usage_sites(const ChatbotProject& project, ElementKind kind,
                                 const std::string& name);

}  // namespace botmut
