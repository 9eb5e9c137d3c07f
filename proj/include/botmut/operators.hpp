#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "botmut/model.hpp"

namespace botmut {

// The eleven conversational mutation operators. Enum order is the stable
// enumeration and reporting order; the names are the stable identifiers
// used in CLI flags, manifests, and reports.
enum class OperatorId {
    RemoveIntentFromNLU,
    RemoveEntity,
    RemoveRule,
    RemoveStory,
    RemoveIntentFromStory,
    RemoveIntentFromRule,
    RemoveInteractionFromRule,
    RemoveInteractionFromStory,
    ChangeSessionExpTimeInt,
    ChangeSessionExpTimeFloat,
    ToggleCarryOverSlots,
};

inline constexpr std::array<OperatorId, 11> kAllOperators = {
    OperatorId::RemoveIntentFromNLU,       OperatorId::RemoveEntity,
    OperatorId::RemoveRule,                OperatorId::RemoveStory,
    OperatorId::RemoveIntentFromStory,     OperatorId::RemoveIntentFromRule,
    OperatorId::RemoveInteractionFromRule, OperatorId::RemoveInteractionFromStory,
    OperatorId::ChangeSessionExpTimeInt,   OperatorId::ChangeSessionExpTimeFloat,
    OperatorId::ToggleCarryOverSlots,
};

std::string_view operator_name(OperatorId op);
std::optional<OperatorId> operator_from_name(std::string_view name);

enum class OperatorCategory { ChatbotStructure, Flow };

// Operators 1-4 affect the chatbot structure; the remaining seven affect
// the conversation flow.
OperatorCategory category(OperatorId op);
std::string_view category_name(OperatorCategory cat);

// One applicable location of one operator; applying it yields exactly one
// mutant. Targets are stored by name so sites stay meaningful in manifests.
struct MutationSite {
    OperatorId op = OperatorId::RemoveIntentFromNLU;
    std::string target;                // intent / entity / flow name
    int step_index = -1;               // step-targeted operators
    std::string variant;               // "extend" | "shorten" for session-time operators
    std::optional<double> new_value;   // session-time payload
    std::string description;           // stable human-readable summary

    bool operator==(const MutationSite&) const = default;
};

// Deterministic, duplicate-free site enumeration in model declaration
// order. Validity of the project is not required, only that it parsed.
std::vector<MutationSite> enumerate_sites(const ChatbotProject& project, OperatorId op);

// Pure application: returns a new model with exactly one logical change.
// Throws StaleSite if the target no longer resolves.
ChatbotProject apply(const ChatbotProject& project, const MutationSite& site);

}  // namespace botmut
