#include "botmut/operators.hpp"

#include <algorithm>

#include "botmut/error.hpp"
#include "text_util.hpp"

namespace botmut {

std::string_view operator_name(OperatorId op) {
    switch (op) {
        case OperatorId::RemoveIntentFromNLU: return "removeIntentFromNLU";
        case OperatorId::RemoveEntity: return "removeEntity";
        case OperatorId::RemoveRule: return "removeRule";
        case OperatorId::RemoveStory: return "removeStory";
        case OperatorId::RemoveIntentFromStory: return "removeIntentFromStory";
        case OperatorId::RemoveIntentFromRule: return "removeIntentFromRule";
        case OperatorId::RemoveInteractionFromRule: return "removeInteractionFromRule";
        case OperatorId::RemoveInteractionFromStory: return "removeInteractionFromStory";
        case OperatorId::ChangeSessionExpTimeInt: return "changeSessionExpTimeInt";
        case OperatorId::ChangeSessionExpTimeFloat: return "changeSessionExpTimeFloat";
        case OperatorId::ToggleCarryOverSlots: return "toggleCarryOverSlots";
    }
    return "unknown";
}

std::optional<OperatorId> operator_from_name(std::string_view name) {
    for (OperatorId op : kAllOperators) {
        if (operator_name(op) == name) return op;
    }
    return std::nullopt;
}

OperatorCategory category(OperatorId op) {
    switch (op) {
        case OperatorId::RemoveIntentFromNLU:
        case OperatorId::RemoveEntity:
        case OperatorId::RemoveRule:
        case OperatorId::RemoveStory:
            return OperatorCategory::ChatbotStructure;
        default:
            return OperatorCategory::Flow;
    }
}

std::string_view category_name(OperatorCategory cat) {
    return cat == OperatorCategory::ChatbotStructure ? "ChatbotStructure" : "Flow";
}

namespace {

constexpr double kIntDeltaMinutes = 60.0;
constexpr double kFloatFactorExtend = 1.5;
constexpr double kFloatFactorShorten = 0.5;

std::string flow_word(FlowKind kind) { return kind == FlowKind::Rule ? "rule" : "story"; }

MutationSite flow_site(OperatorId op, const Flow& flow, int step_index, const std::string& what) {
    MutationSite site;
    site.op = op;
    site.target = flow.name;
    site.step_index = step_index;
    site.description = flow_word(flow.kind) + " '" + flow.name + "' step " + std::to_string(step_index) +
                       " (" + what + ")";
    return site;
}

MutationSite session_time_site(OperatorId op, const SessionConfig& session, bool extend) {
    double current = session.expiration_minutes;
    double next = 0;
    if (op == OperatorId::ChangeSessionExpTimeInt) {
        next = extend ? current + kIntDeltaMinutes : std::max(1.0, current - kIntDeltaMinutes);
    } else {
        next = current * (extend ? kFloatFactorExtend : kFloatFactorShorten);
    }
    MutationSite site;
    site.op = op;
    site.variant = extend ? "extend" : "shorten";
    site.new_value = next;
    site.description = "session_expiration_time " + detail::format_number(current) + " -> " +
                       detail::format_number(next);
    return site;
}

// An interaction is an intent step plus the maximal run of action steps
// immediately following it.
std::vector<int> interaction_starts(const Flow& flow) {
    std::vector<int> starts;
    for (size_t i = 0; i < flow.steps.size(); ++i) {
        if (flow.steps[i].is_intent()) starts.push_back(static_cast<int>(i));
    }
    return starts;
}

[[noreturn]] void stale(const MutationSite& site, const std::string& why) {
    throw Error(Errc::StaleSite, std::string(operator_name(site.op)) + " site '" + site.description +
                                     "': " + why);
}

Flow* find_flow_mut(ChatbotProject& project, FlowKind kind, const std::string& name) {
    for (auto& flow : project.flows) {
        if (flow.kind == kind && flow.name == name) return &flow;
    }
    return nullptr;
}

}  // namespace

std::vector<MutationSite> enumerate_sites(const ChatbotProject& project, OperatorId op) {
    std::vector<MutationSite> sites;
    switch (op) {
        case OperatorId::RemoveIntentFromNLU:
            for (const auto& intent : project.intents) {
                if (!intent.has_training_data()) continue;
                MutationSite site;
                site.op = op;
                site.target = intent.name;
                site.description = "intent '" + intent.name + "' nlu block";
                sites.push_back(std::move(site));
            }
            break;
        case OperatorId::RemoveEntity:
            for (const auto& entity : project.entities) {
                MutationSite site;
                site.op = op;
                site.target = entity.name;
                site.description = "entity '" + entity.name + "'";
                sites.push_back(std::move(site));
            }
            break;
        case OperatorId::RemoveRule:
        case OperatorId::RemoveStory: {
            FlowKind kind = op == OperatorId::RemoveRule ? FlowKind::Rule : FlowKind::Story;
            for (const auto& flow : project.flows) {
                if (flow.kind != kind) continue;
                MutationSite site;
                site.op = op;
                site.target = flow.name;
                site.description = flow_word(kind) + " '" + flow.name + "'";
                sites.push_back(std::move(site));
            }
            break;
        }
        case OperatorId::RemoveIntentFromStory:
        case OperatorId::RemoveIntentFromRule: {
            FlowKind kind = op == OperatorId::RemoveIntentFromStory ? FlowKind::Story : FlowKind::Rule;
            for (const auto& flow : project.flows) {
                if (flow.kind != kind) continue;
                for (size_t i = 0; i < flow.steps.size(); ++i) {
                    if (flow.steps[i].is_intent()) {
                        sites.push_back(
                            flow_site(op, flow, static_cast<int>(i), "intent " + flow.steps[i].name));
                    }
                }
            }
            break;
        }
        case OperatorId::RemoveInteractionFromRule:
        case OperatorId::RemoveInteractionFromStory: {
            FlowKind kind = op == OperatorId::RemoveInteractionFromRule ? FlowKind::Rule : FlowKind::Story;
            for (const auto& flow : project.flows) {
                if (flow.kind != kind) continue;
                for (int start : interaction_starts(flow)) {
                    sites.push_back(flow_site(op, flow, start, "interaction at intent " + flow.steps[start].name));
                }
            }
            break;
        }
        case OperatorId::ChangeSessionExpTimeInt:
        case OperatorId::ChangeSessionExpTimeFloat:
            sites.push_back(session_time_site(op, project.session, true));
            sites.push_back(session_time_site(op, project.session, false));
            break;
        case OperatorId::ToggleCarryOverSlots: {
            MutationSite site;
            site.op = op;
            site.description = std::string("carry_over_slots_to_new_session ") +
                               (project.session.carry_over_slots ? "true -> false" : "false -> true");
            sites.push_back(std::move(site));
            break;
        }
    }
    return sites;
}

ChatbotProject apply(const ChatbotProject& project, const MutationSite& site) {
    ChatbotProject mutant = project;
    switch (site.op) {
        case OperatorId::RemoveIntentFromNLU: {
            for (auto& intent : mutant.intents) {
                if (intent.name != site.target) continue;
                if (!intent.has_training_data()) stale(site, "intent has no nlu block");
                intent.examples.clear();  // declaration stays in the domain
                return mutant;
            }
            stale(site, "intent not found");
        }
        case OperatorId::RemoveEntity: {
            auto it = std::find_if(mutant.entities.begin(), mutant.entities.end(),
                                   [&](const Entity& e) { return e.name == site.target; });
            if (it == mutant.entities.end()) stale(site, "entity not found");
            mutant.entities.erase(it);
            // annotations disappear but their surface text stays
            for (auto& intent : mutant.intents) {
                for (auto& example : intent.examples) {
                    std::erase_if(example.annotations,
                                  [&](const EntityAnnotation& a) { return a.entity == site.target; });
                }
            }
            for (auto& slot : mutant.slots) {
                std::erase_if(slot.mappings,
                              [&](const SlotMapping& m) { return m.from_entity == site.target; });
            }
            return mutant;
        }
        case OperatorId::RemoveRule:
        case OperatorId::RemoveStory: {
            FlowKind kind = site.op == OperatorId::RemoveRule ? FlowKind::Rule : FlowKind::Story;
            auto it = std::find_if(mutant.flows.begin(), mutant.flows.end(), [&](const Flow& f) {
                return f.kind == kind && f.name == site.target;
            });
            if (it == mutant.flows.end()) stale(site, "flow not found");
            mutant.flows.erase(it);
            return mutant;
        }
        case OperatorId::RemoveIntentFromStory:
        case OperatorId::RemoveIntentFromRule: {
            FlowKind kind = site.op == OperatorId::RemoveIntentFromStory ? FlowKind::Story : FlowKind::Rule;
            Flow* flow = find_flow_mut(mutant, kind, site.target);
            if (!flow) stale(site, "flow not found");
            if (site.step_index < 0 || site.step_index >= static_cast<int>(flow->steps.size()) ||
                !flow->steps[site.step_index].is_intent()) {
                stale(site, "step is not an intent step");
            }
            flow->steps.erase(flow->steps.begin() + site.step_index);
            return mutant;
        }
        case OperatorId::RemoveInteractionFromRule:
        case OperatorId::RemoveInteractionFromStory: {
            FlowKind kind = site.op == OperatorId::RemoveInteractionFromRule ? FlowKind::Rule : FlowKind::Story;
            Flow* flow = find_flow_mut(mutant, kind, site.target);
            if (!flow) stale(site, "flow not found");
            if (site.step_index < 0 || site.step_index >= static_cast<int>(flow->steps.size()) ||
                !flow->steps[site.step_index].is_intent()) {
                stale(site, "step is not an intent step");
            }
            auto first = flow->steps.begin() + site.step_index;
            auto last = first + 1;
            while (last != flow->steps.end() && last->is_action()) ++last;
            flow->steps.erase(first, last);
            return mutant;
        }
        case OperatorId::ChangeSessionExpTimeInt:
        case OperatorId::ChangeSessionExpTimeFloat: {
            if (!site.new_value) stale(site, "missing payload");
            mutant.session.expiration_minutes = *site.new_value;
            return mutant;
        }
        case OperatorId::ToggleCarryOverSlots:
            mutant.session.carry_over_slots = !mutant.session.carry_over_slots;
            return mutant;
    }
    stale(site, "unhandled operator");
}

}  // namespace botmut
