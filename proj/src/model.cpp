#include "botmut/model.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "botmut/error.hpp"

namespace botmut {

std::string to_string(Errc code) {
    switch (code) {
        case Errc::MissingDomainFile: return "MissingDomainFile";
        case Errc::MalformedDocument: return "MalformedDocument";
        case Errc::DuplicateName: return "DuplicateName";
        case Errc::IoFailure: return "IoFailure";
        case Errc::UnknownElement: return "UnknownElement";
        case Errc::StaleSite: return "StaleSite";
        case Errc::MalformedScript: return "MalformedScript";
        case Errc::BaselineRed: return "BaselineRed";
        case Errc::RunnerFailure: return "RunnerFailure";
        case Errc::MissingVerdict: return "MissingVerdict";
        case Errc::UndefinedScore: return "UndefinedScore";
        case Errc::UnknownOperator: return "UnknownOperator";
    }
    return "Error";
}

namespace {

template <typename T>
const T* find_by_name(const std::vector<T>& items, const std::string& name) {
    for (const auto& item : items) {
        if (item.name == name) return &item;
    }
    return nullptr;
}

}  // namespace

bool TrainingPhrase::annotations_well_formed() const {
    std::size_t cursor = 0;
    for (const auto& ann : annotations) {
        if (ann.start < cursor) return false;
        if (ann.length == 0 || ann.start + ann.length > text.size()) return false;
        cursor = ann.start + ann.length;
    }
    return true;
}

const Intent* ChatbotProject::find_intent(const std::string& name) const {
    return find_by_name(intents, name);
}
const Entity* ChatbotProject::find_entity(const std::string& name) const {
    return find_by_name(entities, name);
}
const Slot* ChatbotProject::find_slot(const std::string& name) const {
    return find_by_name(slots, name);
}
const ActionDef* ChatbotProject::find_action(const std::string& name) const {
    return find_by_name(actions, name);
}
const ResponseTemplate* ChatbotProject::find_response(const std::string& name) const {
    return find_by_name(responses, name);
}
const Flow* ChatbotProject::find_flow(FlowKind kind, const std::string& name) const {
    for (const auto& flow : flows) {
        if (flow.kind == kind && flow.name == name) return &flow;
    }
    return nullptr;
}

bool structurally_equal(const ChatbotProject& a, const ChatbotProject& b) {
    auto canonical = [](ChatbotProject p) {
        auto by_name = [](const auto& x, const auto& y) { return x.name < y.name; };
        std::sort(p.intents.begin(), p.intents.end(), by_name);
        std::sort(p.entities.begin(), p.entities.end(), by_name);
        std::sort(p.slots.begin(), p.slots.end(), by_name);
        std::sort(p.responses.begin(), p.responses.end(), by_name);
        std::sort(p.actions.begin(), p.actions.end(), by_name);
        std::sort(p.flows.begin(), p.flows.end(), [](const Flow& x, const Flow& y) {
            return std::tie(x.kind, x.name) < std::tie(y.kind, y.name);
        });
        std::sort(p.opaque.begin(), p.opaque.end(), [](const OpaqueFile& x, const OpaqueFile& y) {
            return std::tie(x.path, x.content) < std::tie(y.path, y.content);
        });
        return p;
    };
    ChatbotProject ca = canonical(a);
    ChatbotProject cb = canonical(b);
    return ca.intents == cb.intents && ca.entities == cb.entities && ca.slots == cb.slots &&
           ca.responses == cb.responses && ca.actions == cb.actions && ca.flows == cb.flows &&
           ca.session == cb.session && ca.opaque == cb.opaque;
}

bool ValidationReport::deployable() const {
    return std::none_of(issues.begin(), issues.end(),
                        [](const ValidationIssue& i) { return i.severity == Severity::Broken; });
}

std::vector<ValidationIssue> ValidationReport::broken() const {
    std::vector<ValidationIssue> result;
    for (const auto& issue : issues) {
        if (issue.severity == Severity::Broken) result.push_back(issue);
    }
    return result;
}

bool ValidationReport::has_code(const std::string& code) const {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ValidationIssue& i) { return i.code == code; });
}

namespace {

std::string flow_kind_word(FlowKind kind) {
    return kind == FlowKind::Rule ? "rule" : "story";
}

struct Checker {
    const ChatbotProject& project;
    std::vector<ValidationIssue>& issues;

    void broken(std::string code, std::string message, std::string location) {
        issues.push_back({Severity::Broken, std::move(code), std::move(message), std::move(location)});
    }
    void warning(std::string code, std::string message, std::string location) {
        issues.push_back({Severity::Warning, std::move(code), std::move(message), std::move(location)});
    }

    bool action_resolves(const std::string& name) const {
        return project.find_action(name) != nullptr || project.find_response(name) != nullptr;
    }

    void check_duplicates() {
        auto dup_scan = [&](const auto& items, const std::string& what, const std::string& role) {
            std::unordered_set<std::string> seen;
            for (const auto& item : items) {
                if (!seen.insert(item.name).second) {
                    broken("DuplicateName", what + " '" + item.name + "' declared more than once", role);
                }
            }
        };
        dup_scan(project.intents, "intent", "domain");
        dup_scan(project.entities, "entity", "domain");
        dup_scan(project.slots, "slot", "domain");
        dup_scan(project.responses, "response", "domain");
        dup_scan(project.actions, "action", "domain");
        std::set<std::pair<FlowKind, std::string>> seen_flows;
        for (const auto& flow : project.flows) {
            if (!seen_flows.insert({flow.kind, flow.name}).second) {
                broken("DuplicateName", flow_kind_word(flow.kind) + " '" + flow.name + "' declared more than once",
                       flow.kind == FlowKind::Rule ? "rules" : "stories");
            }
        }
    }

    void check_intents() {
        for (const auto& intent : project.intents) {
            if (intent.name.empty()) {
                broken("EmptyName", "intent with empty name", "domain");
                continue;
            }
            for (std::size_t i = 0; i < intent.examples.size(); ++i) {
                for (const auto& ann : intent.examples[i].annotations) {
                    if (!project.find_entity(ann.entity)) {
                        broken("UndefinedEntityRef",
                               "annotation references undeclared entity '" + ann.entity + "'",
                               "intent " + intent.name + " example " + std::to_string(i));
                    }
                }
            }
            if (!intent.has_training_data()) {
                warning("UntrainedIntent", "intent '" + intent.name + "' has no training examples",
                        "intent " + intent.name);
            }
        }
    }

    void check_slots() {
        for (const auto& slot : project.slots) {
            for (const auto& mapping : slot.mappings) {
                if (!project.find_entity(mapping.from_entity)) {
                    broken("UndefinedEntityRef",
                           "slot mapping references undeclared entity '" + mapping.from_entity + "'",
                           "slot " + slot.name);
                }
            }
            if (slot.kind == SlotKind::Categorical && slot.allowed_values.empty()) {
                warning("CategoricalSlotWithoutValues",
                        "categorical slot '" + slot.name + "' has no allowed values", "slot " + slot.name);
            }
        }
    }

    void check_responses() {
        for (const auto& response : project.responses) {
            if (response.variants.empty()) {
                warning("EmptyResponse", "response '" + response.name + "' has no text variants",
                        "response " + response.name);
            }
            for (const auto& variant : response.variants) {
                for (const auto& slot_name : placeholder_names(variant)) {
                    if (!project.find_slot(slot_name)) {
                        broken("UndefinedSlotRef",
                               "response interpolates undeclared slot '" + slot_name + "'",
                               "response " + response.name);
                    }
                }
            }
        }
    }

    void check_actions() {
        for (const auto& action : project.actions) {
            for (const auto& uttered : action.utters) {
                if (!project.find_response(uttered)) {
                    broken("UndefinedActionRef",
                           "action '" + action.name + "' utters undeclared response '" + uttered + "'",
                           "action " + action.name);
                }
            }
        }
    }

    void check_flows() {
        for (const auto& flow : project.flows) {
            const std::string where = flow_kind_word(flow.kind) + " " + flow.name;
            if (flow.steps.empty()) {
                broken("EmptyFlow", where + " has no steps", where);
                continue;
            }
            if (flow.kind == FlowKind::Rule && flow.steps.front().is_action()) {
                broken("DanglingRuleAction",
                       where + " starts with action '" + flow.steps.front().name +
                           "' and has no triggering intent",
                       where);
            }
            for (std::size_t i = 0; i < flow.steps.size(); ++i) {
                const auto& step = flow.steps[i];
                const std::string at = where + " step " + std::to_string(i);
                if (step.is_intent()) {
                    if (!project.find_intent(step.name)) {
                        broken("UndefinedIntentRef", "step references undeclared intent '" + step.name + "'", at);
                    }
                    for (const auto& binding : step.bindings) {
                        if (!project.find_entity(binding.entity)) {
                            broken("UndefinedEntityRef",
                                   "step binds undeclared entity '" + binding.entity + "'", at);
                        }
                    }
                } else if (!action_resolves(step.name)) {
                    broken("UndefinedActionRef", "step references undeclared action '" + step.name + "'", at);
                }
            }
        }
    }

    // Two rules with identical intent-step sequences but differing
    // action-step sequences cannot coexist in one policy.
    void check_contradictory_rules() {
        std::vector<const Flow*> rules;
        for (const auto& flow : project.flows) {
            if (flow.kind == FlowKind::Rule) rules.push_back(&flow);
        }
        auto intent_seq = [](const Flow& f) {
            std::vector<std::string> seq;
            for (const auto& s : f.steps)
                if (s.is_intent()) seq.push_back(s.name);
            return seq;
        };
        auto action_seq = [](const Flow& f) {
            std::vector<std::string> seq;
            for (const auto& s : f.steps)
                if (s.is_action()) seq.push_back(s.name);
            return seq;
        };
        for (std::size_t i = 0; i < rules.size(); ++i) {
            for (std::size_t j = i + 1; j < rules.size(); ++j) {
                if (intent_seq(*rules[i]) == intent_seq(*rules[j]) &&
                    action_seq(*rules[i]) != action_seq(*rules[j])) {
                    broken("ContradictoryRules",
                           "rules '" + rules[i]->name + "' and '" + rules[j]->name +
                               "' share the same intents but prescribe different actions",
                           "rules");
                }
            }
        }
    }

    static std::vector<std::string> placeholder_names(const std::string& text) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '{') continue;
            auto close = text.find('}', i + 1);
            if (close == std::string::npos) break;
            std::string name = text.substr(i + 1, close - i - 1);
            if (!name.empty() && name.find_first_of("{} \t") == std::string::npos) {
                names.push_back(name);
                i = close;
            }
        }
        return names;
    }
};

}  // namespace

ValidationReport validate(const ChatbotProject& project) {
    ValidationReport report;
    Checker checker{project, report.issues};
    checker.check_duplicates();
    checker.check_intents();
    checker.check_slots();
    checker.check_responses();
    checker.check_actions();
    checker.check_flows();
    checker.check_contradictory_rules();
    return report;
}

std::vector<UseSite> usage_sites(const ChatbotProject& project, ElementKind kind,
                                 const std::string& name) {
    const bool declared = [&] {
        switch (kind) {
            case ElementKind::Intent: return project.find_intent(name) != nullptr;
            case ElementKind::Entity: return project.find_entity(name) != nullptr;
            case ElementKind::Slot: return project.find_slot(name) != nullptr;
            case ElementKind::Action:
                return project.find_action(name) != nullptr || project.find_response(name) != nullptr;
        }
        return false;
    }();
    if (!declared) {
        throw Error(Errc::UnknownElement, "no declared element named '" + name + "'");
    }

    std::vector<UseSite> sites;
    auto flow_role = [](const Flow& f) { return f.kind == FlowKind::Rule ? "rules" : "stories"; };

    switch (kind) {
        case ElementKind::Intent: {
            if (project.find_intent(name)->has_training_data()) {
                sites.push_back({"nlu", "nlu block for intent " + name});
            }
            for (const auto& flow : project.flows) {
                for (std::size_t i = 0; i < flow.steps.size(); ++i) {
                    const auto& step = flow.steps[i];
                    if (step.is_intent() && step.name == name) {
                        sites.push_back({flow_role(flow), flow_kind_word(flow.kind) + " " + flow.name +
                                                              " step " + std::to_string(i)});
                    }
                }
            }
            break;
        }
        case ElementKind::Entity: {
            for (const auto& slot : project.slots) {
                bool mapped = std::any_of(slot.mappings.begin(), slot.mappings.end(),
                                          [&](const SlotMapping& m) { return m.from_entity == name; });
                if (mapped) sites.push_back({"domain", "slot " + slot.name + " mapping"});
            }
            for (const auto& intent : project.intents) {
                bool annotated = false;
                for (const auto& example : intent.examples) {
                    for (const auto& ann : example.annotations) {
                        if (ann.entity == name) annotated = true;
                    }
                }
                if (annotated) sites.push_back({"nlu", "annotations in intent " + intent.name + " examples"});
            }
            for (const auto& flow : project.flows) {
                for (std::size_t i = 0; i < flow.steps.size(); ++i) {
                    for (const auto& binding : flow.steps[i].bindings) {
                        if (binding.entity == name) {
                            sites.push_back({flow_role(flow), flow_kind_word(flow.kind) + " " + flow.name +
                                                                  " step " + std::to_string(i) + " binding"});
                        }
                    }
                }
            }
            break;
        }
        case ElementKind::Slot: {
            for (const auto& response : project.responses) {
                bool interpolated = false;
                for (const auto& variant : response.variants) {
                    auto names = Checker::placeholder_names(variant);
                    if (std::find(names.begin(), names.end(), name) != names.end()) interpolated = true;
                }
                if (interpolated) sites.push_back({"domain", "response " + response.name + " placeholder"});
            }
            break;
        }
        case ElementKind::Action: {
            for (const auto& flow : project.flows) {
                for (std::size_t i = 0; i < flow.steps.size(); ++i) {
                    const auto& step = flow.steps[i];
                    if (step.is_action() && step.name == name) {
                        sites.push_back({flow_role(flow), flow_kind_word(flow.kind) + " " + flow.name +
                                                              " step " + std::to_string(i)});
                    }
                }
            }
            for (const auto& action : project.actions) {
                if (std::find(action.utters.begin(), action.utters.end(), name) != action.utters.end()) {
                    sites.push_back({"domain", "action " + action.name + " utters"});
                }
            }
            break;
        }
    }
    return sites;
}

}  // namespace botmut
