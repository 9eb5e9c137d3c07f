#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "botmut/error.hpp"
#include "botmut/rasa.hpp"
#include "text_util.hpp"

namespace botmut::rasa {

namespace {

using detail::format_number;
using detail::yaml_scalar;

constexpr const char* kVersionLine = "version: \"3.1\"\n";

std::string annotated_text(const TrainingPhrase& phrase) {
    std::string out;
    size_t cursor = 0;
    for (const auto& ann : phrase.annotations) {
        if (ann.start < cursor || ann.start + ann.length > phrase.text.size()) continue;
        out += phrase.text.substr(cursor, ann.start - cursor);
        out += "[" + phrase.text.substr(ann.start, ann.length) + "](" + ann.entity + ")";
        cursor = ann.start + ann.length;
    }
    out += phrase.text.substr(cursor);
    return out;
}

std::string emit_domain(const ChatbotProject& p) {
    std::ostringstream out;
    out << kVersionLine;
    if (!p.intents.empty()) {
        out << "intents:\n";
        for (const auto& intent : p.intents) out << "  - " << yaml_scalar(intent.name) << "\n";
    }
    if (!p.entities.empty()) {
        out << "entities:\n";
        for (const auto& entity : p.entities) {
            if (entity.values.empty()) {
                out << "  - " << yaml_scalar(entity.name) << "\n";
                continue;
            }
            out << "  - " << yaml_scalar(entity.name) << ":\n      values:\n";
            for (const auto& value : entity.values) {
                if (value.synonyms.empty()) {
                    out << "        - " << yaml_scalar(value.value) << "\n";
                } else {
                    out << "        - value: " << yaml_scalar(value.value) << "\n          synonyms:\n";
                    for (const auto& syn : value.synonyms) out << "            - " << yaml_scalar(syn) << "\n";
                }
            }
        }
    }
    if (!p.slots.empty()) {
        out << "slots:\n";
        for (const auto& slot : p.slots) {
            out << "  " << yaml_scalar(slot.name) << ":\n";
            const char* type = slot.kind == SlotKind::Text         ? "text"
                               : slot.kind == SlotKind::Categorical ? "categorical"
                                                                    : "bool";
            out << "    type: " << type << "\n";
            if (!slot.allowed_values.empty()) {
                out << "    values:\n";
                for (const auto& value : slot.allowed_values) out << "      - " << yaml_scalar(value) << "\n";
            }
            if (!slot.mappings.empty()) {
                out << "    mappings:\n";
                for (const auto& mapping : slot.mappings) {
                    out << "      - type: from_entity\n        entity: " << yaml_scalar(mapping.from_entity)
                        << "\n";
                }
            }
        }
    }
    if (!p.responses.empty()) {
        out << "responses:\n";
        for (const auto& response : p.responses) {
            out << "  " << yaml_scalar(response.name) << ":\n";
            for (const auto& variant : response.variants) {
                out << "    - text: " << detail::yaml_quote(variant) << "\n";
            }
        }
    }
    if (!p.actions.empty()) {
        out << "actions:\n";
        for (const auto& action : p.actions) {
            if (action.utters.empty()) {
                out << "  - " << yaml_scalar(action.name) << "\n";
            } else {
                out << "  - " << yaml_scalar(action.name) << ":\n      utters:\n";
                for (const auto& uttered : action.utters) out << "        - " << yaml_scalar(uttered) << "\n";
            }
        }
    }
    out << "session_config:\n";
    out << "  session_expiration_time: " << format_number(p.session.expiration_minutes) << "\n";
    out << "  carry_over_slots_to_new_session: " << (p.session.carry_over_slots ? "true" : "false") << "\n";
    return out.str();
}

std::string emit_nlu(const ChatbotProject& p) {
    std::ostringstream out;
    out << kVersionLine;
    bool any = std::any_of(p.intents.begin(), p.intents.end(),
                           [](const Intent& i) { return i.has_training_data(); });
    if (any) {
        out << "nlu:\n";
        for (const auto& intent : p.intents) {
            if (!intent.has_training_data()) continue;
            out << "  - intent: " << yaml_scalar(intent.name) << "\n    examples: |\n";
            for (const auto& phrase : intent.examples) {
                out << "      - " << annotated_text(phrase) << "\n";
            }
        }
    }
    return out.str();
}

std::string emit_flows(const ChatbotProject& p, FlowKind kind) {
    std::ostringstream out;
    out << kVersionLine;
    const char* collection = kind == FlowKind::Rule ? "rules" : "stories";
    const char* item_key = kind == FlowKind::Rule ? "rule" : "story";
    bool any = std::any_of(p.flows.begin(), p.flows.end(), [&](const Flow& f) { return f.kind == kind; });
    if (any) {
        out << collection << ":\n";
        for (const auto& flow : p.flows) {
            if (flow.kind != kind) continue;
            out << "  - " << item_key << ": " << yaml_scalar(flow.name) << "\n";
            out << "    steps:\n";
            for (const auto& step : flow.steps) {
                if (step.is_intent()) {
                    out << "      - intent: " << yaml_scalar(step.name) << "\n";
                    if (!step.bindings.empty()) {
                        out << "        entities:\n";
                        for (const auto& binding : step.bindings) {
                            if (binding.value.empty()) {
                                out << "          - " << yaml_scalar(binding.entity) << "\n";
                            } else {
                                out << "          - " << yaml_scalar(binding.entity) << ": "
                                    << yaml_scalar(binding.value) << "\n";
                            }
                        }
                    }
                } else {
                    out << "      - action: " << yaml_scalar(step.name) << "\n";
                }
            }
            if (flow.steps.empty()) out << "      []\n";
        }
    }
    return out.str();
}

std::string role_for_path(const std::string& path) {
    if (path == "domain.yml") return "domain";
    if (path == "data/nlu.yml") return "nlu";
    if (path == "data/rules.yml") return "rules";
    if (path == "data/stories.yml") return "stories";
    if (path == "config.yml") return "config";
    return path;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> serialize_project(const ChatbotProject& project) {
    std::vector<std::pair<std::string, std::string>> files = {
        {"domain.yml", emit_domain(project)},
        {"data/nlu.yml", emit_nlu(project)},
        {"data/rules.yml", emit_flows(project, FlowKind::Rule)},
        {"data/stories.yml", emit_flows(project, FlowKind::Story)},
    };
    std::vector<const OpaqueFile*> extras;
    for (const auto& blob : project.opaque) {
        bool merged = false;
        for (auto& [path, content] : files) {
            if (path == blob.path) {
                content += blob.content;
                merged = true;
                break;
            }
        }
        if (!merged) extras.push_back(&blob);
    }
    std::sort(extras.begin(), extras.end(),
              [](const OpaqueFile* a, const OpaqueFile* b) { return a->path < b->path; });
    for (const OpaqueFile* blob : extras) files.emplace_back(blob->path, blob->content);
    return files;
}

std::vector<std::filesystem::path> write_project(const ChatbotProject& project,
                                                 const std::filesystem::path& root) {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    std::vector<std::filesystem::path> written;
    for (const auto& [rel, content] : serialize_project(project)) {
        std::filesystem::path path = root / rel;
        detail::write_file(path, content);
        written.push_back(path);
    }
    return written;
}

std::string fingerprint(const ChatbotProject& project) {
    std::uint64_t h = detail::fnv1a("");
    for (const auto& [path, content] : serialize_project(project)) {
        h = detail::fnv1a(path, h);
        h = detail::fnv1a(std::string_view("\0", 1), h);
        h = detail::fnv1a(content, h);
        h = detail::fnv1a(std::string_view("\0", 1), h);
    }
    return detail::hex64(h);
}

namespace {

template <typename T, typename Describe>
void diff_named(const std::vector<T>& a, const std::vector<T>& b, const std::string& role,
                const std::string& section, const std::string& what, Describe describe,
                std::vector<DiffEntry>& out) {
    std::map<std::string, const T*> left, right;
    for (const auto& item : a) left[item.name] = &item;
    for (const auto& item : b) right[item.name] = &item;
    std::vector<std::string> notes;
    for (const auto& [name, item] : left) {
        auto it = right.find(name);
        if (it == right.end()) {
            notes.push_back("removed " + what + " '" + name + "'");
        } else if (!(*item == *it->second)) {
            notes.push_back(describe(name, *item, *it->second));
        }
    }
    for (const auto& [name, item] : right) {
        if (!left.count(name)) notes.push_back("added " + what + " '" + name + "'");
    }
    for (auto& note : notes) out.push_back({role, section, std::move(note)});
}

}  // namespace

std::vector<DiffEntry> diff_projects(const ChatbotProject& a, const ChatbotProject& b) {
    std::vector<DiffEntry> out;

    // Declarations (names) belong to the domain; training data to the NLU.
    {
        std::set<std::string> left, right;
        for (const auto& i : a.intents) left.insert(i.name);
        for (const auto& i : b.intents) right.insert(i.name);
        for (const auto& name : left) {
            if (!right.count(name)) out.push_back({"domain", "intents", "removed intent '" + name + "'"});
        }
        for (const auto& name : right) {
            if (!left.count(name)) out.push_back({"domain", "intents", "added intent '" + name + "'"});
        }
    }
    diff_named(a.entities, b.entities, "domain", "entities", "entity",
               [](const std::string& n, const Entity&, const Entity&) { return "entity '" + n + "' changed"; },
               out);
    diff_named(a.slots, b.slots, "domain", "slots", "slot",
               [](const std::string& n, const Slot&, const Slot&) { return "slot '" + n + "' changed"; }, out);
    diff_named(a.responses, b.responses, "domain", "responses", "response",
               [](const std::string& n, const ResponseTemplate&, const ResponseTemplate&) {
                   return "response '" + n + "' changed";
               },
               out);
    diff_named(a.actions, b.actions, "domain", "actions", "action",
               [](const std::string& n, const ActionDef&, const ActionDef&) { return "action '" + n + "' changed"; },
               out);
    if (!(a.session == b.session)) {
        std::string note;
        if (a.session.expiration_minutes != b.session.expiration_minutes) {
            note = "session_expiration_time " + format_number(a.session.expiration_minutes) + " -> " +
                   format_number(b.session.expiration_minutes);
        } else {
            note = std::string("carry_over_slots_to_new_session ") +
                   (a.session.carry_over_slots ? "true" : "false") + " -> " +
                   (b.session.carry_over_slots ? "true" : "false");
        }
        out.push_back({"domain", "session_config", note});
    }

    // NLU blocks: example text vs annotation-only changes are distinct sections.
    {
        std::map<std::string, const Intent*> left, right;
        for (const auto& i : a.intents) left[i.name] = &i;
        for (const auto& i : b.intents) right[i.name] = &i;
        for (const auto& [name, intent] : left) {
            auto it = right.find(name);
            const Intent* other = it == right.end() ? nullptr : it->second;
            if (intent->examples.empty() && (!other || other->examples.empty())) continue;
            if (!other) {
                out.push_back({"nlu", "examples", "removed nlu block for intent '" + name + "'"});
                continue;
            }
            if (intent->examples == other->examples) continue;
            auto texts = [](const Intent& i) {
                std::vector<std::string> t;
                for (const auto& e : i.examples) t.push_back(e.text);
                return t;
            };
            if (texts(*intent) == texts(*other)) {
                out.push_back({"nlu", "annotations", "intent '" + name + "' annotations changed"});
            } else if (other->examples.empty()) {
                out.push_back({"nlu", "examples", "removed nlu block for intent '" + name + "'"});
            } else if (intent->examples.empty()) {
                out.push_back({"nlu", "examples", "added nlu block for intent '" + name + "'"});
            } else {
                out.push_back({"nlu", "examples", "intent '" + name + "' examples changed"});
            }
        }
        for (const auto& [name, intent] : right) {
            if (!left.count(name) && intent->has_training_data()) {
                out.push_back({"nlu", "examples", "added nlu block for intent '" + name + "'"});
            }
        }
    }

    // Flows, one entry per changed flow.
    for (FlowKind kind : {FlowKind::Rule, FlowKind::Story}) {
        const std::string role = kind == FlowKind::Rule ? "rules" : "stories";
        const std::string what = kind == FlowKind::Rule ? "rule" : "story";
        std::map<std::string, const Flow*> left, right;
        for (const auto& f : a.flows) {
            if (f.kind == kind) left[f.name] = &f;
        }
        for (const auto& f : b.flows) {
            if (f.kind == kind) right[f.name] = &f;
        }
        for (const auto& [name, flow] : left) {
            auto it = right.find(name);
            if (it == right.end()) {
                out.push_back({role, name, "removed " + what + " '" + name + "'"});
            } else if (!(*flow == *it->second)) {
                out.push_back({role, name,
                               what + " '" + name + "' changed (" + std::to_string(flow->steps.size()) + " -> " +
                                   std::to_string(it->second->steps.size()) + " steps)"});
            }
        }
        for (const auto& [name, flow] : right) {
            if (!left.count(name)) out.push_back({role, name, "added " + what + " '" + name + "'"});
        }
    }

    // Opaque content never changes under mutation but diff stays total.
    {
        std::map<std::string, const OpaqueFile*> left, right;
        for (const auto& o : a.opaque) left[o.path] = &o;
        for (const auto& o : b.opaque) right[o.path] = &o;
        for (const auto& [path, blob] : left) {
            auto it = right.find(path);
            if (it == right.end()) {
                out.push_back({role_for_path(path), "opaque", "removed opaque content in " + path});
            } else if (blob->content != it->second->content) {
                out.push_back({role_for_path(path), "opaque", "opaque content in " + path + " changed"});
            }
        }
        for (const auto& [path, blob] : right) {
            if (!left.count(path)) out.push_back({role_for_path(path), "opaque", "added opaque content in " + path});
        }
    }

    return out;
}

}  // namespace botmut::rasa
