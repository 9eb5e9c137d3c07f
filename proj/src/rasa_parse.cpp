#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <map>
#include <set>

#include "botmut/error.hpp"
#include "botmut/rasa.hpp"
#include "text_util.hpp"

namespace botmut::rasa {

namespace {

using detail::split_lines;
using detail::starts_with;
using detail::trim;

[[noreturn]] void malformed(const std::string& file, int line, const std::string& what) {
    std::string where = file;
    if (line > 0) where += ":" + std::to_string(line);
    throw Error(Errc::MalformedDocument, where + ": " + what);
}

[[noreturn]] void malformed(const std::string& file, const YAML::Node& node, const std::string& what) {
    malformed(file, node.Mark().line + 1, what);
}

int node_line(const YAML::Node& node) { return node.Mark().line + 1; }

bool is_section_start(const std::string& line) {
    if (line.empty()) return false;
    char first = line.front();
    if (!(std::isalpha(static_cast<unsigned char>(first)) || first == '_')) return false;
    auto colon = line.find(':');
    if (colon == std::string::npos) return false;
    for (size_t i = 0; i < colon; ++i) {
        char c = line[i];
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
    }
    return true;
}

struct RawSection {
    std::string key;
    std::string text;  // verbatim, from the key line to just before the next one
};

// Slice a file into top-level sections so unrecognized keys can be carried
// through byte-identical. Block scalar content is always indented, so a
// column-0 key line reliably starts a new section within this subset.
std::vector<RawSection> slice_sections(const std::string& content) {
    std::vector<RawSection> sections;
    std::string current_key;
    std::string current_text;
    size_t pos = 0;
    while (pos < content.size()) {
        size_t nl = content.find('\n', pos);
        size_t end = nl == std::string::npos ? content.size() : nl + 1;
        std::string line = content.substr(pos, end - pos);
        std::string stripped = line;
        while (!stripped.empty() && (stripped.back() == '\n' || stripped.back() == '\r')) stripped.pop_back();
        if (is_section_start(stripped)) {
            if (!current_key.empty()) sections.push_back({current_key, current_text});
            current_key = stripped.substr(0, stripped.find(':'));
            current_text.clear();
        }
        if (!current_key.empty()) current_text += line;
        pos = end;
    }
    if (!current_key.empty()) sections.push_back({current_key, current_text});
    return sections;
}

YAML::Node load_document(const std::string& content, const std::string& file) {
    try {
        return YAML::Load(content);
    } catch (const YAML::ParserException& e) {
        malformed(file, e.mark.line + 1, e.msg);
    } catch (const YAML::Exception& e) {
        malformed(file, e.mark.line + 1, e.msg);
    }
}

std::string scalar_of(const YAML::Node& node, const std::string& file, const std::string& what) {
    if (!node || !node.IsScalar()) malformed(file, node, "expected a scalar for " + what);
    return node.as<std::string>();
}

// `[text](entity)` annotations; everything else is literal.
TrainingPhrase parse_phrase(const std::string& raw) {
    TrainingPhrase phrase;
    size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] == '[') {
            size_t close = raw.find("](", i + 1);
            size_t paren_end = close == std::string::npos ? std::string::npos : raw.find(')', close + 2);
            if (close != std::string::npos && paren_end != std::string::npos) {
                std::string value = raw.substr(i + 1, close - i - 1);
                std::string entity = raw.substr(close + 2, paren_end - close - 2);
                if (!entity.empty() && !value.empty()) {
                    phrase.annotations.push_back({phrase.text.size(), value.size(), entity, value});
                    phrase.text += value;
                    i = paren_end + 1;
                    continue;
                }
            }
        }
        phrase.text.push_back(raw[i]);
        ++i;
    }
    return phrase;
}

std::vector<TrainingPhrase> parse_examples_block(const std::string& block, const std::string& file, int line) {
    std::vector<TrainingPhrase> phrases;
    for (const std::string& raw_line : split_lines(block)) {
        std::string item = trim(raw_line);
        if (item.empty()) continue;
        if (!starts_with(item, "- ")) malformed(file, line, "example lines must start with '- '");
        phrases.push_back(parse_phrase(item.substr(2)));
    }
    return phrases;
}

struct Parser {
    const ProjectLayout& layout;
    ChatbotProject project;
    std::set<std::string> nlu_intents_seen;

    void duplicate(const std::string& what, const std::string& name, const std::string& file) {
        throw Error(Errc::DuplicateName, what + " '" + name + "' declared more than once in " + file);
    }

    void take_opaque(const std::string& rel_path, const std::string& content,
                     const std::set<std::string>& recognized) {
        std::string extra;
        for (const auto& section : slice_sections(content)) {
            if (!recognized.count(section.key)) extra += section.text;
        }
        if (!extra.empty()) add_opaque(rel_path, extra);
    }

    void add_opaque(const std::string& rel_path, std::string content) {
        for (auto& blob : project.opaque) {
            if (blob.path == rel_path) {
                blob.content += content;
                return;
            }
        }
        project.opaque.push_back({rel_path, std::move(content)});
    }

    void parse_domain(const std::string& content, const std::string& file) {
        YAML::Node doc = load_document(content, file);
        if (!doc.IsMap()) malformed(file, 1, "domain file must be a mapping");
        take_opaque(file, content,
                    {"version", "intents", "entities", "slots", "responses", "actions", "session_config"});
        parse_domain_intents(doc["intents"], file);
        parse_entities(doc["entities"], file);
        parse_slots(doc["slots"], file);
        parse_responses(doc["responses"], file);
        parse_actions(doc["actions"], file);
        parse_session(doc["session_config"], file);
    }

    void parse_domain_intents(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsSequence()) malformed(file, node, "intents must be a sequence");
        for (const auto& item : node) {
            std::string name = scalar_of(item, file, "intent name");
            if (project.find_intent(name)) duplicate("intent", name, file);
            project.intents.push_back({name, {}});
        }
    }

    void parse_entities(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsSequence()) malformed(file, node, "entities must be a sequence");
        for (const auto& item : node) {
            Entity entity;
            if (item.IsScalar()) {
                entity.name = item.as<std::string>();
            } else if (item.IsMap() && item.size() == 1) {
                auto pair = *item.begin();
                entity.name = scalar_of(pair.first, file, "entity name");
                const YAML::Node& body = pair.second;
                if (body && !body.IsNull()) {
                    if (!body.IsMap()) malformed(file, body, "entity body must be a mapping");
                    for (const auto& kv : body) {
                        std::string key = scalar_of(kv.first, file, "entity key");
                        if (key != "values") malformed(file, kv.first, "unsupported entity key '" + key + "'");
                        parse_entity_values(kv.second, entity, file);
                    }
                }
            } else {
                malformed(file, item, "unsupported entity declaration");
            }
            if (project.find_entity(entity.name)) duplicate("entity", entity.name, file);
            project.entities.push_back(std::move(entity));
        }
    }

    void parse_entity_values(const YAML::Node& node, Entity& entity, const std::string& file) {
        if (!node.IsSequence()) malformed(file, node, "entity values must be a sequence");
        for (const auto& item : node) {
            EntityValue value;
            if (item.IsScalar()) {
                value.value = item.as<std::string>();
            } else if (item.IsMap()) {
                for (const auto& kv : item) {
                    std::string key = scalar_of(kv.first, file, "entity value key");
                    if (key == "value") {
                        value.value = scalar_of(kv.second, file, "entity value");
                    } else if (key == "synonyms") {
                        if (!kv.second.IsSequence()) malformed(file, kv.second, "synonyms must be a sequence");
                        for (const auto& syn : kv.second) {
                            value.synonyms.push_back(scalar_of(syn, file, "synonym"));
                        }
                    } else {
                        malformed(file, kv.first, "unsupported entity value key '" + key + "'");
                    }
                }
                if (value.value.empty()) malformed(file, item, "entity value entry lacks 'value'");
            } else {
                malformed(file, item, "unsupported entity value entry");
            }
            entity.values.push_back(std::move(value));
        }
    }

    void parse_slots(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsMap()) malformed(file, node, "slots must be a mapping");
        for (const auto& kv : node) {
            Slot slot;
            slot.name = scalar_of(kv.first, file, "slot name");
            if (project.find_slot(slot.name)) duplicate("slot", slot.name, file);
            const YAML::Node& body = kv.second;
            if (!body.IsMap()) malformed(file, body, "slot body must be a mapping");
            for (const auto& field : body) {
                std::string key = scalar_of(field.first, file, "slot key");
                if (key == "type") {
                    std::string type = scalar_of(field.second, file, "slot type");
                    if (type == "text") {
                        slot.kind = SlotKind::Text;
                    } else if (type == "categorical") {
                        slot.kind = SlotKind::Categorical;
                    } else if (type == "bool" || type == "boolean") {
                        slot.kind = SlotKind::Boolean;
                    } else {
                        malformed(file, field.second, "unsupported slot type '" + type + "'");
                    }
                } else if (key == "values") {
                    if (!field.second.IsSequence()) malformed(file, field.second, "slot values must be a sequence");
                    for (const auto& v : field.second) {
                        slot.allowed_values.push_back(scalar_of(v, file, "slot value"));
                    }
                } else if (key == "mappings") {
                    parse_slot_mappings(field.second, slot, file);
                } else {
                    malformed(file, field.first, "unsupported slot key '" + key + "'");
                }
            }
            project.slots.push_back(std::move(slot));
        }
    }

    void parse_slot_mappings(const YAML::Node& node, Slot& slot, const std::string& file) {
        if (!node.IsSequence()) malformed(file, node, "slot mappings must be a sequence");
        for (const auto& item : node) {
            if (!item.IsMap()) malformed(file, item, "slot mapping must be a mapping");
            std::string type;
            std::string entity;
            for (const auto& kv : item) {
                std::string key = scalar_of(kv.first, file, "mapping key");
                if (key == "type") {
                    type = scalar_of(kv.second, file, "mapping type");
                } else if (key == "entity") {
                    entity = scalar_of(kv.second, file, "mapping entity");
                } else {
                    malformed(file, kv.first, "unsupported mapping key '" + key + "'");
                }
            }
            if (type != "from_entity") malformed(file, item, "unsupported mapping type '" + type + "'");
            if (entity.empty()) malformed(file, item, "from_entity mapping lacks 'entity'");
            slot.mappings.push_back({entity});
        }
    }

    void parse_responses(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsMap()) malformed(file, node, "responses must be a mapping");
        for (const auto& kv : node) {
            ResponseTemplate response;
            response.name = scalar_of(kv.first, file, "response name");
            if (project.find_response(response.name)) duplicate("response", response.name, file);
            if (!kv.second.IsSequence()) malformed(file, kv.second, "response variants must be a sequence");
            for (const auto& item : kv.second) {
                if (item.IsScalar()) {
                    response.variants.push_back(item.as<std::string>());
                } else if (item.IsMap() && item["text"]) {
                    response.variants.push_back(scalar_of(item["text"], file, "response text"));
                } else {
                    malformed(file, item, "response variant lacks 'text'");
                }
            }
            project.responses.push_back(std::move(response));
        }
    }

    void parse_actions(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsSequence()) malformed(file, node, "actions must be a sequence");
        for (const auto& item : node) {
            ActionDef action;
            action.kind = ActionKind::Custom;
            if (item.IsScalar()) {
                action.name = item.as<std::string>();
            } else if (item.IsMap() && item.size() == 1) {
                auto pair = *item.begin();
                action.name = scalar_of(pair.first, file, "action name");
                const YAML::Node& body = pair.second;
                if (body && !body.IsNull()) {
                    if (!body.IsMap()) malformed(file, body, "action body must be a mapping");
                    for (const auto& kv : body) {
                        std::string key = scalar_of(kv.first, file, "action key");
                        if (key != "utters") malformed(file, kv.first, "unsupported action key '" + key + "'");
                        if (!kv.second.IsSequence()) malformed(file, kv.second, "utters must be a sequence");
                        for (const auto& uttered : kv.second) {
                            action.utters.push_back(scalar_of(uttered, file, "uttered response"));
                        }
                    }
                }
            } else {
                malformed(file, item, "unsupported action declaration");
            }
            if (project.find_action(action.name)) duplicate("action", action.name, file);
            project.actions.push_back(std::move(action));
        }
    }

    void parse_session(const YAML::Node& node, const std::string& file) {
        if (!node) return;
        if (!node.IsMap()) malformed(file, node, "session_config must be a mapping");
        for (const auto& kv : node) {
            std::string key = scalar_of(kv.first, file, "session key");
            if (key == "session_expiration_time") {
                double minutes = 0;
                try {
                    minutes = kv.second.as<double>();
                } catch (const YAML::Exception&) {
                    malformed(file, kv.second, "session_expiration_time must be a number");
                }
                if (minutes < 0) malformed(file, kv.second, "session_expiration_time must be non-negative");
                project.session.expiration_minutes = minutes;
            } else if (key == "carry_over_slots_to_new_session") {
                try {
                    project.session.carry_over_slots = kv.second.as<bool>();
                } catch (const YAML::Exception&) {
                    malformed(file, kv.second, "carry_over_slots_to_new_session must be a boolean");
                }
            } else {
                malformed(file, kv.first, "unsupported session key '" + key + "'");
            }
        }
    }

    void parse_nlu(const std::string& content, const std::string& file) {
        YAML::Node doc = load_document(content, file);
        if (doc.IsNull()) return;
        if (!doc.IsMap()) malformed(file, 1, "nlu file must be a mapping");
        take_opaque(file, content, {"version", "nlu"});
        const YAML::Node& nlu = doc["nlu"];
        if (!nlu) return;
        if (!nlu.IsSequence()) malformed(file, nlu, "nlu must be a sequence");
        for (const auto& item : nlu) {
            if (!item.IsMap() || !item["intent"]) malformed(file, item, "nlu item must declare an intent");
            std::string name = scalar_of(item["intent"], file, "intent name");
            if (!item["examples"]) malformed(file, item, "nlu intent '" + name + "' lacks examples");
            for (const auto& kv : item) {
                std::string key = scalar_of(kv.first, file, "nlu item key");
                if (key != "intent" && key != "examples") {
                    malformed(file, kv.first, "unsupported nlu item key '" + key + "'");
                }
            }
            if (!nlu_intents_seen.insert(name).second) duplicate("nlu block for intent", name, file);
            auto examples = parse_examples_block(scalar_of(item["examples"], file, "examples"), file,
                                                 node_line(item["examples"]));
            bool known = false;
            for (auto& intent : project.intents) {
                if (intent.name == name) {
                    intent.examples = examples;
                    known = true;
                    break;
                }
            }
            if (!known) project.intents.push_back({name, std::move(examples)});
        }
    }

    void parse_flows(const std::string& content, const std::string& file, FlowKind kind) {
        YAML::Node doc = load_document(content, file);
        if (doc.IsNull()) return;
        if (!doc.IsMap()) malformed(file, 1, "flow file must be a mapping");
        const std::string collection = kind == FlowKind::Rule ? "rules" : "stories";
        const std::string item_key = kind == FlowKind::Rule ? "rule" : "story";
        take_opaque(file, content, {"version", collection});
        const YAML::Node& flows = doc[collection];
        if (!flows) return;
        if (!flows.IsSequence()) malformed(file, flows, collection + " must be a sequence");
        for (const auto& item : flows) {
            if (!item.IsMap() || !item[item_key]) malformed(file, item, collection + " item must declare a " + item_key);
            Flow flow;
            flow.kind = kind;
            flow.name = scalar_of(item[item_key], file, item_key + " name");
            if (project.find_flow(kind, flow.name)) duplicate(item_key, flow.name, file);
            for (const auto& kv : item) {
                std::string key = scalar_of(kv.first, file, "flow key");
                if (key != item_key && key != "steps") {
                    malformed(file, kv.first, "unsupported " + item_key + " key '" + key + "'");
                }
            }
            if (item["steps"]) {
                if (!item["steps"].IsSequence()) malformed(file, item["steps"], "steps must be a sequence");
                for (const auto& step : item["steps"]) {
                    flow.steps.push_back(parse_step(step, file));
                }
            }
            project.flows.push_back(std::move(flow));
        }
    }

    FlowStep parse_step(const YAML::Node& node, const std::string& file) {
        if (!node.IsMap()) malformed(file, node, "flow step must be a mapping");
        if (node["intent"]) {
            FlowStep step = FlowStep::intent(scalar_of(node["intent"], file, "step intent"));
            for (const auto& kv : node) {
                std::string key = scalar_of(kv.first, file, "step key");
                if (key == "intent") continue;
                if (key != "entities") malformed(file, kv.first, "unsupported step key '" + key + "'");
                if (!kv.second.IsSequence()) malformed(file, kv.second, "step entities must be a sequence");
                for (const auto& binding : kv.second) {
                    if (binding.IsScalar()) {
                        step.bindings.push_back({binding.as<std::string>(), ""});
                    } else if (binding.IsMap() && binding.size() == 1) {
                        auto pair = *binding.begin();
                        step.bindings.push_back({scalar_of(pair.first, file, "binding entity"),
                                                 scalar_of(pair.second, file, "binding value")});
                    } else {
                        malformed(file, binding, "unsupported entity binding");
                    }
                }
            }
            return step;
        }
        if (node["action"]) {
            if (node.size() != 1) malformed(file, node, "action step takes no other keys");
            return FlowStep::action(scalar_of(node["action"], file, "step action"));
        }
        malformed(file, node, "flow step must be 'intent:' or 'action:'");
    }

    ChatbotProject run() {
        namespace fs = std::filesystem;
        fs::path domain_path = layout.root / layout.domain_file;
        if (!fs::exists(domain_path)) {
            throw Error(Errc::MissingDomainFile, domain_path.string());
        }
        parse_domain(detail::read_file(domain_path), layout.domain_file);
        for (const auto& rel : layout.nlu_files) {
            fs::path path = layout.root / rel;
            if (fs::exists(path)) parse_nlu(detail::read_file(path), rel);
        }
        for (const auto& rel : layout.rules_files) {
            fs::path path = layout.root / rel;
            if (fs::exists(path)) parse_flows(detail::read_file(path), rel, FlowKind::Rule);
        }
        for (const auto& rel : layout.stories_files) {
            fs::path path = layout.root / rel;
            if (fs::exists(path)) parse_flows(detail::read_file(path), rel, FlowKind::Story);
        }
        fs::path config_path = layout.root / layout.config_file;
        if (fs::exists(config_path)) {
            add_opaque(layout.config_file, detail::read_file(config_path));
        }
        return std::move(project);
    }
};

}  // namespace

ChatbotProject parse_project(const ProjectLayout& layout) {
    Parser parser{layout, {}, {}};
    return parser.run();
}

ChatbotProject parse_project(const std::filesystem::path& root) {
    return parse_project(ProjectLayout::at(root));
}

}  // namespace botmut::rasa
