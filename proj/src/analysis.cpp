#include "botmut/analysis.hpp"

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include "botmut/error.hpp"
#include "botmut/rasa.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace botmut {

namespace {

using nlohmann::json;

// Outcome of one external or builtin suite execution.
struct RunOutcome {
    bool all_pass = false;
    bool deploy_failed = false;            // external exit code >= 2
    std::vector<std::string> failing;      // script names when known
    std::string detail;
};

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out.push_back(c);
        }
    }
    out += "'";
    return out;
}

std::string substitute(const std::string& tmpl, const std::string& key, const std::string& value) {
    std::string out = tmpl;
    size_t pos = 0;
    while ((pos = out.find(key, pos)) != std::string::npos) {
        out.replace(pos, key.size(), value);
        pos += value.size();
    }
    return out;
}

RunOutcome run_external(const Runner& runner, const std::filesystem::path& project_dir,
                        const std::filesystem::path& suite_dir) {
    namespace fs = std::filesystem;
    std::string command = runner.command;
    bool wants_results = command.find("{results}") != std::string::npos;
    fs::path results_file;
    if (wants_results) {
        results_file = fs::temp_directory_path() /
                       ("botmut_results_" + detail::hex64(detail::fnv1a(project_dir.string())) + "_" +
                        std::to_string(::getpid()) + "_" +
                        std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + ".json");
        std::error_code ec;
        fs::remove(results_file, ec);
        command = substitute(command, "{results}", shell_quote(results_file.string()));
    }
    command = substitute(command, "{dir}", shell_quote(project_dir.string()));
    command = substitute(command, "{suite}", shell_quote(suite_dir.string()));

    int status = std::system(command.c_str());
    if (status == -1) {
        throw Error(Errc::RunnerFailure, "could not spawn external runner: " + command);
    }
    int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128;
    if (exit_code == 126 || exit_code == 127) {
        throw Error(Errc::RunnerFailure,
                    "external runner could not execute (exit " + std::to_string(exit_code) + "): " + command);
    }

    RunOutcome outcome;
    outcome.all_pass = exit_code == 0;
    outcome.deploy_failed = exit_code >= 2;
    outcome.detail = "external runner exit code " + std::to_string(exit_code);
    if (wants_results && fs::exists(results_file)) {
        try {
            json doc = json::parse(detail::read_file(results_file));
            for (const auto& [name, verdict] : doc.at("scripts").items()) {
                if (verdict.get<std::string>() != "pass") outcome.failing.push_back(name);
            }
            std::sort(outcome.failing.begin(), outcome.failing.end());
        } catch (...) {
            // a malformed result file degrades to exit-code-only verdicts
        }
        std::error_code ec;
        fs::remove(results_file, ec);
    }
    return outcome;
}

RunOutcome run_builtin(const ChatbotProject& project, const std::vector<ConversationScript>& suite,
                       int repeat) {
    SuiteResult result = run_suite(project, suite, repeat);
    RunOutcome outcome;
    outcome.all_pass = result.all_pass();
    outcome.failing = result.failing_scripts();
    if (!outcome.failing.empty()) {
        const ScriptRuns* first = nullptr;
        for (const auto& script : result.scripts) {
            if (!script.passed()) {
                first = &script;
                break;
            }
        }
        if (first) {
            const TestResult* failure = first->first_failure();
            outcome.detail = first->script + ": " + botmut::to_string(failure->verdict) + " at step " +
                             std::to_string(failure->step_index) + " (" + failure->reason + ")";
        }
    }
    return outcome;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += sep;
        out += item;
    }
    return out;
}

using detail::parallel_for;

}  // namespace

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Broken: return "broken";
        case Verdict::Killed: return "killed";
        case Verdict::Equivalent: return "equivalent";
        case Verdict::Survived: return "survived";
    }
    return "unknown";
}

int score(const MutationCounts& counts) {
    int denominator = counts.generated - counts.broken - counts.equivalent;
    if (denominator <= 0) {
        throw Error(Errc::UndefinedScore, "no killable mutants (G - B - E = " +
                                              std::to_string(denominator) + ")");
    }
    return static_cast<int>(std::llround(100.0 * counts.killed / denominator));
}

MutationCounts MutationReport::counts_for(const std::string& category) const {
    MutationCounts counts;
    for (const auto& mutant : mutants) {
        if (mutant.entry.category != category) continue;
        ++counts.generated;
        switch (mutant.verdict) {
            case Verdict::Broken: ++counts.broken; break;
            case Verdict::Killed: ++counts.killed; break;
            case Verdict::Equivalent: ++counts.equivalent; break;
            case Verdict::Survived: break;
        }
    }
    return counts;
}

MutationCounts MutationReport::counts_total() const {
    MutationCounts counts;
    for (const auto& category : {"ChatbotStructure", "Flow"}) {
        MutationCounts c = counts_for(category);
        counts.generated += c.generated;
        counts.broken += c.broken;
        counts.killed += c.killed;
        counts.equivalent += c.equivalent;
    }
    return counts;
}

MutantVerdict classify_mutant(const ChatbotProject& original, const std::filesystem::path& mutant_dir,
                              const std::vector<ConversationScript>& suite,
                              const std::filesystem::path& suite_dir, const AnalyzeOptions& options) {
    MutantVerdict verdict;
    ChatbotProject mutant = rasa::parse_project(mutant_dir);

    ValidationReport validation = validate(mutant);
    if (!validation.deployable()) {
        std::vector<std::string> codes;
        for (const auto& issue : validation.broken()) codes.push_back(issue.code + " (" + issue.location + ")");
        verdict.verdict = Verdict::Broken;
        verdict.evidence = join(codes, "; ");
        return verdict;
    }

    std::string id = mutant_dir.filename().string();
    if (std::find(options.mark_equivalent.begin(), options.mark_equivalent.end(), id) !=
        options.mark_equivalent.end()) {
        verdict.verdict = Verdict::Equivalent;
        verdict.evidence = "user override";
        return verdict;
    }

    EquivalenceResult equivalence = bounded_equivalence(original, mutant, options.equivalence_depth);
    if (equivalence.equivalent) {
        verdict.verdict = Verdict::Equivalent;
        verdict.evidence = "equivalent (bounded, depth " + std::to_string(options.equivalence_depth) + ")";
        return verdict;
    }
    verdict.witness = equivalence.witness;

    RunOutcome outcome = options.runner.is_builtin()
                             ? run_builtin(mutant, suite, options.repeat)
                             : run_external(options.runner, mutant_dir, suite_dir);
    if (outcome.deploy_failed) {
        verdict.verdict = Verdict::Broken;
        verdict.evidence = outcome.detail;
        return verdict;
    }
    if (!outcome.all_pass) {
        verdict.verdict = Verdict::Killed;
        verdict.evidence = outcome.failing.empty()
                               ? outcome.detail
                               : "failing scripts: " + join(outcome.failing, ", ") +
                                     (outcome.detail.empty() ? "" : " — " + outcome.detail);
        return verdict;
    }
    verdict.verdict = Verdict::Survived;
    verdict.evidence = "suite passed; not equivalent (witness: " +
                       (equivalence.witness ? to_string(*equivalence.witness) : "none") + ")";
    return verdict;
}

MutationReport analyze_all(const std::filesystem::path& project_dir,
                           const std::filesystem::path& mutants_dir,
                           const std::filesystem::path& suite_dir, const AnalyzeOptions& options) {
    namespace fs = std::filesystem;
    MutantManifest manifest = read_manifest(mutants_dir / "mutants.json");
    ChatbotProject original = rasa::parse_project(project_dir);
    std::vector<ConversationScript> suite = load_suite(suite_dir);

    // Baseline must be green before any mutant is judged.
    fs::path effective_suite_dir = suite_dir;
    RunOutcome baseline = options.runner.is_builtin() ? run_builtin(original, suite, options.repeat)
                                                      : run_external(options.runner, project_dir, suite_dir);
    if (!baseline.all_pass) {
        if (baseline.deploy_failed) {
            throw Error(Errc::RunnerFailure, "original project failed to deploy: " + baseline.detail);
        }
        if (!options.drop_flaky || baseline.failing.empty()) {
            std::string names = baseline.failing.empty() ? baseline.detail : join(baseline.failing, ", ");
            throw Error(Errc::BaselineRed,
                        "original project fails the suite (" + names + "); fix the scripts or pass --drop-flaky");
        }
        // Drop the offending scripts and re-establish the baseline.
        std::set<std::string> dropped(baseline.failing.begin(), baseline.failing.end());
        std::vector<ConversationScript> kept;
        for (auto& script : suite) {
            if (!dropped.count(script.name)) kept.push_back(std::move(script));
        }
        suite = std::move(kept);
        if (suite.empty()) {
            throw Error(Errc::BaselineRed, "every script fails on the original project");
        }
        if (!options.runner.is_builtin()) {
            effective_suite_dir = fs::temp_directory_path() /
                                  ("botmut_suite_" + detail::hex64(detail::fnv1a(suite_dir.string())) + "_" +
                                   std::to_string(::getpid()));
            std::error_code ec;
            fs::remove_all(effective_suite_dir, ec);
            fs::create_directories(effective_suite_dir, ec);
            for (const auto& entry : fs::directory_iterator(suite_dir)) {
                if (!entry.is_regular_file()) continue;
                std::string name = entry.path().filename().string();
                if (name.ends_with(".convo.txt") && !dropped.count(name)) {
                    fs::copy_file(entry.path(), effective_suite_dir / name,
                                  fs::copy_options::overwrite_existing);
                }
            }
            RunOutcome retry = run_external(options.runner, project_dir, effective_suite_dir);
            if (!retry.all_pass) {
                throw Error(Errc::BaselineRed, "baseline still red after dropping flaky scripts");
            }
        }
    }

    std::vector<MutantVerdict> verdicts(manifest.entries.size());
    unsigned jobs = options.runner.is_builtin() ? options.jobs : std::max(1u, options.external_jobs);
    try {
        parallel_for(manifest.entries.size(), jobs, [&](size_t i) {
            verdicts[i] = classify_mutant(original, mutants_dir / manifest.entries[i].dir, suite,
                                          effective_suite_dir, options);
        });
    } catch (...) {
        if (effective_suite_dir != suite_dir) {
            std::error_code ec;
            fs::remove_all(effective_suite_dir, ec);
        }
        throw;
    }
    if (effective_suite_dir != suite_dir) {
        std::error_code ec;
        fs::remove_all(effective_suite_dir, ec);
    }

    MutationReport report = build_report(manifest, verdicts);
    report.project = project_dir.string();
    report.suite = suite_dir.string();
    report.runner = options.runner.is_builtin() ? "builtin" : options.runner.command;
    return report;
}

MutationReport build_report(const MutantManifest& manifest, const std::vector<MutantVerdict>& verdicts) {
    if (verdicts.size() != manifest.entries.size()) {
        throw Error(Errc::MissingVerdict,
                    std::to_string(manifest.entries.size()) + " manifest entries but " +
                        std::to_string(verdicts.size()) + " verdicts");
    }
    MutationReport report;
    report.original_hash = manifest.original_hash;
    for (size_t i = 0; i < manifest.entries.size(); ++i) {
        report.mutants.push_back(MutantReport{manifest.entries[i], verdicts[i].verdict, verdicts[i].evidence});
    }
    return report;
}

void write_report(const MutationReport& report, const std::filesystem::path& file) {
    json doc;
    doc["project"] = report.project;
    doc["original_hash"] = report.original_hash;
    doc["suite"] = report.suite;
    doc["runner"] = report.runner;
    json counts = json::object();
    auto fill = [&](const std::string& key, const MutationCounts& c) {
        json cell = {{"B", c.broken}, {"K", c.killed}, {"E", c.equivalent},
                     {"G", c.generated}, {"S", c.survived()}};
        int denominator = c.generated - c.broken - c.equivalent;
        if (denominator > 0) {
            cell["score"] = score(c);
        } else {
            cell["score"] = nullptr;
        }
        counts[key] = cell;
    };
    fill("ChatbotStructure", report.counts_for("ChatbotStructure"));
    fill("Flow", report.counts_for("Flow"));
    fill("Total", report.counts_total());
    doc["counts"] = counts;
    doc["mutants"] = json::array();
    for (const auto& mutant : report.mutants) {
        doc["mutants"].push_back({
            {"id", mutant.entry.id},
            {"operator", mutant.entry.op},
            {"category", mutant.entry.category},
            {"site", mutant.entry.site},
            {"changed", mutant.entry.changed},
            {"dir", mutant.entry.dir},
            {"verdict", to_string(mutant.verdict)},
            {"evidence", mutant.evidence},
        });
    }
    detail::write_file(file, doc.dump(2) + "\n");
}

MutationReport read_report(const std::filesystem::path& file) {
    json doc;
    try {
        doc = json::parse(detail::read_file(file));
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedDocument, file.string() + ": " + e.what());
    }
    MutationReport report;
    try {
        report.project = doc.at("project").get<std::string>();
        report.original_hash = doc.at("original_hash").get<std::string>();
        report.suite = doc.at("suite").get<std::string>();
        report.runner = doc.at("runner").get<std::string>();
        for (const auto& item : doc.at("mutants")) {
            MutantReport mutant;
            mutant.entry.id = item.at("id").get<std::string>();
            mutant.entry.op = item.at("operator").get<std::string>();
            mutant.entry.category = item.at("category").get<std::string>();
            mutant.entry.site = item.at("site").get<std::string>();
            mutant.entry.changed = item.at("changed").get<std::vector<std::string>>();
            mutant.entry.dir = item.at("dir").get<std::string>();
            std::string verdict = item.at("verdict").get<std::string>();
            if (verdict == "broken") {
                mutant.verdict = Verdict::Broken;
            } else if (verdict == "killed") {
                mutant.verdict = Verdict::Killed;
            } else if (verdict == "equivalent") {
                mutant.verdict = Verdict::Equivalent;
            } else {
                mutant.verdict = Verdict::Survived;
            }
            mutant.evidence = item.value("evidence", "");
            report.mutants.push_back(std::move(mutant));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedDocument, file.string() + ": " + e.what());
    }
    return report;
}

}  // namespace botmut
