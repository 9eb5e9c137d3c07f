#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "botmut/analysis.hpp"
#include "botmut/error.hpp"
#include "botmut/mutgen.hpp"
#include "botmut/rasa.hpp"
#include "botmut/script.hpp"
#include "botmut/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBroken = 2;
constexpr int kExitBaselineRed = 3;
constexpr int kExitRunnerFailure = 4;

int exit_code_for(const botmut::Error& error) {
    switch (error.code()) {
        case botmut::Errc::BaselineRed: return kExitBaselineRed;
        case botmut::Errc::RunnerFailure: return kExitRunnerFailure;
        default: return kExitUsage;
    }
}

unsigned jobs_from_env() {
    const char* env = std::getenv("BOTMUT_JOBS");
    if (!env) return 0;
    long value = std::strtol(env, nullptr, 10);
    return value > 0 ? static_cast<unsigned>(value) : 0;
}

int cmd_validate(const std::string& dir) {
    botmut::ChatbotProject project = botmut::rasa::parse_project(dir);
    botmut::ValidationReport report = botmut::validate(project);
    for (const auto& issue : report.issues) {
        std::cout << (issue.severity == botmut::Severity::Broken ? "broken " : "warning") << "  "
                  << issue.code << "  " << issue.message << "  [" << issue.location << "]\n";
    }
    if (report.issues.empty()) {
        std::cout << "no issues found\n";
    }
    return report.deployable() ? kExitOk : kExitBroken;
}

int cmd_mutate(const std::string& dir, const std::string& out, const std::vector<std::string>& operators,
               unsigned jobs) {
    botmut::GenerateOptions options;
    options.jobs = jobs;
    if (!operators.empty()) {
        options.operators.clear();
        for (const auto& name : operators) {
            auto op = botmut::operator_from_name(name);
            if (!op) {
                std::cerr << "unknown operator '" << name << "'\n";
                return kExitUsage;
            }
            options.operators.push_back(*op);
        }
    }
    botmut::MutantManifest manifest = botmut::generate_mutants(dir, out, options);
    std::cout << manifest.entries.size() << " mutants generated\n";
    return kExitOk;
}

int cmd_test(const std::string& dir, const std::string& suite_dir, int repeat) {
    botmut::ChatbotProject project = botmut::rasa::parse_project(dir);
    auto suite = botmut::load_suite(suite_dir);
    botmut::SuiteResult result = botmut::run_suite(project, suite, repeat);
    for (const auto& script : result.scripts) {
        if (script.passed()) {
            std::cout << "pass     " << script.script << "\n";
        } else {
            const botmut::TestResult* failure = script.first_failure();
            std::cout << botmut::to_string(failure->verdict) << "  " << script.script << "  step "
                      << failure->step_index << ": " << failure->reason << "\n";
        }
    }
    std::cout << result.scripts.size() << " scripts, "
              << result.failing_scripts().size() << " failing\n";
    return result.all_pass() ? kExitOk : kExitBroken;
}

int cmd_analyze(const std::string& dir, const std::string& mutants, const std::string& suite,
                const std::string& runner_spec, int repeat, int depth, unsigned jobs,
                unsigned external_jobs, bool drop_flaky, const std::vector<std::string>& mark_equivalent,
                std::string report_path) {
    botmut::AnalyzeOptions options;
    options.repeat = repeat;
    options.equivalence_depth = depth;
    options.jobs = jobs;
    options.external_jobs = external_jobs;
    options.drop_flaky = drop_flaky;
    options.mark_equivalent = mark_equivalent;
    if (runner_spec == "builtin") {
        options.runner.command.clear();
    } else if (runner_spec.rfind("exec:", 0) == 0) {
        options.runner.command = runner_spec.substr(5);
        if (options.runner.command.empty()) {
            std::cerr << "empty external runner command\n";
            return kExitUsage;
        }
    } else {
        std::cerr << "unknown runner '" << runner_spec << "' (use builtin or exec:<command>)\n";
        return kExitUsage;
    }

    botmut::MutationReport report = botmut::analyze_all(dir, mutants, suite, options);
    if (report_path.empty()) report_path = (std::filesystem::path(mutants) / "report.json").string();
    botmut::write_report(report, report_path);

    for (const auto& mutant : report.mutants) {
        std::cout << botmut::to_string(mutant.verdict) << "  " << mutant.entry.id << "\n";
    }
    std::cout << "report written to " << report_path << "\n";
    return kExitOk;
}

int cmd_report(const std::string& file, const std::string& format) {
    botmut::MutationReport report = botmut::read_report(file);
    if (format == "json") {
        std::ifstream in(file, std::ios::binary);
        std::cout << in.rdbuf();
    } else {
        std::cout << botmut::render_table(report);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mutation testing for task-based chatbots"};
    app.require_subcommand(1);

    std::string project_dir, out_dir, suite_dir, mutants_dir, report_file;
    std::vector<std::string> operators, mark_equivalent;
    std::string runner_spec = "builtin";
    std::string format = "table";
    int repeat = 5;
    int depth = 3;
    unsigned jobs = jobs_from_env();
    unsigned external_jobs = 1;
    bool drop_flaky = false;

    auto* validate_cmd = app.add_subcommand("validate", "statically validate a chatbot project");
    validate_cmd->add_option("dir", project_dir, "project directory")->required();

    auto* mutate_cmd = app.add_subcommand("mutate", "generate all mutants of a project");
    mutate_cmd->add_option("dir", project_dir, "project directory")->required();
    mutate_cmd->add_option("-o,--out", out_dir, "output directory")->required();
    mutate_cmd->add_option("--operators", operators, "comma-separated operator subset")->delimiter(',');
    mutate_cmd->add_option("--jobs", jobs, "worker threads");

    auto* test_cmd = app.add_subcommand("test", "run a conversation suite against a project");
    test_cmd->add_option("dir", project_dir, "project directory")->required();
    test_cmd->add_option("--suite", suite_dir, "directory of *.convo.txt scripts")->required();
    test_cmd->add_option("--repeat", repeat, "repetitions per script");

    auto* analyze_cmd = app.add_subcommand("analyze", "classify every mutant against a suite");
    analyze_cmd->add_option("dir", project_dir, "original project directory")->required();
    analyze_cmd->add_option("--mutants", mutants_dir, "mutant output directory (with mutants.json)")->required();
    analyze_cmd->add_option("--suite", suite_dir, "directory of *.convo.txt scripts")->required();
    analyze_cmd->add_option("--runner", runner_spec, "builtin or exec:<command template>");
    analyze_cmd->add_option("--repeat", repeat, "repetitions per script");
    analyze_cmd->add_option("--equivalence-depth", depth, "bounded equivalence depth");
    analyze_cmd->add_option("--jobs", jobs, "worker threads (builtin runner)");
    analyze_cmd->add_option("--external-jobs", external_jobs, "parallelism cap for external runners");
    analyze_cmd->add_flag("--drop-flaky", drop_flaky, "drop baseline-failing scripts instead of aborting");
    analyze_cmd->add_option("--mark-equivalent", mark_equivalent, "mutant ids to force-classify as equivalent")
        ->delimiter(',');
    analyze_cmd->add_option("--report", report_file, "report path (default <mutants>/report.json)");

    auto* report_cmd = app.add_subcommand("report", "print a report as a table or json");
    report_cmd->add_option("file", report_file, "report.json path")->required();
    report_cmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validate_cmd) return cmd_validate(project_dir);
        if (*mutate_cmd) return cmd_mutate(project_dir, out_dir, operators, jobs);
        if (*test_cmd) {
            if (repeat < 1) {
                std::cerr << "--repeat must be >= 1\n";
                return kExitUsage;
            }
            return cmd_test(project_dir, suite_dir, repeat);
        }
        if (*analyze_cmd) {
            if (repeat < 1 || depth < 1) {
                std::cerr << "--repeat and --equivalence-depth must be >= 1\n";
                return kExitUsage;
            }
            return cmd_analyze(project_dir, mutants_dir, suite_dir, runner_spec, repeat, depth, jobs,
                               external_jobs, drop_flaky, mark_equivalent, report_file);
        }
        if (*report_cmd) return cmd_report(report_file, format);
    } catch (const botmut::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
