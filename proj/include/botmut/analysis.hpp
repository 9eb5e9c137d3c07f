#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "botmut/model.hpp"
#include "botmut/mutgen.hpp"
#include "botmut/script.hpp"
#include "botmut/simulator.hpp"

namespace botmut {

struct Conversation {
    struct Turn {
        double pause_minutes = 0;  // virtual idle time before the utterance
        std::string utterance;

        bool operator==(const Turn&) const = default;
    };
    std::vector<Turn> turns;

    bool operator==(const Conversation&) const = default;
};

std::string to_string(const Conversation& conversation);

// Observable behavior of one conversation: per turn, the matched intent,
// executed actions, and rendered responses.
std::vector<StepOutcome> replay_conversation(const ChatbotProject& project,
                                             const Conversation& conversation);

struct EquivalenceResult {
    bool equivalent = false;
    std::optional<Conversation> witness;  // a distinguishing conversation when not equivalent
    std::string divergence;
};

// Brute-force bounded behavioral equivalence: true iff every conversation
// of length <= depth over the finite input alphabet (every training phrase
// of `original` under every declared entity value/synonym substitution,
// plus one out-of-vocabulary probe), interleaved with pauses around both
// projects' expiration times, produces identical behavior on both
// projects. Reflexive and symmetric at any fixed depth.
EquivalenceResult bounded_equivalence(const ChatbotProject& original, const ChatbotProject& mutant,
                                      int depth);

enum class Verdict { Broken, Killed, Equivalent, Survived };

std::string to_string(Verdict verdict);

struct MutantVerdict {
    Verdict verdict = Verdict::Survived;
    std::string evidence;
    std::optional<Conversation> witness;  // from the equivalence check, when one exists
};

// builtin = simulator-backed; external = command template executed per
// mutant directory with placeholders {dir}, {suite}, and optionally
// {results}. Exit code 0 = all tests pass, 1 = at least one failure,
// anything else = the bot could not be deployed (mapped to Broken);
// 126/127 or a spawn failure raise RunnerFailure.
struct Runner {
    std::string command;  // empty = builtin

    bool is_builtin() const { return command.empty(); }
};

struct AnalyzeOptions {
    Runner runner;
    int repeat = 5;
    int equivalence_depth = 3;
    unsigned jobs = 0;           // 0 = hardware concurrency (builtin runner)
    unsigned external_jobs = 1;  // parallelism cap for external runners
    bool drop_flaky = false;     // drop baseline-failing scripts instead of aborting
    std::vector<std::string> mark_equivalent;  // explicit user override, by mutant id
};

struct MutationCounts {
    int generated = 0;
    int broken = 0;
    int killed = 0;
    int equivalent = 0;

    int survived() const { return generated - broken - killed - equivalent; }
    bool operator==(const MutationCounts&) const = default;
};

// round(100 * K / (G - B - E)), half away from zero. Throws UndefinedScore
// when no killable mutants remain.
int score(const MutationCounts& counts);

struct MutantReport {
    ManifestEntry entry;
    Verdict verdict = Verdict::Survived;
    std::string evidence;
};

struct MutationReport {
    std::string project;
    std::string original_hash;
    std::string suite;
    std::string runner;  // "builtin" or the command template
    std::vector<MutantReport> mutants;

    MutationCounts counts_for(const std::string& category) const;
    MutationCounts counts_total() const;
};

// Order of judgment: statically broken, then bounded-equivalent, then
// killed by the suite, otherwise survived. The caller guarantees the
// baseline is green.
MutantVerdict classify_mutant(const ChatbotProject& original, const std::filesystem::path& mutant_dir,
                              const std::vector<ConversationScript>& suite,
                              const std::filesystem::path& suite_dir, const AnalyzeOptions& options);

// Assembles per-mutant detail and the count rows from one verdict per
// manifest entry, in manifest order. Throws MissingVerdict when a verdict
// is absent.
MutationReport build_report(const MutantManifest& manifest,
                            const std::vector<MutantVerdict>& verdicts);

// Full run: baseline check (BaselineRed lists the offending scripts unless
// drop_flaky excludes them), then classification of every manifest entry.
// Deterministic regardless of --jobs.
MutationReport analyze_all(const std::filesystem::path& project_dir,
                           const std::filesystem::path& mutants_dir,
                           const std::filesystem::path& suite_dir, const AnalyzeOptions& options);

void write_report(const MutationReport& report, const std::filesystem::path& file);
MutationReport read_report(const std::filesystem::path& file);

// Text table with B / K / E / G / %K columns per operator category and in
// total; the score prints as "n/a" when undefined.
std::string render_table(const MutationReport& report);

}  // namespace botmut
