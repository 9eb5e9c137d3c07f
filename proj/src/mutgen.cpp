#include "botmut/mutgen.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "botmut/error.hpp"
#include "botmut/rasa.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace botmut {

namespace {

using detail::parallel_for;
using nlohmann::json;

}  // namespace

MutantManifest generate_mutants(const std::filesystem::path& project_dir,
                                const std::filesystem::path& out_dir, const GenerateOptions& options) {
    ChatbotProject original = rasa::parse_project(project_dir);

    MutantManifest manifest;
    manifest.original_hash = rasa::fingerprint(original);

    struct Job {
        OperatorId op;
        size_t site_index;
        MutationSite site;
    };
    // manifest order is fixed by (operator enum order, site order), not by
    // the order the operator set was given in
    std::vector<Job> jobs;
    for (OperatorId op : kAllOperators) {
        if (std::find(options.operators.begin(), options.operators.end(), op) == options.operators.end()) {
            continue;
        }
        auto sites = enumerate_sites(original, op);
        for (size_t i = 0; i < sites.size(); ++i) jobs.push_back({op, i, sites[i]});
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);

    std::vector<ManifestEntry> entries(jobs.size());
    parallel_for(jobs.size(), options.jobs, [&](size_t i) {
        const Job& job = jobs[i];
        ChatbotProject mutant = apply(original, job.site);
        std::string hash = rasa::fingerprint(mutant);
        std::string id = std::string(operator_name(job.op)) + "_" + std::to_string(job.site_index) + "_" +
                         hash.substr(0, 8);
        rasa::write_project(mutant, out_dir / id);

        std::set<std::string> roles;
        for (const auto& entry : rasa::diff_projects(original, mutant)) roles.insert(entry.file_role);

        ManifestEntry& entry = entries[i];
        entry.id = id;
        entry.op = std::string(operator_name(job.op));
        entry.category = std::string(category_name(category(job.op)));
        entry.site = job.site.description;
        entry.changed.assign(roles.begin(), roles.end());
        entry.dir = id;
    });

    manifest.entries = std::move(entries);
    write_manifest(manifest, out_dir / "mutants.json");
    return manifest;
}

void write_manifest(const MutantManifest& manifest, const std::filesystem::path& file) {
    json doc;
    doc["original_hash"] = manifest.original_hash;
    doc["mutants"] = json::array();
    for (const auto& entry : manifest.entries) {
        doc["mutants"].push_back({
            {"id", entry.id},
            {"operator", entry.op},
            {"category", entry.category},
            {"site", entry.site},
            {"changed", entry.changed},
            {"dir", entry.dir},
        });
    }
    detail::write_file(file, doc.dump(2) + "\n");
}

MutantManifest read_manifest(const std::filesystem::path& file) {
    json doc;
    try {
        doc = json::parse(detail::read_file(file));
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedDocument, file.string() + ": " + e.what());
    }
    MutantManifest manifest;
    try {
        manifest.original_hash = doc.at("original_hash").get<std::string>();
        for (const auto& item : doc.at("mutants")) {
            ManifestEntry entry;
            entry.id = item.at("id").get<std::string>();
            entry.op = item.at("operator").get<std::string>();
            entry.category = item.at("category").get<std::string>();
            entry.site = item.at("site").get<std::string>();
            entry.changed = item.at("changed").get<std::vector<std::string>>();
            entry.dir = item.at("dir").get<std::string>();
            manifest.entries.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedDocument, file.string() + ": " + e.what());
    }
    return manifest;
}

}  // namespace botmut
