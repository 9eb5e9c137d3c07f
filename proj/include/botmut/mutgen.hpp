#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "botmut/operators.hpp"

namespace botmut {

struct ManifestEntry {
    std::string id;        // <operator>_<site-index>_<hash8>
    std::string op;        // operator identifier
    std::string category;  // ChatbotStructure | Flow
    std::string site;      // site description
    std::vector<std::string> changed;  // changed file roles
    std::string dir;       // mutant directory, relative to the manifest

    bool operator==(const ManifestEntry&) const = default;
};

struct MutantManifest {
    std::string original_hash;
    std::vector<ManifestEntry> entries;
};

struct GenerateOptions {
    std::vector<OperatorId> operators{kAllOperators.begin(), kAllOperators.end()};
    unsigned jobs = 0;  // 0 = hardware concurrency
};

// Applies every enumerated site of every selected operator, writes each
// mutant as a full project under out_dir/<mutant-id>/, and writes
// out_dir/mutants.json. Entry order is (operator order, site order)
// regardless of scheduling; regeneration from identical inputs is
// byte-identical. An empty operator set yields an empty manifest.
MutantManifest generate_mutants(const std::filesystem::path& project_dir,
                                const std::filesystem::path& out_dir,
                                const GenerateOptions& options = {});

void write_manifest(const MutantManifest& manifest, const std::filesystem::path& file);
MutantManifest read_manifest(const std::filesystem::path& file);

}  // namespace botmut
