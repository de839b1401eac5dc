#ifndef CHEMFLOW_MANIFEST_HPP
#define CHEMFLOW_MANIFEST_HPP

#include <string>
#include <vector>

#include "chemflow/config.hpp"

namespace chemflow {

// Record of one run directory: what produced it, with what inputs, and the
// complete list of emitted files.
struct RunManifest {
    std::string code_version;
    std::string config_hash;
    std::string model;
    RunConfig config;
    double wall_clock_seconds = 0.0;
    int exit_status = 0;
    std::vector<std::string> artifacts; // paths relative to the run directory
};

std::string manifest_json_text(const RunManifest& m);
void write_manifest(const std::string& path, const RunManifest& m);

} // namespace chemflow

#endif
