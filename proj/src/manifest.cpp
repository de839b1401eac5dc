#include "chemflow/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "chemflow/errors.hpp"

namespace chemflow {

std::string manifest_json_text(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["code_version"] = m.code_version;
    j["config_hash"] = m.config_hash;
    j["model"] = m.model;
    j["grid"] = {{"dim", m.config.grid.dim},
                 {"sizes", m.config.grid.sizes},
                 {"extents", m.config.grid.extents}};
    j["params"] = {{"d", m.config.params.d},
                   {"epsilon", m.config.params.epsilon},
                   {"p_infinity", m.config.params.p_infinity},
                   {"chi", m.config.params.chi},
                   {"alpha", m.config.params.alpha}};
    j["init"] = {{"seed", m.config.init.seed},
                 {"amplitude", m.config.init.amplitude},
                 {"band_limit", m.config.init.band_limit}};
    j["schedule"] = {{"dt", m.config.schedule.dt},
                     {"t_end", m.config.schedule.t_end},
                     {"stride", m.config.schedule.stride},
                     {"cfl_safety", m.config.schedule.cfl_safety}};
    if (m.config.sweep.present) {
        j["sweep"] = {{"eps_ladder", m.config.sweep.eps_ladder},
                      {"comparison_times", m.config.sweep.comparison_times},
                      {"norms", m.config.sweep.norms},
                      {"workers", m.config.sweep.workers}};
    }
    j["wall_clock_seconds"] = m.wall_clock_seconds;
    j["exit_status"] = m.exit_status;
    j["artifacts"] = m.artifacts;
    return j.dump(2) + "\n";
}

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    std::string text = manifest_json_text(m);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw io_error("write failed: " + path);
}

} // namespace chemflow
