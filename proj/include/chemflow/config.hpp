#ifndef CHEMFLOW_CONFIG_HPP
#define CHEMFLOW_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chemflow/dynamics.hpp"
#include "chemflow/init_data.hpp"
#include "chemflow/integrator.hpp"

namespace chemflow {

struct GridSpec {
    int dim = 0;
    std::vector<int> sizes;
    std::vector<double> extents; // defaults to 2*pi per axis
};

struct SweepSpec {
    bool present = false;
    std::vector<double> eps_ladder;
    std::vector<double> comparison_times; // defaults to {t_end}
    std::vector<std::string> norms;       // subset of {l2, h1, h2, linf}
    int workers = 1;
};

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    InitSpec init;
    StepSchedule schedule;
    SweepSpec sweep;
};

// Strict TOML subset: [section] headers, key = value lines, # comments,
// integers, floats, quoted strings and flat homogeneous arrays.
// Unknown sections or keys and duplicate keys are errors.  Required keys:
// grid.dim, grid.sizes, init.seed, init.amplitude, schedule.dt,
// schedule.t_end.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Deterministic rendering of the resolved configuration, one sorted
// "section.key=value" line per entry.  Key order in the source file and
// explicitly written default values do not change it.
std::string canonical_config(const RunConfig& cfg);

// FNV-1a (64-bit) of canonical_config, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

Grid grid_from_spec(const GridSpec& spec);

} // namespace chemflow

#endif
