#ifndef CHEMFLOW_SNAPSHOT_HPP
#define CHEMFLOW_SNAPSHOT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chemflow/dynamics.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

// Binary field container.  Layout (all integers and floats little-endian):
//   magic "CHTXSNAP" (8 bytes)
//   u32 version (currently 1)
//   u32 dim, u32 model_tag, u32 field count
//   u64 size per axis, f64 extent per axis
//   f64 time, f64 d, f64 epsilon, f64 p_infinity, f64 chi, f64 alpha
//   per field: u32 name length + name bytes
//   payload: per field, points() f64 values, row-major, declared order
struct SnapshotField {
    std::string name;
    std::vector<double> data;
};

struct Snapshot {
    std::uint32_t version = 1;
    int dim = 0;
    std::uint32_t model_tag = 0;
    std::vector<std::uint64_t> sizes;
    std::vector<double> extents;
    double time = 0.0;
    ModelParams params;
    std::vector<SnapshotField> fields;
};

struct SnapshotHeader {
    std::uint32_t version = 1;
    int dim = 0;
    std::uint32_t model_tag = 0;
    std::vector<std::uint64_t> sizes;
    std::vector<double> extents;
    double time = 0.0;
    ModelParams params;
    std::vector<std::string> field_names;
};

std::uint32_t tag_to_u32(ModelTag tag);
ModelTag tag_from_u32(std::uint32_t v);

void save_snapshot(const std::string& path, const Snapshot& s);
Snapshot load_snapshot(const std::string& path);
// Metadata only; the payload is not read.
SnapshotHeader load_snapshot_header(const std::string& path);

// Conservation states store fields "p_tilde", "q0".."q{dim-1}";
// Keller-Segel states store "u", "c".
Snapshot to_snapshot(const State& s);
Snapshot to_snapshot(const KSState& s);
Grid grid_from_snapshot(const Snapshot& s);
// The grid must outlive the returned state (caller-owned, typically from
// grid_from_snapshot).
State state_from_snapshot(const Snapshot& s, const Grid& g);
KSState ks_from_snapshot(const Snapshot& s, const Grid& g);

} // namespace chemflow

#endif
