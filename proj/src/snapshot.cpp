#include "chemflow/snapshot.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

const char kMagic[8] = {'C', 'H', 'T', 'X', 'S', 'N', 'A', 'P'};

// Byte-level little-endian encoding so files written on any host agree.
void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double x) {
    put_u64(out, std::bit_cast<std::uint64_t>(x));
}

class Reader {
  public:
    Reader(const std::string& path, std::ifstream& in) : path_(path), in_(in) {}

    void bytes(char* dst, std::size_t n) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw io_error("truncated snapshot file: " + path_);
    }

    std::uint32_t u32() {
        unsigned char b[4];
        bytes(reinterpret_cast<char*>(b), 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        unsigned char b[8];
        bytes(reinterpret_cast<char*>(b), 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

  private:
    const std::string& path_;
    std::ifstream& in_;
};

SnapshotHeader read_header(Reader& r, const std::string& path) {
    char magic[8];
    r.bytes(magic, 8);
    if (std::memcmp(magic, kMagic, 8) != 0)
        throw io_error("not a snapshot file (bad magic): " + path);

    SnapshotHeader h;
    h.version = r.u32();
    if (h.version != 1)
        throw io_error("unsupported snapshot version " + std::to_string(h.version) + ": " + path);

    std::uint32_t dim = r.u32();
    if (dim < 1 || dim > 3)
        throw io_error("snapshot declares invalid dimension: " + path);
    h.dim = static_cast<int>(dim);
    h.model_tag = r.u32();
    if (h.model_tag > 2)
        throw io_error("snapshot declares unknown model tag: " + path);
    std::uint32_t nfields = r.u32();
    if (nfields == 0 || nfields > 8)
        throw io_error("snapshot declares implausible field count: " + path);

    h.sizes.resize(dim);
    for (std::uint32_t a = 0; a < dim; ++a) {
        h.sizes[a] = r.u64();
        if (h.sizes[a] < 2 || h.sizes[a] > (1u << 20))
            throw io_error("snapshot declares implausible grid size: " + path);
    }
    h.extents.resize(dim);
    for (std::uint32_t a = 0; a < dim; ++a) h.extents[a] = r.f64();

    h.time = r.f64();
    h.params.d = r.f64();
    h.params.epsilon = r.f64();
    h.params.p_infinity = r.f64();
    h.params.chi = r.f64();
    h.params.alpha = r.f64();

    h.field_names.resize(nfields);
    for (std::uint32_t f = 0; f < nfields; ++f) {
        std::uint32_t len = r.u32();
        if (len > 64) throw io_error("snapshot field name too long: " + path);
        std::string name(len, '\0');
        if (len > 0) r.bytes(name.data(), len);
        h.field_names[f] = name;
    }
    return h;
}

} // namespace

std::uint32_t tag_to_u32(ModelTag tag) {
    switch (tag) {
        case ModelTag::diffusive: return 0;
        case ModelTag::nondiffusive: return 1;
        case ModelTag::keller_segel: return 2;
    }
    throw io_error("unrepresentable model tag");
}

ModelTag tag_from_u32(std::uint32_t v) {
    switch (v) {
        case 0: return ModelTag::diffusive;
        case 1: return ModelTag::nondiffusive;
        case 2: return ModelTag::keller_segel;
    }
    throw io_error("unknown model tag value " + std::to_string(v));
}

void save_snapshot(const std::string& path, const Snapshot& s) {
    if (s.dim < 1 || s.dim > 3 || s.sizes.size() != static_cast<std::size_t>(s.dim) ||
        s.extents.size() != static_cast<std::size_t>(s.dim))
        throw io_error("snapshot structure inconsistent, refusing to write: " + path);

    std::uint64_t points = 1;
    for (auto n : s.sizes) points *= n;
    for (const auto& f : s.fields)
        if (f.data.size() != points)
            throw io_error("snapshot field '" + f.name + "' has wrong payload size: " + path);

    std::string buf;
    buf.reserve(128 + s.fields.size() * points * 8);
    buf.append(kMagic, 8);
    put_u32(buf, s.version);
    put_u32(buf, static_cast<std::uint32_t>(s.dim));
    put_u32(buf, s.model_tag);
    put_u32(buf, static_cast<std::uint32_t>(s.fields.size()));
    for (auto n : s.sizes) put_u64(buf, n);
    for (auto L : s.extents) put_f64(buf, L);
    put_f64(buf, s.time);
    put_f64(buf, s.params.d);
    put_f64(buf, s.params.epsilon);
    put_f64(buf, s.params.p_infinity);
    put_f64(buf, s.params.chi);
    put_f64(buf, s.params.alpha);
    for (const auto& f : s.fields) {
        put_u32(buf, static_cast<std::uint32_t>(f.name.size()));
        buf.append(f.name);
    }
    for (const auto& f : s.fields)
        for (double x : f.data) put_f64(buf, x);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("write failed: " + path);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    Reader r(path, in);
    SnapshotHeader h = read_header(r, path);

    Snapshot s;
    s.version = h.version;
    s.dim = h.dim;
    s.model_tag = h.model_tag;
    s.sizes = h.sizes;
    s.extents = h.extents;
    s.time = h.time;
    s.params = h.params;

    std::uint64_t points = 1;
    for (auto n : h.sizes) points *= n;
    s.fields.resize(h.field_names.size());
    for (std::size_t f = 0; f < h.field_names.size(); ++f) {
        s.fields[f].name = h.field_names[f];
        s.fields[f].data.resize(points);
        for (std::uint64_t i = 0; i < points; ++i) s.fields[f].data[i] = r.f64();
    }
    // Trailing garbage means the file is not what we wrote.
    char extra;
    in.read(&extra, 1);
    if (in.gcount() != 0) throw io_error("snapshot has trailing bytes: " + path);
    return s;
}

SnapshotHeader load_snapshot_header(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    Reader r(path, in);
    return read_header(r, path);
}

Snapshot to_snapshot(const State& s) {
    Snapshot out;
    const Grid& g = *s.p_tilde.grid;
    out.dim = g.dim;
    out.model_tag = tag_to_u32(s.model);
    for (int a = 0; a < g.dim; ++a) {
        out.sizes.push_back(static_cast<std::uint64_t>(g.size(a)));
        out.extents.push_back(g.length(a));
    }
    out.time = s.time;
    out.params = s.params;
    out.fields.push_back({"p_tilde", s.p_tilde.v});
    for (int a = 0; a < g.dim; ++a)
        out.fields.push_back({"q" + std::to_string(a), s.q.comp[a].v});
    return out;
}

Snapshot to_snapshot(const KSState& s) {
    Snapshot out;
    const Grid& g = *s.u.grid;
    out.dim = g.dim;
    out.model_tag = tag_to_u32(ModelTag::keller_segel);
    for (int a = 0; a < g.dim; ++a) {
        out.sizes.push_back(static_cast<std::uint64_t>(g.size(a)));
        out.extents.push_back(g.length(a));
    }
    out.time = s.time;
    out.params = s.params;
    out.fields.push_back({"u", s.u.v});
    out.fields.push_back({"c", s.c.v});
    return out;
}

Grid grid_from_snapshot(const Snapshot& s) {
    std::vector<int> sizes;
    for (auto n : s.sizes) sizes.push_back(static_cast<int>(n));
    return make_grid(s.dim, sizes, s.extents);
}

namespace {

const std::vector<double>& find_field(const Snapshot& s, const std::string& name) {
    for (const auto& f : s.fields)
        if (f.name == name) return f.data;
    throw io_error("snapshot is missing field '" + name + "'");
}

void check_grid_match(const Snapshot& s, const Grid& g) {
    if (g.dim != s.dim) throw io_error("snapshot/grid dimension mismatch");
    for (int a = 0; a < g.dim; ++a)
        if (static_cast<std::uint64_t>(g.size(a)) != s.sizes[a])
            throw io_error("snapshot/grid size mismatch");
}

} // namespace

State state_from_snapshot(const Snapshot& s, const Grid& g) {
    check_grid_match(s, g);
    ModelTag tag = tag_from_u32(s.model_tag);
    if (tag == ModelTag::keller_segel)
        throw io_error("snapshot holds a Keller-Segel state, not a conservation state");
    State st;
    st.p_tilde = ScalarField(g);
    st.q = VectorField(g);
    st.time = s.time;
    st.params = s.params;
    st.model = tag;
    st.params.validate(tag);
    const auto& p = find_field(s, "p_tilde");
    if (p.size() != st.p_tilde.v.size()) throw io_error("field 'p_tilde' size mismatch");
    st.p_tilde.v = p;
    for (int a = 0; a < g.dim; ++a) {
        const auto& q = find_field(s, "q" + std::to_string(a));
        if (q.size() != st.q.comp[a].v.size()) throw io_error("field size mismatch");
        st.q.comp[a].v = q;
    }
    return st;
}

KSState ks_from_snapshot(const Snapshot& s, const Grid& g) {
    check_grid_match(s, g);
    if (tag_from_u32(s.model_tag) != ModelTag::keller_segel)
        throw io_error("snapshot does not hold a Keller-Segel state");
    KSState st;
    st.u = ScalarField(g);
    st.c = ScalarField(g);
    st.time = s.time;
    st.params = s.params;
    st.params.validate(ModelTag::keller_segel);
    st.u.v = find_field(s, "u");
    st.c.v = find_field(s, "c");
    if (st.u.v.size() != static_cast<std::size_t>(g.points()) ||
        st.c.v.size() != static_cast<std::size_t>(g.points()))
        throw io_error("Keller-Segel field size mismatch");
    return st;
}

} // namespace chemflow
