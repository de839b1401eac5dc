#include "chemflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "chemflow/csv.hpp"
#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct RawValue {
    std::string text; // single token, quotes stripped for strings
    bool was_string = false;
    std::vector<RawValue> array;
    bool is_array = false;
    int line = 0;
};

[[noreturn]] void fail(int line, const std::string& msg) {
    throw config_error("config line " + std::to_string(line) + ": " + msg);
}

std::string strip(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

// Removes a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        else if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

RawValue parse_scalar(const std::string& tok, int line) {
    RawValue v;
    v.line = line;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        v.text = tok.substr(1, tok.size() - 2);
        if (v.text.find('"') != std::string::npos)
            fail(line, "embedded quote in string value");
        v.was_string = true;
        return v;
    }
    if (tok.empty()) fail(line, "missing value");
    if (tok.find('"') != std::string::npos) fail(line, "malformed string value");
    v.text = tok;
    return v;
}

RawValue parse_value(const std::string& raw, int line) {
    std::string tok = strip(raw);
    if (!tok.empty() && tok.front() == '[') {
        if (tok.back() != ']') fail(line, "array must open and close on one line");
        RawValue v;
        v.line = line;
        v.is_array = true;
        std::string inner = tok.substr(1, tok.size() - 2);
        std::string cur;
        bool quoted = false;
        bool any = false;
        for (char ch : inner) {
            if (ch == '"') quoted = !quoted;
            if (ch == ',' && !quoted) {
                v.array.push_back(parse_scalar(strip(cur), line));
                cur.clear();
                any = true;
            } else {
                cur.push_back(ch);
            }
        }
        std::string last = strip(cur);
        if (!last.empty()) v.array.push_back(parse_scalar(last, line));
        else if (any) fail(line, "trailing comma in array");
        return v;
    }
    return parse_scalar(tok, line);
}

long long as_int(const RawValue& v) {
    if (v.is_array || v.was_string) fail(v.line, "expected an integer");
    const char* b = v.text.c_str();
    char* e = nullptr;
    long long x = std::strtoll(b, &e, 10);
    if (e == b || *e != '\0') fail(v.line, "expected an integer, got '" + v.text + "'");
    return x;
}

std::uint64_t as_u64(const RawValue& v) {
    if (v.is_array || v.was_string) fail(v.line, "expected a nonnegative integer");
    if (!v.text.empty() && v.text[0] == '-')
        fail(v.line, "expected a nonnegative integer, got '" + v.text + "'");
    const char* b = v.text.c_str();
    char* e = nullptr;
    unsigned long long x = std::strtoull(b, &e, 10);
    if (e == b || *e != '\0')
        fail(v.line, "expected a nonnegative integer, got '" + v.text + "'");
    return x;
}

double as_float(const RawValue& v) {
    if (v.is_array || v.was_string) fail(v.line, "expected a number");
    if (v.text == "true" || v.text == "false") fail(v.line, "expected a number");
    const char* b = v.text.c_str();
    char* e = nullptr;
    double x = std::strtod(b, &e);
    if (e == b || *e != '\0') fail(v.line, "expected a number, got '" + v.text + "'");
    if (!std::isfinite(x)) fail(v.line, "non-finite number");
    return x;
}

std::string as_string(const RawValue& v) {
    if (v.is_array || !v.was_string) fail(v.line, "expected a quoted string");
    return v.text;
}

const RawValue& as_array(const RawValue& v) {
    if (!v.is_array) fail(v.line, "expected an array");
    return v;
}

std::vector<int> as_int_array(const RawValue& v) {
    std::vector<int> out;
    for (const auto& e : as_array(v).array) {
        long long x = as_int(e);
        if (x < -(1ll << 31) || x > (1ll << 31)) fail(e.line, "integer out of range");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::vector<double> as_float_array(const RawValue& v) {
    std::vector<double> out;
    for (const auto& e : as_array(v).array) out.push_back(as_float(e));
    return out;
}

std::vector<std::string> as_string_array(const RawValue& v) {
    std::vector<std::string> out;
    for (const auto& e : as_array(v).array) out.push_back(as_string(e));
    return out;
}

struct ParsedFile {
    // key "section.key" in file order
    std::vector<std::pair<std::string, RawValue>> entries;

    const RawValue* find(const std::string& full) const {
        for (const auto& kv : entries)
            if (kv.first == full) return &kv.second;
        return nullptr;
    }
};

bool known_key(const std::string& section, const std::string& key) {
    static const std::set<std::string> keys = {
        "grid.dim",          "grid.sizes",           "grid.extents",
        "params.d",          "params.epsilon",       "params.p_infinity",
        "params.chi",        "params.alpha",         "init.seed",
        "init.amplitude",    "init.band_limit",      "schedule.dt",
        "schedule.t_end",    "schedule.stride",      "schedule.cfl_safety",
        "sweep.eps_ladder",  "sweep.comparison_times",
        "sweep.norms",       "sweep.workers",
    };
    return keys.count(section + "." + key) != 0;
}

ParsedFile tokenize(const std::string& text) {
    static const std::set<std::string> sections = {"grid", "params", "init",
                                                   "schedule", "sweep"};
    ParsedFile pf;
    std::set<std::string> seen;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = strip(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(lineno, "malformed section header");
            section = strip(body.substr(1, body.size() - 2));
            if (!sections.count(section))
                fail(lineno, "unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = body.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        std::string key = strip(body.substr(0, eq));
        if (key.empty()) fail(lineno, "empty key");
        if (section.empty()) fail(lineno, "key outside any section");
        if (!known_key(section, key))
            fail(lineno, "unknown key '" + key + "' in section [" + section + "]");
        std::string full = section + "." + key;
        if (!seen.insert(full).second) fail(lineno, "duplicate key '" + full + "'");
        pf.entries.emplace_back(full, parse_value(body.substr(eq + 1), lineno));
    }
    return pf;
}

void require(const ParsedFile& pf, const char* full) {
    if (!pf.find(full))
        throw config_error(std::string("config is missing required key '") + full + "'");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    ParsedFile pf = tokenize(text);
    for (const char* k : {"grid.dim", "grid.sizes", "init.seed",
                          "init.amplitude", "schedule.dt", "schedule.t_end"})
        require(pf, k);

    RunConfig cfg;

    const RawValue* v = pf.find("grid.dim");
    long long dim = as_int(*v);
    if (dim < 1 || dim > 3) fail(v->line, "grid.dim must be 1, 2 or 3");
    cfg.grid.dim = static_cast<int>(dim);

    v = pf.find("grid.sizes");
    cfg.grid.sizes = as_int_array(*v);
    if (cfg.grid.sizes.size() != static_cast<std::size_t>(cfg.grid.dim))
        fail(v->line, "grid.sizes must list one size per dimension");

    if ((v = pf.find("grid.extents"))) {
        cfg.grid.extents = as_float_array(*v);
        if (cfg.grid.extents.size() != static_cast<std::size_t>(cfg.grid.dim))
            fail(v->line, "grid.extents must list one extent per dimension");
        for (double L : cfg.grid.extents)
            if (!(L > 0.0)) fail(v->line, "extents must be positive");
    } else {
        cfg.grid.extents.assign(cfg.grid.dim, kTwoPi);
    }

    if ((v = pf.find("params.d"))) cfg.params.d = as_float(*v);
    if ((v = pf.find("params.epsilon"))) cfg.params.epsilon = as_float(*v);
    if ((v = pf.find("params.p_infinity"))) cfg.params.p_infinity = as_float(*v);
    if ((v = pf.find("params.chi"))) cfg.params.chi = as_float(*v);
    if ((v = pf.find("params.alpha"))) cfg.params.alpha = as_float(*v);

    cfg.init.seed = as_u64(*pf.find("init.seed"));
    v = pf.find("init.amplitude");
    cfg.init.amplitude = as_float(*v);
    if (cfg.init.amplitude < 0.0) fail(v->line, "init.amplitude must be >= 0");
    if ((v = pf.find("init.band_limit"))) {
        long long b = as_int(*v);
        if (b < 1) fail(v->line, "init.band_limit must be >= 1");
        cfg.init.band_limit = static_cast<int>(b);
    }

    v = pf.find("schedule.dt");
    cfg.schedule.dt = as_float(*v);
    if (!(cfg.schedule.dt > 0.0)) fail(v->line, "schedule.dt must be positive");
    v = pf.find("schedule.t_end");
    cfg.schedule.t_end = as_float(*v);
    if (!(cfg.schedule.t_end > 0.0)) fail(v->line, "schedule.t_end must be positive");
    if ((v = pf.find("schedule.stride"))) {
        long long s = as_int(*v);
        if (s < 1) fail(v->line, "schedule.stride must be >= 1");
        cfg.schedule.stride = static_cast<int>(s);
    }
    if ((v = pf.find("schedule.cfl_safety"))) {
        cfg.schedule.cfl_safety = as_float(*v);
        if (!(cfg.schedule.cfl_safety > 0.0))
            fail(v->line, "schedule.cfl_safety must be positive");
    }

    bool any_sweep = false;
    for (const auto& kv : pf.entries)
        if (kv.first.rfind("sweep.", 0) == 0) any_sweep = true;
    if (any_sweep) {
        cfg.sweep.present = true;
        v = pf.find("sweep.eps_ladder");
        if (!v) throw config_error("[sweep] requires eps_ladder");
        cfg.sweep.eps_ladder = as_float_array(*v);
        if (cfg.sweep.eps_ladder.empty()) fail(v->line, "eps_ladder is empty");
        if ((v = pf.find("sweep.comparison_times"))) {
            cfg.sweep.comparison_times = as_float_array(*v);
            if (cfg.sweep.comparison_times.empty())
                fail(v->line, "comparison_times is empty");
        } else {
            cfg.sweep.comparison_times = {cfg.schedule.t_end};
        }
        if ((v = pf.find("sweep.norms"))) {
            cfg.sweep.norms = as_string_array(*v);
            if (cfg.sweep.norms.empty()) fail(v->line, "norms is empty");
            for (const auto& n : cfg.sweep.norms)
                if (n != "l2" && n != "h1" && n != "h2" && n != "linf")
                    fail(v->line, "unknown norm '" + n + "'");
        } else {
            cfg.sweep.norms = {"l2", "h1", "h2", "linf"};
        }
        if ((v = pf.find("sweep.workers"))) {
            long long w = as_int(*v);
            if (w < 1) fail(v->line, "sweep.workers must be >= 1");
            cfg.sweep.workers = static_cast<int>(w);
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

std::string join_f(const std::vector<double>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out.push_back(',');
        out += format_double(xs[i]);
    }
    out.push_back(']');
    return out;
}

std::string join_i(const std::vector<int>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(xs[i]);
    }
    out.push_back(']');
    return out;
}

std::string join_s(const std::vector<std::string>& xs) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out.push_back(',');
        out += xs[i];
    }
    out.push_back(']');
    return out;
}

} // namespace

std::string canonical_config(const RunConfig& cfg) {
    // Resolved values, so a config that spells out a default hashes the same
    // as one that omits it.
    std::vector<std::string> lines = {
        "grid.dim=" + std::to_string(cfg.grid.dim),
        "grid.extents=" + join_f(cfg.grid.extents),
        "grid.sizes=" + join_i(cfg.grid.sizes),
        "init.amplitude=" + format_double(cfg.init.amplitude),
        "init.band_limit=" + std::to_string(cfg.init.band_limit),
        "init.seed=" + std::to_string(cfg.init.seed),
        "params.alpha=" + format_double(cfg.params.alpha),
        "params.chi=" + format_double(cfg.params.chi),
        "params.d=" + format_double(cfg.params.d),
        "params.epsilon=" + format_double(cfg.params.epsilon),
        "params.p_infinity=" + format_double(cfg.params.p_infinity),
        "schedule.cfl_safety=" + format_double(cfg.schedule.cfl_safety),
        "schedule.dt=" + format_double(cfg.schedule.dt),
        "schedule.stride=" + std::to_string(cfg.schedule.stride),
        "schedule.t_end=" + format_double(cfg.schedule.t_end),
    };
    if (cfg.sweep.present) {
        lines.push_back("sweep.comparison_times=" + join_f(cfg.sweep.comparison_times));
        lines.push_back("sweep.eps_ladder=" + join_f(cfg.sweep.eps_ladder));
        lines.push_back("sweep.norms=" + join_s(cfg.sweep.norms));
        lines.push_back("sweep.workers=" + std::to_string(cfg.sweep.workers));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out.push_back('\n');
    }
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    std::string text = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

Grid grid_from_spec(const GridSpec& spec) {
    return make_grid(spec.dim, spec.sizes, spec.extents);
}

} // namespace chemflow
