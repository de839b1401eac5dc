#include "chemflow/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "chemflow/errors.hpp"

namespace chemflow {

const char* const kDiagnosticsHeader =
    "t,l2_p,l2_q,h1_p,h1_q,h2_p,h2_q,h3_p,h3_q,linf_p,linf_q,"
    "l2_divq,l2_gradq,l2_curlq,mass_p,diss_p_acc,diss_q_acc,ledger_residual";

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void append_row(std::string& out, const std::vector<double>& vals) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out.push_back(',');
        out += format_double(vals[i]);
    }
    out.push_back('\n');
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, const std::string& path) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw io_error("malformed numeric field '" + tok + "' in " + path);
    return v;
}

std::vector<std::vector<double>> read_table(const std::string& path,
                                            const std::string& expected_header,
                                            std::size_t ncols) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected_header)
        throw io_error("unexpected header in " + path + ": '" + line + "'");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto toks = split_csv_line(line);
        if (toks.size() != ncols)
            throw io_error("row with " + std::to_string(toks.size()) +
                           " fields (expected " + std::to_string(ncols) + ") in " + path);
        std::vector<double> row(ncols);
        for (std::size_t i = 0; i < ncols; ++i) row[i] = parse_double(toks[i], path);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw io_error("write failed: " + path);
}

} // namespace

std::string diagnostics_csv_text(const DiagnosticsRecord& rec) {
    std::string out = kDiagnosticsHeader;
    out.push_back('\n');
    for (std::size_t i = 0; i < rec.size(); ++i) {
        append_row(out, {rec.t[i], rec.l2_p[i], rec.l2_q[i], rec.h1_p[i], rec.h1_q[i],
                         rec.h2_p[i], rec.h2_q[i], rec.h3_p[i], rec.h3_q[i],
                         rec.linf_p[i], rec.linf_q[i], rec.l2_divq[i], rec.l2_gradq[i],
                         rec.l2_curlq[i], rec.mass_p[i], rec.diss_p_acc[i],
                         rec.diss_q_acc[i], rec.ledger_residual[i]});
    }
    return out;
}

void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec) {
    write_text(path, diagnostics_csv_text(rec));
}

DiagnosticsRecord read_diagnostics_csv(const std::string& path) {
    auto rows = read_table(path, kDiagnosticsHeader, 18);
    DiagnosticsRecord rec;
    for (const auto& r : rows) {
        rec.t.push_back(r[0]);
        rec.l2_p.push_back(r[1]);
        rec.l2_q.push_back(r[2]);
        rec.h1_p.push_back(r[3]);
        rec.h1_q.push_back(r[4]);
        rec.h2_p.push_back(r[5]);
        rec.h2_q.push_back(r[6]);
        rec.h3_p.push_back(r[7]);
        rec.h3_q.push_back(r[8]);
        rec.linf_p.push_back(r[9]);
        rec.linf_q.push_back(r[10]);
        rec.l2_divq.push_back(r[11]);
        rec.l2_gradq.push_back(r[12]);
        rec.l2_curlq.push_back(r[13]);
        rec.mass_p.push_back(r[14]);
        rec.diss_p_acc.push_back(r[15]);
        rec.diss_q_acc.push_back(r[16]);
        rec.ledger_residual.push_back(r[17]);
    }
    return rec;
}

static const char* const kErrorsHeader =
    "eps,t,l2_theta,l2_psi,h1_theta,h1_psi,h2_theta,h2_psi,linf_theta,linf_psi";

std::string errors_csv_text(const std::vector<ErrorRow>& rows) {
    std::string out = kErrorsHeader;
    out.push_back('\n');
    for (const auto& r : rows) {
        append_row(out, {r.eps, r.t, r.l2_theta, r.l2_psi, r.h1_theta, r.h1_psi,
                         r.h2_theta, r.h2_psi, r.linf_theta, r.linf_psi});
    }
    return out;
}

void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows) {
    write_text(path, errors_csv_text(rows));
}

std::vector<ErrorRow> read_errors_csv(const std::string& path) {
    auto raw = read_table(path, kErrorsHeader, 10);
    std::vector<ErrorRow> rows;
    for (const auto& r : raw) {
        ErrorRow e;
        e.eps = r[0];
        e.t = r[1];
        e.l2_theta = r[2];
        e.l2_psi = r[3];
        e.h1_theta = r[4];
        e.h1_psi = r[5];
        e.h2_theta = r[6];
        e.h2_psi = r[7];
        e.linf_theta = r[8];
        e.linf_psi = r[9];
        rows.push_back(e);
    }
    return rows;
}

static const char* const kRateHeader = "norm,slope,intercept,r2";

std::string rate_csv_text(const std::vector<RateRow>& rows) {
    std::string out = kRateHeader;
    out.push_back('\n');
    for (const auto& r : rows) {
        out += r.norm;
        out.push_back(',');
        out += format_double(r.slope);
        out.push_back(',');
        out += format_double(r.intercept);
        out.push_back(',');
        out += format_double(r.r2);
        out.push_back('\n');
    }
    return out;
}

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows) {
    write_text(path, rate_csv_text(rows));
}

std::vector<RateRow> read_rate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRateHeader)
        throw io_error("unexpected header in " + path + ": '" + line + "'");
    std::vector<RateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto toks = split_csv_line(line);
        if (toks.size() != 4) throw io_error("malformed rate row in " + path);
        RateRow r;
        r.norm = toks[0];
        r.slope = parse_double(toks[1], path);
        r.intercept = parse_double(toks[2], path);
        r.r2 = parse_double(toks[3], path);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace chemflow
