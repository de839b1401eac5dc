#ifndef CHEMFLOW_CSV_HPP
#define CHEMFLOW_CSV_HPP

#include <string>
#include <vector>

#include "chemflow/diagnostics.hpp"

namespace chemflow {

// printf "%.17g": round-trips every finite double exactly.
std::string format_double(double x);

// Column layout of the per-run time series.  Order is fixed; parsers may
// rely on it.
extern const char* const kDiagnosticsHeader;

std::string diagnostics_csv_text(const DiagnosticsRecord& rec);
void write_diagnostics_csv(const std::string& path, const DiagnosticsRecord& rec);

// Parses a file produced by write_diagnostics_csv.  Norm/ledger columns are
// restored; parameters and model are not part of the file and stay default.
DiagnosticsRecord read_diagnostics_csv(const std::string& path);

struct ErrorRow {
    double eps = 0.0;
    double t = 0.0;
    double l2_theta = 0.0, l2_psi = 0.0;
    double h1_theta = 0.0, h1_psi = 0.0;
    double h2_theta = 0.0, h2_psi = 0.0;
    double linf_theta = 0.0, linf_psi = 0.0;
};

std::string errors_csv_text(const std::vector<ErrorRow>& rows);
void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows);
std::vector<ErrorRow> read_errors_csv(const std::string& path);

struct RateRow {
    std::string norm;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

std::string rate_csv_text(const std::vector<RateRow>& rows);
void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows);
std::vector<RateRow> read_rate_csv(const std::string& path);

} // namespace chemflow

#endif
