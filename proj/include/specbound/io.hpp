// Serialization. Spectra travel as a single JSON object
//
//   {"label": string, "dimension": int|null, "volume": number|null,
//    "constants": {"alpha","beta","gamma"}|null, "eigenvalues": [...]}
//
// and the loader rejects unordered or non-numeric eigenvalue lists. Check
// results serialize as a JSON array of report records and as a flat CSV with
// columns law,n,p,q,z,t,lhs,rhs,slack,verdict; a monotonicity report fills
// the CSV value columns with (max_violation, tolerance-as-rhs 0, negated
// violation) so one schema carries both kinds, and context fields rho and k
// reuse the p and q columns. Doubles are written in shortest round-trip
// form, so save/load preserves every bit.

#pragma once

#include "specbound/core.hpp"
#include "specbound/report.hpp"

#include <string>
#include <vector>

namespace specbound {

std::string format_double(double v);

std::string spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const std::string& text);
void save_spectrum(const Spectrum& s, const std::string& path);
Spectrum load_spectrum(const std::string& path);

std::string reports_to_json(const std::vector<InequalityReport>& checks,
                            const std::vector<MonotonicityReport>& monotone = {});
std::string reports_to_csv(const std::vector<InequalityReport>& checks,
                           const std::vector<MonotonicityReport>& monotone = {});

// Two-column tab-separated series (grid point, composite value) with a short
// comment header; plot-ready.
std::string monotonicity_to_tsv(const MonotonicityReport& r);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace specbound
