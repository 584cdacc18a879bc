#ifndef QDFORGE_HARNESS_CSV_HPP
#define QDFORGE_HARNESS_CSV_HPP

#include <qdforge/metrics/metrics.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace qdforge::harness {

inline constexpr const char* kMetricsHeader = "iteration,coverage,pqd,edr,cds,archive_size,valid_size";

// Shortest decimal form that round-trips the exact 64-bit value.
std::string format_double(double v);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const metrics::MetricsRecord& rec);
std::string metrics_csv(const std::vector<metrics::MetricsRecord>& records);
std::vector<metrics::MetricsRecord> read_metrics_csv(const std::string& path);

} // namespace qdforge::harness

#endif
