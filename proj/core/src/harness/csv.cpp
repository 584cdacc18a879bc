#include <qdforge/harness/csv.hpp>
#include <qdforge/common.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qdforge::harness {

std::string format_double(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

void write_metrics_header(std::ostream& out)
{
    out << kMetricsHeader << "\n";
}

void write_metrics_row(std::ostream& out, const metrics::MetricsRecord& rec)
{
    out << rec.iteration << ',' << format_double(rec.coverage) << ',' << format_double(rec.pqd) << ','
        << format_double(rec.edr) << ',' << format_double(rec.cds) << ',' << rec.archive_size << ','
        << rec.valid_size << "\n";
}

std::string metrics_csv(const std::vector<metrics::MetricsRecord>& records)
{
    std::ostringstream out;
    write_metrics_header(out);
    for (const auto& rec : records)
        write_metrics_row(out, rec);
    return out.str();
}

std::vector<metrics::MetricsRecord> read_metrics_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open metrics csv '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kMetricsHeader)
        throw ConfigError("metrics csv '" + path + "' has an unexpected header");

    std::vector<metrics::MetricsRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ','))
            fields.push_back(field);
        if (fields.size() != 7)
            throw ConfigError("metrics csv '" + path + "' line " + std::to_string(lineno) + ": expected 7 fields");
        metrics::MetricsRecord rec;
        rec.iteration = std::strtoll(fields[0].c_str(), nullptr, 10);
        rec.coverage = std::strtod(fields[1].c_str(), nullptr);
        rec.pqd = std::strtod(fields[2].c_str(), nullptr);
        rec.edr = std::strtod(fields[3].c_str(), nullptr);
        rec.cds = std::strtod(fields[4].c_str(), nullptr);
        rec.archive_size = std::strtoull(fields[5].c_str(), nullptr, 10);
        rec.valid_size = std::strtoull(fields[6].c_str(), nullptr, 10);
        records.push_back(rec);
    }
    return records;
}

} // namespace qdforge::harness
