#include <qdforge/harness/summarize.hpp>
#include <qdforge/harness/csv.hpp>
#include <qdforge/common.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdforge::harness {

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw UsageError("quantile of an empty set");
    std::sort(values.begin(), values.end());
    double pos = q * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::string summarize_runs(const std::vector<std::filesystem::path>& run_dirs, double q_low, double q_high)
{
    if (run_dirs.empty())
        throw ConfigError("summarize: at least one run directory required");

    std::vector<std::vector<metrics::MetricsRecord>> runs;
    for (const auto& dir : run_dirs)
        runs.push_back(read_metrics_csv((dir / "metrics.csv").string()));

    const auto& reference = runs.front();
    std::vector<std::string> offenders;
    for (std::size_t r = 1; r < runs.size(); r++) {
        bool aligned = runs[r].size() == reference.size();
        for (std::size_t i = 0; aligned && i < reference.size(); i++)
            aligned = runs[r][i].iteration == reference[i].iteration;
        if (!aligned)
            offenders.push_back(run_dirs[r].string());
    }
    if (!offenders.empty()) {
        std::string message = "summarize: iteration grids misaligned with " + run_dirs.front().string() + ":";
        for (const auto& o : offenders)
            message += " " + o;
        throw ConfigError(message);
    }

    static const char* kColumns[] = {"coverage", "pqd", "edr", "cds", "archive_size", "valid_size"};
    auto column_value = [](const metrics::MetricsRecord& rec, std::size_t col) {
        switch (col) {
        case 0: return rec.coverage;
        case 1: return rec.pqd;
        case 2: return rec.edr;
        case 3: return rec.cds;
        case 4: return static_cast<double>(rec.archive_size);
        default: return static_cast<double>(rec.valid_size);
        }
    };

    std::ostringstream out;
    out << "iteration";
    for (const char* col : kColumns)
        out << ',' << col << "_q25," << col << "_median," << col << "_q75";
    out << "\n";

    for (std::size_t i = 0; i < reference.size(); i++) {
        out << reference[i].iteration;
        for (std::size_t col = 0; col < 6; col++) {
            std::vector<double> values;
            values.reserve(runs.size());
            for (const auto& run : runs)
                values.push_back(column_value(run[i], col));
            out << ',' << format_double(quantile(values, q_low)) << ',' << format_double(quantile(values, 0.5)) << ','
                << format_double(quantile(values, q_high));
        }
        out << "\n";
    }
    return out.str();
}

} // namespace qdforge::harness
