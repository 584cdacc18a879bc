#include <qdforge/env/raster.hpp>

#include <cstdint>
#include <unordered_map>

namespace qdforge::env {

namespace {
    std::vector<std::uint32_t> occupied_pixels(std::span<const double> raster)
    {
        std::vector<std::uint32_t> idx;
        for (std::uint32_t i = 0; i < raster.size(); i++)
            if (raster[i] != 0.0)
                idx.push_back(i);
        return idx;
    }

    double iou_sorted(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b)
    {
        std::size_t i = 0, j = 0, inter = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] == b[j]) {
                inter++;
                i++;
                j++;
            }
            else if (a[i] < b[j])
                i++;
            else
                j++;
        }
        std::size_t uni = a.size() + b.size() - inter;
        if (uni == 0)
            return 1.0; // both empty: identical
        return static_cast<double>(inter) / static_cast<double>(uni);
    }

    std::uint64_t occupied_hash(const std::vector<std::uint32_t>& idx)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (auto v : idx) {
            h ^= v;
            h *= 1099511628211ULL;
        }
        return h;
    }
} // namespace

double raster_iou(std::span<const double> a, std::span<const double> b)
{
    return iou_sorted(occupied_pixels(a), occupied_pixels(b));
}

std::vector<std::size_t> filter_duplicates(const qd::ExperienceStore& store, double overlap_threshold)
{
    std::vector<std::size_t> retained;
    std::vector<std::vector<std::uint32_t>> retained_pixels;
    // Any record identical to an earlier one is always dropped when the
    // threshold is below 1, so exact duplicates short-circuit by hash.
    std::unordered_map<std::uint64_t, std::vector<std::vector<std::uint32_t>>> seen;
    const bool shortcut = overlap_threshold < 1.0;

    for (std::size_t i = 0; i < store.size(); i++) {
        auto pixels = occupied_pixels(store.record(i));
        if (shortcut) {
            auto& bucket = seen[occupied_hash(pixels)];
            bool duplicate = false;
            for (const auto& prior : bucket)
                if (prior == pixels) {
                    duplicate = true;
                    break;
                }
            if (duplicate)
                continue;
            bucket.push_back(pixels);
        }
        bool keep = true;
        for (const auto& other : retained_pixels) {
            if (iou_sorted(pixels, other) > overlap_threshold) {
                keep = false;
                break;
            }
        }
        if (keep) {
            retained.push_back(i);
            retained_pixels.push_back(std::move(pixels));
        }
    }
    return retained;
}

std::vector<const std::vector<double>*> training_view(const qd::ExperienceStore& store)
{
    if (!store.dedup_enabled())
        return store.view();
    std::vector<const std::vector<double>*> out;
    for (std::size_t i : filter_duplicates(store, store.dedup_threshold()))
        out.push_back(&store.record(i));
    return out;
}

} // namespace qdforge::env
