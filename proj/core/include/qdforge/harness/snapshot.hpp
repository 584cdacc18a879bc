#ifndef QDFORGE_HARNESS_SNAPSHOT_HPP
#define QDFORGE_HARNESS_SNAPSHOT_HPP

#include <qdforge/qd/types.hpp>
#include <qdforge/vqvae/model.hpp>

#include <filesystem>
#include <memory>
#include <vector>

namespace qdforge::harness {

// Archive snapshot: little-endian binary, one flat record per member with
// length-prefixed sections (genome, raw BD, latent BD, ground-truth BD).
// Bit-exact across identical runs.
void write_archive_snapshot(const std::filesystem::path& path, const std::vector<const qd::Individual*>& members);
std::vector<qd::Individual> read_archive_snapshot(const std::filesystem::path& path);

// Model checkpoint: JSON architecture descriptor plus the flat parameter
// vector (codebook included).
void write_model_checkpoint(const std::filesystem::path& path, const vqvae::VqVaeModel& model);
std::unique_ptr<vqvae::VqVaeModel> read_model_checkpoint(const std::filesystem::path& path);

} // namespace qdforge::harness

#endif
