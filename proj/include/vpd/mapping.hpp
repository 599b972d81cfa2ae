#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpd/sphere.hpp"

namespace vpd {

/// Precomputed projection of every Hough bin onto the lattice: for each bin
/// the deduplicated, sorted indices of the lattice points its great circle
/// snaps to. Bins whose line misses the grid have empty entry lists.
struct MappingTable {
    HoughParams hough_params;
    std::uint64_t lattice_id = 0;
    std::uint64_t intrinsics_id = 0;
    std::uint32_t lattice_n = 0;
    std::uint32_t lattice_k = 0;
    std::uint32_t m_samples = 0;

    // Ragged storage: entries for bin i live in [offsets[i], offsets[i+1]).
    std::vector<std::uint32_t> offsets;
    std::vector<std::uint32_t> indices;

    std::size_t entry_count(std::size_t bin) const { return offsets[bin + 1] - offsets[bin]; }
    const std::uint32_t* entries(std::size_t bin) const { return indices.data() + offsets[bin]; }

    /// Hash identifying the full build configuration; names cache files.
    std::uint64_t config_hash() const;
};

/// FNV-1a content hash of the intrinsics fields as used for mapping caches.
std::uint64_t intrinsics_hash(const CameraIntrinsics& k);

/// Projects every Hough bin's great circle onto the lattice: m azimuths are
/// sampled uniformly over [-pi/2, pi), each circle point snaps to its nearest
/// lattice point by cosine distance, and the per-bin index set is
/// deduplicated. Deterministic for fixed inputs, any thread count.
MappingTable build_mapping(const HoughParams& params, const SphereLattice& lattice,
                           const CameraIntrinsics& k, std::uint32_t m, unsigned jobs = 0);

/// Adds each active bin's vote to all lattice points in its entry list.
/// Chunked so the merge order is independent of the worker count.
SphereField accumulate_field(const HoughGrid& grid, const MappingTable& table,
                             const SphereLattice& lattice, unsigned jobs = 0);

/// Scoring variant used by the detection pipeline: a lattice point receives
/// each angle column's MEAN contribution instead of the sum. Every bin of a
/// column shares the image-parallel direction of that angle on its great
/// circle, so summed votes pile the whole column mass onto that direction (a
/// spurious ridge along the image-plane circle); averaging counts a pencil
/// of parallel lines as one vanishing event while leaving cross-column
/// evidence (true convergence) untouched. When `counts` is given it receives
/// the number of distinct bins contributing to each point: 1-2 along a lone
/// great circle, the family size where circles genuinely intersect.
SphereField accumulate_field_column_mean(const HoughGrid& grid, const MappingTable& table,
                                         const SphereLattice& lattice, unsigned jobs = 0,
                                         std::vector<std::uint32_t>* counts = nullptr);

/// Binary cache (magic "VPMT", little endian, CRC32 trailer).
void save_mapping(const MappingTable& table, const std::string& path);

/// Loads and validates a cache file. Throws CorruptCache for bad
/// magic/version/CRC and CacheMismatch when the stored configuration hashes
/// disagree with the requested ones.
MappingTable load_mapping(const std::string& path, const HoughParams& expected_params,
                          std::uint64_t expected_lattice_id, std::uint64_t expected_intrinsics_id,
                          std::uint32_t expected_m);

}  // namespace vpd
