#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fishsim/cmaes.hpp"
#include "fishsim/metrics.hpp"
#include "fishsim/qd.hpp"
#include "fishsim/sim.hpp"

namespace fishsim {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CoordinateUnit { Meters, Pixels };

/// m/px for the 1 m arena imaged at 500 px.
inline constexpr double kMetersPerPixel = 0.002;

/// CSV, one row per frame: step,x0,y0,...,x4,y4 in meters, 9 significant
/// digits, header row required.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);

struct LoadResult {
    Trajectory trajectory;
    std::size_t clamped_positions = 0;  // positions moved into the arena
};

LoadResult load_trajectory_csv(const std::string& path, CoordinateUnit unit,
                               const Arena& arena);

/// Genome CSV: one genome per line, 232 comma-separated decimals.
void save_genomes_csv(const std::vector<Genome>& genomes, const std::string& path);
std::vector<Genome> load_genomes_csv(const std::string& path);

/// One TSV per histogram (bin_left, bin_right, frequency), the presence
/// grid as a GxG CSV, and a manifest with the bin parameters.
void export_signature(const BehaviouralSignature& sig, const MetricsConfig& cfg,
                      const std::string& dir, const std::string& stem);

/// Archive CSV: comment header with config digest and centroid table, then
/// one record per filled niche.
void save_archive_csv(const Archive& archive, const std::string& digest,
                      const std::string& path);
Archive load_archive_csv(const std::string& path);

/// Niche scatter file: d0..d3, fitness per filled niche.
void export_archive_scatter(const Archive& archive, const std::string& path);

void save_qd_progress_csv(const std::vector<BatchRecord>& records,
                          const std::string& path);
void save_cma_history_csv(const std::vector<GenerationRecord>& records,
                          const std::string& path);

}  // namespace fishsim
