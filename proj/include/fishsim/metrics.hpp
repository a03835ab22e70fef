#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fishsim/sim.hpp"

namespace fishsim {

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform-bin normalized histogram. Out-of-range samples are clamped into
/// the end bins and counted, so unit mistakes upstream are detectable.
class Histogram {
  public:
    Histogram() = default;
    Histogram(double lo, double hi, int n_bins);

    void add(double sample);
    /// Normalizes frequencies to sum 1. Throws EmptySampleError if no samples.
    void normalize();

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int n_bins() const { return static_cast<int>(freq_.size()); }
    const std::vector<double>& frequencies() const { return freq_; }
    std::vector<double>& frequencies() { return freq_; }
    std::size_t sample_count() const { return count_; }
    std::size_t clamped_count() const { return clamped_; }
    double clamp_fraction() const {
        return count_ == 0 ? 0.0 : static_cast<double>(clamped_) / count_;
    }
    bool same_bins(const Histogram& other) const {
        return lo_ == other.lo_ && hi_ == other.hi_ && freq_.size() == other.freq_.size();
    }

  private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    std::vector<double> freq_;
    std::size_t count_ = 0;
    std::size_t clamped_ = 0;
};

/// G x G normalized occupancy grid over the arena square.
class PresenceGrid {
  public:
    PresenceGrid() = default;
    PresenceGrid(int grid_size, double side);

    void add(Vec2 position);
    void normalize();

    int grid_size() const { return grid_size_; }
    double side() const { return side_; }
    const std::vector<double>& cells() const { return cells_; }  // row-major
    std::vector<double>& cells() { return cells_; }
    std::size_t sample_count() const { return count_; }
    bool same_shape(const PresenceGrid& other) const {
        return grid_size_ == other.grid_size_ && side_ == other.side_;
    }

  private:
    int grid_size_ = 0;
    double side_ = 1.0;
    std::vector<double> cells_;
    std::size_t count_ = 0;
};

struct MetricsConfig {
    int bins_distance = 100;      // over [0, sqrt(2)*side]
    int bins_speed = 60;          // over [0, v_max]
    int bins_polarisation = 50;   // over [0, 1]
    int bins_angular = 60;        // over [-pi/dt, pi/dt]
    int bins_wall = 50;           // over [0, side/2]
    int grid_size = 25;
    double side = 1.0;
    double v_max = 0.35;
    double dt = 1.0 / 15.0;
};

/// The six per-trial distributions; fitness uses distance, speed,
/// polarisation and presence only.
struct BehaviouralSignature {
    Histogram distance;
    Histogram speed;
    Histogram polarisation;
    PresenceGrid presence;
    Histogram angular;  // informative only
    Histogram wall;     // informative only

    /// True when more than 5% of the samples of any fitness component were
    /// clamped into an end bin (usually a unit mistake).
    bool range_warning() const;
};

/// Magnitude of the mean unit-heading vector: 1 = aligned, 0 = cancelled.
double polarisation(const std::array<double, kNumAgents>& headings);

Histogram interindividual_distances(const Trajectory& traj, const MetricsConfig& cfg);
Histogram linear_speeds(const Trajectory& traj, const MetricsConfig& cfg);
Histogram angular_speeds(const Trajectory& traj, const MetricsConfig& cfg);
Histogram polarisation_series(const Trajectory& traj, const MetricsConfig& cfg);
PresenceGrid presence_grid(const Trajectory& traj, const MetricsConfig& cfg);
Histogram wall_distances(const Trajectory& traj, const MetricsConfig& cfg);

BehaviouralSignature compute_signature(const Trajectory& traj, const MetricsConfig& cfg);

double hellinger(const Histogram& x, const Histogram& y);
double hellinger(const PresenceGrid& x, const PresenceGrid& y);
double similarity(const Histogram& x, const Histogram& y);
double similarity(const PresenceGrid& x, const PresenceGrid& y);

/// Per-feature similarities against the control, ordered (D, L, P, E).
std::array<double, 4> feature_similarities(const BehaviouralSignature& sig,
                                           const BehaviouralSignature& control);

/// Geometric mean of the four feature similarities.
double biomimetism_score(const BehaviouralSignature& sig,
                         const BehaviouralSignature& control);

BehaviouralSignature aggregate_control(const std::vector<BehaviouralSignature>& sigs);

}  // namespace fishsim
