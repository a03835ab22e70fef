#include "fishsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fishsim {

Histogram::Histogram(double lo, double hi, int n_bins) : lo_(lo), hi_(hi) {
    if (!(hi > lo) || n_bins < 1) {
        throw std::invalid_argument("Histogram: invalid range or bin count");
    }
    freq_.assign(n_bins, 0.0);
}

void Histogram::add(double sample) {
    if (!std::isfinite(sample)) {
        throw std::invalid_argument("Histogram: non-finite sample");
    }
    const int n = n_bins();
    int idx = static_cast<int>(std::floor((sample - lo_) / (hi_ - lo_) * n));
    if (sample < lo_ || sample > hi_) ++clamped_;
    idx = std::clamp(idx, 0, n - 1);
    freq_[idx] += 1.0;
    ++count_;
}

void Histogram::normalize() {
    if (count_ == 0) throw EmptySampleError("Histogram: no samples to normalize");
    double total = 0.0;
    for (double f : freq_) total += f;
    for (double& f : freq_) f /= total;
}

PresenceGrid::PresenceGrid(int grid_size, double side)
    : grid_size_(grid_size), side_(side) {
    if (grid_size < 1 || !(side > 0.0)) {
        throw std::invalid_argument("PresenceGrid: invalid shape");
    }
    cells_.assign(static_cast<std::size_t>(grid_size) * grid_size, 0.0);
}

void PresenceGrid::add(Vec2 p) {
    const int gx = std::clamp(static_cast<int>(std::floor(p.x / side_ * grid_size_)), 0,
                              grid_size_ - 1);
    const int gy = std::clamp(static_cast<int>(std::floor(p.y / side_ * grid_size_)), 0,
                              grid_size_ - 1);
    cells_[static_cast<std::size_t>(gy) * grid_size_ + gx] += 1.0;
    ++count_;
}

void PresenceGrid::normalize() {
    if (count_ == 0) throw EmptySampleError("PresenceGrid: no samples");
    for (double& c : cells_) c /= static_cast<double>(count_);
}

Histogram interindividual_distances(const Trajectory& traj, const MetricsConfig& cfg) {
    if (traj.positions.empty()) {
        throw EmptySampleError("interindividual_distances: empty trajectory");
    }
    Histogram h(0.0, std::sqrt(2.0) * cfg.side, cfg.bins_distance);
    for (const auto& row : traj.positions)
        for (int i = 0; i < kNumAgents; ++i)
            for (int j = i + 1; j < kNumAgents; ++j) h.add(norm(row[i] - row[j]));
    h.normalize();
    return h;
}

Histogram linear_speeds(const Trajectory& traj, const MetricsConfig& cfg) {
    if (traj.positions.size() < 2) {
        throw EmptySampleError("linear_speeds: need at least 2 steps");
    }
    Histogram h(0.0, cfg.v_max, cfg.bins_speed);
    for (const auto& row : traj.derived_speeds())
        for (double s : row) h.add(s);
    h.normalize();
    return h;
}

Histogram angular_speeds(const Trajectory& traj, const MetricsConfig& cfg) {
    if (traj.positions.size() < 3) {
        throw EmptySampleError("angular_speeds: need at least 3 steps");
    }
    const double bound = kPi / traj.dt;
    Histogram h(-bound, bound, cfg.bins_angular);
    const auto headings = traj.derived_headings();
    for (std::size_t t = 1; t < headings.size(); ++t)
        for (int i = 0; i < kNumAgents; ++i)
            h.add(wrap_angle(headings[t][i] - headings[t - 1][i]) / traj.dt);
    h.normalize();
    return h;
}

double polarisation(const std::array<double, kNumAgents>& headings) {
    double sx = 0.0, sy = 0.0;
    for (double theta : headings) {
        sx += std::cos(theta);
        sy += std::sin(theta);
    }
    return std::hypot(sx, sy) / kNumAgents;
}

Histogram polarisation_series(const Trajectory& traj, const MetricsConfig& cfg) {
    if (traj.positions.size() < 2) {
        throw EmptySampleError("polarisation_series: need at least 2 steps");
    }
    Histogram h(0.0, 1.0, cfg.bins_polarisation);
    for (const auto& row : traj.derived_headings()) h.add(polarisation(row));
    h.normalize();
    return h;
}

PresenceGrid presence_grid(const Trajectory& traj, const MetricsConfig& cfg) {
    PresenceGrid grid(cfg.grid_size, cfg.side);
    for (const auto& row : traj.positions)
        for (const Vec2& p : row) grid.add(p);
    grid.normalize();
    return grid;
}

Histogram wall_distances(const Trajectory& traj, const MetricsConfig& cfg) {
    if (traj.positions.empty()) {
        throw EmptySampleError("wall_distances: empty trajectory");
    }
    Histogram h(0.0, cfg.side / 2.0, cfg.bins_wall);
    for (const auto& row : traj.positions)
        for (const Vec2& p : row)
            h.add(std::min({p.x, cfg.side - p.x, p.y, cfg.side - p.y}));
    h.normalize();
    return h;
}

BehaviouralSignature compute_signature(const Trajectory& traj,
                                       const MetricsConfig& cfg) {
    BehaviouralSignature sig;
    sig.distance = interindividual_distances(traj, cfg);
    sig.speed = linear_speeds(traj, cfg);
    sig.polarisation = polarisation_series(traj, cfg);
    sig.presence = presence_grid(traj, cfg);
    sig.angular = angular_speeds(traj, cfg);
    sig.wall = wall_distances(traj, cfg);
    return sig;
}

bool BehaviouralSignature::range_warning() const {
    return distance.clamp_fraction() > 0.05 || speed.clamp_fraction() > 0.05 ||
           polarisation.clamp_fraction() > 0.05;
}

namespace {

double hellinger_flat(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = std::sqrt(x[i]) - std::sqrt(y[i]);
        acc += d * d;
    }
    return std::min(1.0, std::sqrt(acc / 2.0));
}

}  // namespace

double hellinger(const Histogram& x, const Histogram& y) {
    if (!x.same_bins(y)) throw ShapeError("hellinger: histogram bin mismatch");
    return hellinger_flat(x.frequencies(), y.frequencies());
}

double hellinger(const PresenceGrid& x, const PresenceGrid& y) {
    if (!x.same_shape(y)) throw ShapeError("hellinger: grid shape mismatch");
    return hellinger_flat(x.cells(), y.cells());
}

double similarity(const Histogram& x, const Histogram& y) {
    return 1.0 - hellinger(x, y);
}

double similarity(const PresenceGrid& x, const PresenceGrid& y) {
    return 1.0 - hellinger(x, y);
}

std::array<double, 4> feature_similarities(const BehaviouralSignature& sig,
                                           const BehaviouralSignature& control) {
    return {similarity(sig.distance, control.distance),
            similarity(sig.speed, control.speed),
            similarity(sig.polarisation, control.polarisation),
            similarity(sig.presence, control.presence)};
}

double biomimetism_score(const BehaviouralSignature& sig,
                         const BehaviouralSignature& control) {
    const auto s = feature_similarities(sig, control);
    return std::pow(s[0] * s[1] * s[2] * s[3], 0.25);
}

namespace {

Histogram mean_histogram(const std::vector<BehaviouralSignature>& sigs,
                         const Histogram BehaviouralSignature::*member) {
    Histogram out = sigs.front().*member;
    for (std::size_t k = 1; k < sigs.size(); ++k) {
        const Histogram& h = sigs[k].*member;
        if (!out.same_bins(h)) throw ShapeError("aggregate_control: bin mismatch");
        for (int i = 0; i < out.n_bins(); ++i)
            out.frequencies()[i] += h.frequencies()[i];
    }
    double total = 0.0;
    for (double f : out.frequencies()) total += f;
    for (double& f : out.frequencies()) f /= total;
    return out;
}

}  // namespace

BehaviouralSignature aggregate_control(const std::vector<BehaviouralSignature>& sigs) {
    if (sigs.empty()) throw std::invalid_argument("aggregate_control: no signatures");
    BehaviouralSignature out;
    out.distance = mean_histogram(sigs, &BehaviouralSignature::distance);
    out.speed = mean_histogram(sigs, &BehaviouralSignature::speed);
    out.polarisation = mean_histogram(sigs, &BehaviouralSignature::polarisation);
    out.angular = mean_histogram(sigs, &BehaviouralSignature::angular);
    out.wall = mean_histogram(sigs, &BehaviouralSignature::wall);
    out.presence = sigs.front().presence;
    for (std::size_t k = 1; k < sigs.size(); ++k) {
        const PresenceGrid& g = sigs[k].presence;
        if (!out.presence.same_shape(g))
            throw ShapeError("aggregate_control: grid mismatch");
        for (std::size_t i = 0; i < out.presence.cells().size(); ++i)
            out.presence.cells()[i] += g.cells()[i];
    }
    double total = 0.0;
    for (double c : out.presence.cells()) total += c;
    for (double& c : out.presence.cells()) c /= total;
    return out;
}

}  // namespace fishsim
