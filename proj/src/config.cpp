#include "fishsim/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fishsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text);

template <>
double parse_value<double>(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + text + "'");
    }
    if (pos != text.size()) {
        throw ConfigError("config: trailing characters for " + key + ": '" + text + "'");
    }
    return v;
}

template <>
int parse_value<int>(const std::string& key, const std::string& text) {
    const double v = parse_value<double>(key, text);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError("config: expected integer for " + key + ": '" + text + "'");
    }
    return i;
}

template <>
std::uint64_t parse_value<std::uint64_t>(const std::string& key,
                                         const std::string& text) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad unsigned integer for " + key + ": '" + text +
                          "'");
    }
}

template <>
std::string parse_value<std::string>(const std::string&, const std::string& text) {
    return text;
}

class KeyTable {
  public:
    template <typename T>
    void bind(const std::string& full_key, T* target) {
        setters_[full_key] = [target, full_key](const std::string& text) {
            *target = parse_value<T>(full_key, text);
        };
    }
    void apply(const std::string& full_key, const std::string& text) const {
        const auto it = setters_.find(full_key);
        if (it == setters_.end()) throw ConfigError("config: unknown key " + full_key);
        it->second(text);
    }

  private:
    std::map<std::string, std::function<void(const std::string&)>> setters_;
};

KeyTable make_table(ExperimentConfig& c) {
    KeyTable t;
    t.bind("sim.side", &c.arena.side);
    t.bind("sim.margin", &c.arena.margin);
    t.bind("sim.n_steps", &c.sim.n_steps);
    t.bind("sim.dt", &c.sim.dt);
    t.bind("sim.v_max", &c.sim.v_max);
    t.bind("sim.dv_max", &c.sim.dv_max);
    t.bind("sim.dw_max", &c.sim.dw_max);

    t.bind("metrics.bins_distance", &c.metrics.bins_distance);
    t.bind("metrics.bins_speed", &c.metrics.bins_speed);
    t.bind("metrics.bins_polarisation", &c.metrics.bins_polarisation);
    t.bind("metrics.bins_angular", &c.metrics.bins_angular);
    t.bind("metrics.bins_wall", &c.metrics.bins_wall);
    t.bind("metrics.grid_size", &c.metrics.grid_size);

    t.bind("qd.init_evals", &c.qd.init_evals);
    t.bind("qd.batches", &c.qd.batches);
    t.bind("qd.batch_size", &c.qd.batch_size);
    t.bind("qd.k", &c.qd.k);
    t.bind("qd.cvt_samples", &c.qd.cvt_samples);
    t.bind("qd.cvt_seed", &c.qd.cvt_seed);
    t.bind("qd.mutation_sigma", &c.qd.mutation_sigma);
    t.bind("qd.mutation_rate", &c.qd.mutation_rate);

    t.bind("cmaes.lambda", &c.cmaes.lambda);
    t.bind("cmaes.generations", &c.cmaes.generations);
    t.bind("cmaes.sigma0", &c.cmaes.sigma0);

    t.bind("control.n_trials", &c.control.n_trials);
    t.bind("control.speed_mean", &c.control.speed_mean);
    t.bind("control.speed_reversion", &c.control.speed_reversion);
    t.bind("control.speed_noise", &c.control.speed_noise);
    t.bind("control.wall_zone", &c.control.wall_zone);
    t.bind("control.weight_wall_tangent", &c.control.weight_wall_tangent);
    t.bind("control.weight_wall_attract", &c.control.weight_wall_attract);
    t.bind("control.weight_centroid", &c.control.weight_centroid);
    t.bind("control.weight_persistence", &c.control.weight_persistence);
    t.bind("control.heading_noise", &c.control.heading_noise);
    t.bind("control.max_turn", &c.control.max_turn);

    t.bind("experiment.n_trials", &c.n_trials);
    t.bind("experiment.master_seed", &c.master_seed);
    t.bind("experiment.workers", &c.workers);
    t.bind("experiment.out_dir", &c.out_dir);
    t.bind("experiment.control_dir", &c.control_dir);
    return t;
}

}  // namespace

void ExperimentConfig::sync_derived() {
    metrics.side = arena.side;
    metrics.v_max = sim.v_max;
    metrics.dt = sim.dt;
    cmaes.dim = kGenomeLength;
    qd.workers = workers;
    cmaes.workers = workers;
    if (arena.side <= 0.0 || arena.margin < 0.0 || arena.margin >= arena.side / 2.0) {
        throw ConfigError("config: invalid arena geometry");
    }
    if (sim.dt <= 0.0 || sim.n_steps < 2 || sim.v_max <= 0.0 || sim.dv_max <= 0.0 ||
        sim.dw_max <= 0.0) {
        throw ConfigError("config: invalid simulation parameters");
    }
    if (qd.init_evals < 1 || qd.batches < 0 || qd.batch_size < 1 || qd.k < 1) {
        throw ConfigError("config: invalid qd schedule");
    }
    if (cmaes.lambda < 2 || cmaes.generations < 1 || cmaes.sigma0 <= 0.0) {
        throw ConfigError("config: invalid cmaes schedule");
    }
}

void ExperimentConfig::apply_desk_scale() {
    sim.n_steps = 1800;
    qd.init_evals = 200;
    qd.batches = 40;
    qd.batch_size = 20;
    cmaes.lambda = 20;
    cmaes.generations = 50;  // same 1000-evaluation budget as qd
    n_trials = 5;
    control.n_trials = 5;
}

std::string ExperimentConfig::digest() const {
    std::ostringstream os;
    os.precision(17);
    os << arena.side << ' ' << arena.margin << ' ' << sim.n_steps << ' ' << sim.dt << ' '
       << sim.v_max << ' ' << sim.dv_max << ' ' << sim.dw_max << ' '
       << metrics.bins_distance << ' ' << metrics.bins_speed << ' '
       << metrics.bins_polarisation << ' ' << metrics.bins_angular << ' '
       << metrics.bins_wall << ' ' << metrics.grid_size << ' ' << qd.init_evals << ' '
       << qd.batches << ' ' << qd.batch_size << ' ' << qd.k << ' ' << qd.cvt_samples
       << ' ' << qd.cvt_seed << ' ' << qd.mutation_sigma << ' ' << qd.mutation_rate
       << ' ' << cmaes.lambda << ' ' << cmaes.generations << ' ' << cmaes.sigma0 << ' '
       << n_trials << ' ' << master_seed;
    const std::string canon = os.str();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig config;
    const KeyTable table = make_table(config);
    std::string line, section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config: malformed section at line " +
                                  std::to_string(line_no));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected key = value at line " +
                              std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            throw ConfigError("config: key outside any section at line " +
                              std::to_string(line_no));
        }
        table.apply(section + "." + key, value);
    }
    config.sync_derived();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    return parse_config(is);
}

}  // namespace fishsim
