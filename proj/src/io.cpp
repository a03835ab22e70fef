#include "fishsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fishsim {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[32];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot open for writing: " + path);
    return os;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    return out;
}

double parse_double(const std::string& text, const std::string& path, int line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || !std::isfinite(v)) throw std::invalid_argument("bad");
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(line_no) + ": bad value '" + text +
                        "'");
    }
}

}  // namespace

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    auto os = open_out(path);
    os << "step,x0,y0,x1,y1,x2,y2,x3,y3,x4,y4\n";
    for (std::size_t t = 0; t < traj.positions.size(); ++t) {
        os << t;
        for (const Vec2& p : traj.positions[t])
            os << ',' << fmt(p.x, "%.9g") << ',' << fmt(p.y, "%.9g");
        os << '\n';
    }
}

LoadResult load_trajectory_csv(const std::string& path, CoordinateUnit unit,
                               const Arena& arena) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open trajectory file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError(path + ": empty file");
    if (split(line, ',').size() != 2 * kNumAgents + 1) {
        throw DataError(path + ":1: bad header, expected 11 columns");
    }

    LoadResult result;
    result.trajectory.dt = 1.0 / 15.0;
    const double scale = unit == CoordinateUnit::Pixels ? kMetersPerPixel : 1.0;
    const double lo = arena.margin;
    const double hi = arena.side - arena.margin;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 2 * kNumAgents + 1) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(2 * kNumAgents + 1) + " columns, got " +
                            std::to_string(fields.size()));
        }
        std::array<Vec2, kNumAgents> row;
        for (int i = 0; i < kNumAgents; ++i) {
            double x = parse_double(fields[1 + 2 * i], path, line_no) * scale;
            double y = parse_double(fields[2 + 2 * i], path, line_no) * scale;
            const double cx = std::clamp(x, lo, hi);
            const double cy = std::clamp(y, lo, hi);
            if (cx != x || cy != y) ++result.clamped_positions;
            row[i] = {cx, cy};
        }
        result.trajectory.positions.push_back(row);
    }
    if (result.trajectory.positions.empty()) {
        throw DataError(path + ": no data rows");
    }
    return result;
}

void save_genomes_csv(const std::vector<Genome>& genomes, const std::string& path) {
    auto os = open_out(path);
    for (const Genome& g : genomes) {
        for (std::size_t i = 0; i < g.size(); ++i)
            os << (i ? "," : "") << fmt(g[i]);
        os << '\n';
    }
}

std::vector<Genome> load_genomes_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open genome file: " + path);
    std::vector<Genome> genomes;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != static_cast<std::size_t>(kGenomeLength)) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(kGenomeLength) + " genes, got " +
                            std::to_string(fields.size()));
        }
        Genome g;
        g.reserve(kGenomeLength);
        for (const auto& f : fields) g.push_back(parse_double(f, path, line_no));
        genomes.push_back(std::move(g));
    }
    return genomes;
}

namespace {

void export_histogram_tsv(const Histogram& h, const std::string& path) {
    auto os = open_out(path);
    os << "bin_left\tbin_right\tfrequency\n";
    const double width = (h.hi() - h.lo()) / h.n_bins();
    for (int i = 0; i < h.n_bins(); ++i) {
        os << fmt(h.lo() + i * width, "%.9g") << '\t'
           << fmt(h.lo() + (i + 1) * width, "%.9g") << '\t'
           << fmt(h.frequencies()[i]) << '\n';
    }
}

}  // namespace

void export_signature(const BehaviouralSignature& sig, const MetricsConfig& cfg,
                      const std::string& dir, const std::string& stem) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string base = (fs::path(dir) / stem).string();
    export_histogram_tsv(sig.distance, base + "_distance.tsv");
    export_histogram_tsv(sig.speed, base + "_speed.tsv");
    export_histogram_tsv(sig.polarisation, base + "_polarisation.tsv");
    export_histogram_tsv(sig.angular, base + "_angular.tsv");
    export_histogram_tsv(sig.wall, base + "_wall.tsv");

    auto grid = open_out(base + "_presence.csv");
    const int g = sig.presence.grid_size();
    for (int r = 0; r < g; ++r) {
        for (int c = 0; c < g; ++c)
            grid << (c ? "," : "") << fmt(sig.presence.cells()[r * g + c]);
        grid << '\n';
    }

    auto manifest = open_out(base + "_manifest.txt");
    manifest << "side " << fmt(cfg.side, "%.9g") << "\n"
             << "v_max " << fmt(cfg.v_max, "%.9g") << "\n"
             << "dt " << fmt(cfg.dt, "%.9g") << "\n"
             << "bins_distance " << cfg.bins_distance << "\n"
             << "bins_speed " << cfg.bins_speed << "\n"
             << "bins_polarisation " << cfg.bins_polarisation << "\n"
             << "bins_angular " << cfg.bins_angular << "\n"
             << "bins_wall " << cfg.bins_wall << "\n"
             << "grid_size " << cfg.grid_size << "\n";
}

void save_archive_csv(const Archive& archive, const std::string& digest,
                      const std::string& path) {
    auto os = open_out(path);
    os << "# config_digest " << digest << '\n';
    os << "# evaluations " << archive.evaluations << " insertions "
       << archive.insertions << " rejections " << archive.rejections << '\n';
    for (std::size_t i = 0; i < archive.centroids.size(); ++i) {
        os << "# centroid " << i;
        for (double v : archive.centroids[i]) os << ' ' << fmt(v);
        os << '\n';
    }
    os << "niche_id,fitness,d0,d1,d2,d3";
    for (int i = 0; i < kGenomeLength; ++i) os << ",g" << i;
    os << '\n';
    for (std::size_t i = 0; i < archive.niches.size(); ++i) {
        if (!archive.niches[i]) continue;
        const Elite& e = *archive.niches[i];
        os << i << ',' << fmt(e.fitness);
        for (double d : e.descriptor) os << ',' << fmt(d);
        for (double g : e.genome) os << ',' << fmt(g);
        os << '\n';
    }
}

Archive load_archive_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open archive file: " + path);
    Centroids centroids;
    std::string line;
    int line_no = 0;
    std::vector<std::pair<std::size_t, Elite>> elites;
    std::uint64_t evaluations = 0, insertions = 0, rejections = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tag;
            ls >> tag;
            if (tag == "centroid") {
                std::size_t idx;
                Descriptor c;
                if (!(ls >> idx >> c[0] >> c[1] >> c[2] >> c[3])) {
                    throw DataError(path + ":" + std::to_string(line_no) +
                                    ": bad centroid line");
                }
                centroids.push_back(c);
            } else if (tag == "evaluations") {
                std::string word;
                ls >> evaluations >> word >> insertions >> word >> rejections;
            }
            continue;
        }
        if (line.rfind("niche_id", 0) == 0) continue;  // column header
        const auto fields = split(line, ',');
        if (fields.size() != 6 + static_cast<std::size_t>(kGenomeLength)) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": bad elite record width");
        }
        Elite e;
        const std::size_t niche =
            static_cast<std::size_t>(parse_double(fields[0], path, line_no));
        e.fitness = parse_double(fields[1], path, line_no);
        for (int d = 0; d < 4; ++d)
            e.descriptor[d] = parse_double(fields[2 + d], path, line_no);
        e.genome.reserve(kGenomeLength);
        for (int g = 0; g < kGenomeLength; ++g)
            e.genome.push_back(parse_double(fields[6 + g], path, line_no));
        elites.emplace_back(niche, std::move(e));
    }
    if (centroids.empty()) throw DataError(path + ": no centroid table");
    Archive archive(std::move(centroids));
    for (auto& [niche, elite] : elites) {
        if (niche >= archive.niches.size()) {
            throw DataError(path + ": niche index out of range");
        }
        archive.niches[niche] = std::move(elite);
    }
    archive.evaluations = evaluations;
    archive.insertions = insertions;
    archive.rejections = rejections;
    return archive;
}

void export_archive_scatter(const Archive& archive, const std::string& path) {
    auto os = open_out(path);
    os << "d0,d1,d2,d3,fitness\n";
    for (const auto& slot : archive.niches) {
        if (!slot) continue;
        for (double d : slot->descriptor) os << fmt(d) << ',';
        os << fmt(slot->fitness) << '\n';
    }
}

void save_qd_progress_csv(const std::vector<BatchRecord>& records,
                          const std::string& path) {
    auto os = open_out(path);
    os << "batch,evals,filled,best_fitness,qd_score\n";
    for (const auto& r : records) {
        os << r.batch << ',' << r.evals << ',' << r.filled << ','
           << fmt(r.best_fitness) << ',' << fmt(r.qd_score) << '\n';
    }
}

void save_cma_history_csv(const std::vector<GenerationRecord>& records,
                          const std::string& path) {
    auto os = open_out(path);
    os << "generation,evals,best,median,sigma\n";
    for (const auto& r : records) {
        os << r.generation << ',' << r.evals << ',' << fmt(r.best) << ','
           << fmt(r.median) << ',' << fmt(r.sigma) << '\n';
    }
}

}  // namespace fishsim
