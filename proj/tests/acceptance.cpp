// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
//
//   1. Metric oracles vs brute-force scalar evaluation
//   2. Evaluation-budget identities for both optimizers
//   3. Archive invariants across seeded desk-scale QD runs
//   4. Self-recovery of a known ground-truth controller
//   5. CMA-ES sphere convergence and rank invariance
//   6. Method-comparison machinery (U, p, dominance)
//   7. Byte-identical archives when criterion 3 is repeated

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fishsim/cmaes.hpp"
#include "fishsim/config.hpp"
#include "fishsim/control_gen.hpp"
#include "fishsim/evaluator.hpp"
#include "fishsim/experiment.hpp"
#include "fishsim/io.hpp"
#include "fishsim/metrics.hpp"
#include "fishsim/qd.hpp"
#include "fishsim/stats.hpp"

using namespace fishsim;
namespace fs = std::filesystem;

namespace {

struct Gate {
    int failures = 0;

    void run(int number, const std::string& title, bool (*fn)(std::string&)) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("criterion %d  %-38s %s  (%.1f s)%s%s\n", number, title.c_str(),
                    ok ? "PASS" : "FAIL", secs, detail.empty() ? "" : "  -- ",
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "fishsim_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Histogram histogram_of(const std::vector<double>& freq) {
    Histogram h(0.0, 1.0, static_cast<int>(freq.size()));
    h.frequencies() = freq;
    return h;
}

std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = unit(rng);
        total += x;
    }
    for (double& x : v) x /= total;
    return v;
}

// Independent scalar re-evaluation of the Hellinger distance.
long double brute_hellinger(const std::vector<double>& x, const std::vector<double>& y) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double d =
            std::sqrt(static_cast<long double>(x[i])) - std::sqrt(static_cast<long double>(y[i]));
        acc += d * d;
    }
    return std::sqrt(acc) / std::sqrt(2.0L);
}

// ---------------------------------------------------------------- criterion 1

bool criterion_metric_oracles(std::string& detail) {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> bins(2, 120);

    for (int trial = 0; trial < 1000; ++trial) {
        const int n = bins(rng);
        const auto x = random_simplex(rng, n);
        const auto y = random_simplex(rng, n);
        const double got = hellinger(histogram_of(x), histogram_of(y));
        const double want = static_cast<double>(brute_hellinger(x, y));
        if (!close(got, want, 1e-12)) {
            detail = "hellinger mismatch at trial " + std::to_string(trial);
            return false;
        }
        if (!close(similarity(histogram_of(x), histogram_of(y)), 1.0 - want, 1e-12)) {
            detail = "similarity mismatch at trial " + std::to_string(trial);
            return false;
        }
    }

    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 1000; ++trial) {
        std::array<double, kNumAgents> headings;
        std::complex<long double> sum = 0.0L;
        for (double& h : headings) {
            h = angle(rng);
            sum += std::exp(std::complex<long double>(0.0L, h));
        }
        const double want = static_cast<double>(std::abs(sum)) / kNumAgents;
        if (!close(polarisation(headings), want, 1e-12)) {
            detail = "polarisation mismatch at trial " + std::to_string(trial);
            return false;
        }
    }

    for (int trial = 0; trial < 1000; ++trial) {
        BehaviouralSignature a, b;
        a.distance = histogram_of(random_simplex(rng, 100));
        b.distance = histogram_of(random_simplex(rng, 100));
        a.speed = histogram_of(random_simplex(rng, 60));
        b.speed = histogram_of(random_simplex(rng, 60));
        a.polarisation = histogram_of(random_simplex(rng, 50));
        b.polarisation = histogram_of(random_simplex(rng, 50));
        a.presence = PresenceGrid(25, 1.0);
        b.presence = PresenceGrid(25, 1.0);
        a.presence.cells() = random_simplex(rng, 625);
        b.presence.cells() = random_simplex(rng, 625);

        long double log_sum = 0.0L;
        log_sum += std::log(1.0L - brute_hellinger(a.distance.frequencies(),
                                                   b.distance.frequencies()));
        log_sum += std::log(1.0L - brute_hellinger(a.speed.frequencies(),
                                                   b.speed.frequencies()));
        log_sum += std::log(1.0L - brute_hellinger(a.polarisation.frequencies(),
                                                   b.polarisation.frequencies()));
        log_sum += std::log(1.0L - brute_hellinger(a.presence.cells(), b.presence.cells()));
        const double want = static_cast<double>(std::exp(log_sum / 4.0L));
        if (!close(biomimetism_score(a, b), want, 1e-12)) {
            detail = "biomimetism mismatch at trial " + std::to_string(trial);
            return false;
        }
    }

    const double worked = hellinger(histogram_of({0.5, 0.5}), histogram_of({1.0, 0.0}));
    if (!close(worked, 0.54120, 1e-5)) {
        detail = "worked example H((0.5,0.5),(1,0)) = " + std::to_string(worked);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- criterion 2

std::pair<double, Descriptor> stub_eval(const Genome& g) {
    double ss = 0.0;
    for (double v : g) ss += v * v;
    Descriptor d;
    for (int i = 0; i < 4; ++i) d[i] = std::clamp(0.5 + g[i] / 4.0, 0.0, 1.0);
    return {-ss, d};
}

bool criterion_budget_identities(std::string& detail) {
    const QdConfig paper_qd;
    const CmaConfig paper_cma;
    if (paper_qd.total_budget() != 60000 ||
        paper_qd.init_evals + paper_qd.batches * paper_qd.batch_size != 6000 + 450 * 120) {
        detail = "paper QD schedule does not total 60000";
        return false;
    }
    if (paper_cma.total_budget() != 60000 ||
        paper_cma.lambda * paper_cma.generations != 500 * 120) {
        detail = "paper CMA-ES schedule does not total 60000";
        return false;
    }

    // Proportionally shrunk schedules, counted for real with a stub objective.
    QdConfig qd;
    qd.init_evals = 200;
    qd.batches = 40;
    qd.batch_size = 20;
    qd.cvt_samples = 20000;
    const Archive archive = run_qd(qd, stub_eval);
    if (archive.evaluations != static_cast<std::uint64_t>(qd.total_budget()) ||
        archive.evaluations != 200 + 40 * 20) {
        detail = "QD counter " + std::to_string(archive.evaluations) + " != 1000";
        return false;
    }

    CmaConfig cma;
    cma.lambda = 20;
    cma.generations = 50;
    const CmaResult result =
        run_cmaes(cma, [](const Genome& g) { return stub_eval(g).first; });
    if (result.history.size() != 50 ||
        result.history.back().evals != static_cast<std::uint64_t>(cma.total_budget()) ||
        result.history.back().evals != 20 * 50) {
        detail = "CMA-ES counter != 1000";
        return false;
    }
    return true;
}

// ------------------------------------------------------- criteria 3, 4, 6, 7

ExperimentConfig desk_config() {
    ExperimentConfig cfg;
    cfg.apply_desk_scale();
    cfg.qd.cvt_samples = 20000;  // keep centroid construction off the clock
    cfg.sync_derived();
    return cfg;
}

EvaluationContext desk_context(const ExperimentConfig& cfg) {
    const auto trials = gen_control(cfg.control, cfg.sim, cfg.arena, cfg.master_seed);
    std::vector<BehaviouralSignature> sigs;
    for (const auto& t : trials) sigs.push_back(compute_signature(t, cfg.metrics));
    return make_context(cfg, aggregate_control(sigs));
}

Archive desk_qd_run(const ExperimentConfig& cfg, const EvaluationContext& ctx,
                    std::uint64_t seed, std::string& detail, bool& invariants_ok) {
    QdConfig qc = cfg.qd;
    qc.seed = seed;
    invariants_ok = true;

    std::size_t prev_filled = 0;
    std::vector<double> prev_fitness;
    const Archive archive = run_qd(
        qc,
        [&ctx](const Genome& g) {
            const Evaluation e = evaluate_genome(g, ctx);
            return std::make_pair(e.fitness, e.descriptor);
        },
        [&](const BatchRecord& r, const Archive& a) {
            if (r.filled > a.centroids.size() || r.filled < prev_filled)
                invariants_ok = false;
            prev_filled = r.filled;
            if (prev_fitness.empty()) prev_fitness.assign(a.niches.size(), -1.0);
            for (std::size_t n = 0; n < a.niches.size(); ++n) {
                if (!a.niches[n]) continue;
                if (a.niches[n]->fitness < prev_fitness[n]) invariants_ok = false;
                prev_fitness[n] = a.niches[n]->fitness;
            }
        });

    if (!invariants_ok) detail = "monotonicity violated at seed " + std::to_string(seed);
    for (std::size_t n = 0; n < archive.niches.size(); ++n) {
        if (archive.niches[n] &&
            assign_niche(archive.niches[n]->descriptor, archive.centroids) != n) {
            invariants_ok = false;
            detail = "descriptor re-assignment violated at seed " + std::to_string(seed);
        }
    }
    return archive;
}

void save_desk_archives(const std::string& tag, std::string& detail, bool& ok) {
    const ExperimentConfig cfg = desk_config();
    const EvaluationContext ctx = desk_context(cfg);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        bool run_ok = true;
        const Archive archive = desk_qd_run(cfg, ctx, seed, detail, run_ok);
        if (!run_ok) ok = false;
        const fs::path p =
            work_dir() / (tag + "_archive_" + std::to_string(seed) + ".csv");
        save_archive_csv(archive, cfg.digest(), p.string());
    }
}

bool criterion_archive_invariants(std::string& detail) {
    bool ok = true;
    save_desk_archives("first", detail, ok);
    return ok;
}

bool criterion_determinism(std::string& detail) {
    bool ok = true;
    save_desk_archives("second", detail, ok);
    if (!ok) return false;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::string name = "_archive_" + std::to_string(seed) + ".csv";
        if (read_bytes(work_dir() / ("first" + name)) !=
            read_bytes(work_dir() / ("second" + name))) {
            detail = "archive bytes differ at seed " + std::to_string(seed);
            return false;
        }
    }
    return true;
}

// Frozen ground-truth controller. Produced once by a seeded preliminary QD
// run against the synthetic control and frozen here; its wall-following
// behaviour makes the behavioural signature robust to the initial placement,
// which the cross-seed sub-check below requires.
const Genome kGroundTruthGenome = {
    1.2967530046021296, -0.035177952177793403, -0.16319468707740828, 1.5337911103774342,
    -1.0354087110739458, 0.16777616865082001, -1.0137880668482275, -0.29665506678414044,
    -1.0738305064799847, -0.52738187130854086, 0.15933324452871414, 1.7460975745075693,
    -2.7737686188826078, 1.6965336981626888, 0.55348904563000245, 1.0735766060767822,
    -0.85176458348062534, 0.28672559762545008, 0.059198370904268827, -0.59245795116466793,
    -0.43692784667443518, 0.41830893117985574, 0.017139961367598672, 1.5440603127144319,
    -0.33166130964556129, -0.40756404781118988, 1.2905124953327998, 0.99791571589972106,
    -0.38521236627437994, -0.57520753257624524, 0.45787471114117539, -2.021235264692697,
    -1.8358362226166152, -1.5666945265748407, 1.9711398909378297, 0.11976346429724381,
    -0.60455456682453823, 0.52506912234677949, 0.37356925275544911, 0.56623611797361106,
    0.45802504547101791, -0.20136587499057046, 0.02247869371489758, 0.76031112021970937,
    -0.31804016140614227, 0.085703315639993408, 0.17744367976991637, 0.47713973239787355,
    -0.29693412135593278, -1.0118861147789757, -0.089609590779203122, -0.10351198531883619,
    1.4108576327947939, -0.41894564314425797, -0.7056347040953389, -0.63592816651683293,
    0.13408188424642975, 0.10842438910301611, -0.89176941281527, 0.86724876540924312,
    -1.4940238168060609, 0.0088149102535591255, -0.21993003118207952, 0.62786345472235483,
    0.71736225812562715, 0.42909570173625666, -0.2644960767132809, 0.14364443533670232,
    -0.26982712827444272, 0.19778447648365288, -0.44259695737249755, -0.44246135782331064,
    0.59649671125749781, 0.61518776714719892, -0.08348661775544873, 0.92038104448580293,
    -0.35167715622748658, 0.54381745706982687, 0.34722081024589213, -1.4756011388370738,
    1.2521786725910793, 1.0314084417535712, 0.57594954965108058, -0.41951922007154208,
    -0.20036020168989893, 0.098648027608180158, -0.34679408205686535, 1.1391380060039666,
    -0.03144531321285466, 0.5782337173840385, 1.4630064849868964, 0.5376396766899515,
    0.17079545631236304, -0.76314575137583163, -0.89906140988359018, 0.60164478226776863,
    -1.4972947397889378, -1.5134161594261297, 1.619305592833179, 1.0018874020020945,
    -0.50724223478828456, 0.3856855986059311, 0.85785206816100179, 0.43674944746539063,
    1.5946935350112013, -1.4414723511764342, 0.53239137701591921, -0.19220559404124526,
    0.19911326437304469, -0.87760254347794775, -0.092264426211182998, 1.1295195150861841,
    -0.81918220443352396, 1.5845107776322345, -0.49946548111857547, 1.0896842835570184,
    -0.15717197267920457, 0.9672002147349601, -0.64622977411897276, 2.0011065839105062,
    0.785560864210195, 1.8231354184308783, -1.1051925078476779, 0.96324124353733831,
    -0.2338214786550174, 0.029800678189689234, -0.64863599228199265, 0.62386081238201196,
    -0.48592079023979423, 0.96328807891550783, 0.40930642916803023, 0.013984621610220821,
    -1.8677327224749185, 1.9692442112383428, -0.62250977521435114, 1.7595504802190862,
    0.1744252987389418, -0.18087520200439011, 0.34401558667972604, -0.77377039644350765,
    1.1904847852989466, -1.5920876601478327, 0.14313826922731876, 0.98567983880737287,
    -0.51824262945880117, 1.4637474747020278, -1.1237135600062902, -0.35987468427342867,
    -0.72796670956436194, -0.10629535656698796, 0.060326481767567663, -0.07902045163057414,
    -1.9503598902287087, 0.89940692496294983, -0.22037506929712297, -0.64840568152324929,
    -0.55753672514304464, 1.1901919466476243, -1.7804872950271757, -1.7427743091988375,
    1.542496493965571, -1.0576737634287261, 1.1217124852699192, 0.076295416568764582,
    0.89760396614637905, 1.0783749095298119, -0.036750389878708149, -0.23866907014134686,
    0.53467850225452684, -0.47153577735744306, 1.257776711180306, -1.3800193192679153,
    -1.7861002692746144, 0.53638853288432209, 0.56025448047558679, -2.2820793988311578,
    -0.19044193712595264, -0.15011935332010812, -1.4627036075785973, 2.2097191178315709,
    1.3604005342195677, -0.20772865215746572, 0.73908095866639145, -1.8176885462017813,
    -1.237932720458796, 0.36598368214222826, 0.74482460325522915, 0.60777181205360042,
    -0.051610743918065749, 2.2550585057317143, 1.5246867274403053, -1.4763309065797581,
    1.4793044868536909, 1.2223536430674118, -0.40251147624202271, 1.230897896101895,
    -0.81398181917824519, 1.7014907924482423, -0.97987038288280648, -0.75588368034038667,
    0.38112436623128876, -0.22136713767597543, -0.78861715988103942, -1.5526977357384457,
    -1.4955782728728972, -0.88859589236498093, -1.095252262260608, -0.73242329410803197,
    0.27238839315645114, 0.71582002934712841, 0.66019130931764325, 0.17826693767166232,
    0.57473740799370232, -0.27956664123255903, -0.80456279587125201, 1.7118035596937475,
    0.62569796678283174, 0.56243087460440266, -0.87832258850419909, 1.5657290590388215,
    0.27196684165534835, 1.3317809069182873, 1.2448932798334649, -0.31441539167679305,
    0.18679472818016957, -0.26230270550256213, -2.4806460494231213, -1.2429606909743125,
    1.098916468995113, -0.46154871595707486, 0.99128600845503179, -0.45818317098234129};

bool criterion_self_recovery(std::string& detail) {
    ExperimentConfig cfg = desk_config();
    // Longer trials than the optimizer uses, so histogram sampling noise
    // stays well below the 0.10 cross-seed allowance.
    cfg.sim.n_steps = 9000;
    const Genome& g_star = kGroundTruthGenome;

    const MlpParams controller = decode(g_star);
    SimulationConfig own = cfg.sim;
    own.seed = derive_sim_seed(cfg.master_seed, g_star);
    const BehaviouralSignature own_control =
        compute_signature(simulate(controller, own, cfg.arena), cfg.metrics);

    EvaluationContext ctx = make_context(cfg, own_control);
    const Evaluation self = evaluate_genome(g_star, ctx);
    if (self.fitness != 1.0) {
        detail = "own-seed fitness " + std::to_string(self.fitness) + " != 1";
        return false;
    }

    std::vector<BehaviouralSignature> other_sigs;
    for (std::uint64_t i = 0; i < 5; ++i) {
        SimulationConfig other = cfg.sim;
        other.seed = own.seed + 1 + i;
        other_sigs.push_back(
            compute_signature(simulate(controller, other, cfg.arena), cfg.metrics));
    }
    EvaluationContext cross_ctx = make_context(cfg, aggregate_control(other_sigs));
    const Evaluation cross = evaluate_genome(g_star, cross_ctx);
    if (cross.fitness < 0.90) {
        detail = "other-seed fitness " + std::to_string(cross.fitness) + " < 0.90";
        return false;
    }

    int recovered = 0;
    double worst = 1.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        QdConfig qc = cfg.qd;  // desk schedule: 200 + 40 x 20 = 1000 evaluations
        qc.seed = seed;
        const Archive archive = run_qd(qc, [&ctx](const Genome& g) {
            const Evaluation e = evaluate_genome(g, ctx);
            return std::make_pair(e.fitness, e.descriptor);
        });
        worst = std::min(worst, archive.best_fitness());
        if (archive.best_fitness() >= 0.70) ++recovered;
    }
    if (recovered < 4) {
        detail = "recovered " + std::to_string(recovered) + "/5 seeds (worst " +
                 std::to_string(worst) + ")";
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- criterion 5

double neg_sphere(const std::vector<double>& x) {
    double ss = 0.0;
    for (double v : x) ss += (v - 1.0) * (v - 1.0);
    return -ss;
}

bool criterion_cmaes_sanity(std::string& detail) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CmaState state(10, 0.5, seed);
        double best = std::numeric_limits<double>::infinity();
        for (int gen = 0; gen < 200 && best >= 1e-6; ++gen) {
            const auto pop = state.ask(20);
            std::vector<double> fit(pop.size());
            for (std::size_t i = 0; i < pop.size(); ++i) {
                fit[i] = neg_sphere(pop[i]);
                best = std::min(best, -fit[i]);
            }
            state.tell(pop, fit);
        }
        if (best >= 1e-6) {
            detail = "seed " + std::to_string(seed) + " stalled at " + std::to_string(best);
            return false;
        }
    }

    CmaState a(12, 0.4, 17), b(12, 0.4, 17);
    for (int gen = 0; gen < 20; ++gen) {
        const auto pop = a.ask(24);
        if (b.ask(24) != pop) {
            detail = "populations diverged before the transform test";
            return false;
        }
        std::vector<double> fit(pop.size()), warped(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) {
            fit[i] = neg_sphere(pop[i]);
            warped[i] = std::exp(0.3 * fit[i]) + 7.0;  // strictly increasing
        }
        a.tell(pop, fit);
        b.tell(pop, warped);
        if (a.sigma() != b.sigma() || a.mean() != b.mean()) {
            detail = "rank invariance broke at generation " + std::to_string(gen);
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_comparison(std::string& detail) {
    const auto reference = mann_whitney_u({1, 2}, {3, 4});
    if (!reference.exact || !close(reference.p_value, 1.0 / 3.0, 1e-12)) {
        detail = "reference case p != 1/3";
        return false;
    }

    ExperimentConfig cfg = desk_config();
    cfg.out_dir = (work_dir() / "comparison").string();
    const ExperimentResult result = run_experiment(cfg);
    if (result.records.size() != 10) {
        detail = std::to_string(result.records.size()) + " trial records, expected 10";
        return false;
    }
    const MannWhitneyResult& test = result.report.test;
    if (!(test.u >= 0.0 && test.u <= 25.0 / 2.0) ||
        !(test.p_value >= 0.0 && test.p_value <= 1.0)) {
        detail = "invalid U or p";
        return false;
    }
    if (result.report.text.find("Mann-Whitney U=") == std::string::npos ||
        result.report.text.find("dominance") == std::string::npos) {
        detail = "report text missing U/p or dominance line";
        return false;
    }
    // The paper's directional claim (QD > CMA-ES) is expected but not gating
    // at desk scale; record it for the log.
    detail = std::string("QD dominates: ") + (result.report.qd_dominates ? "yes" : "no") +
             ", p=" + std::to_string(test.p_value);
    return true;
}

}  // namespace

int main() {
    Gate gate;
    gate.run(1, "metric oracles", criterion_metric_oracles);
    gate.run(2, "budget identities", criterion_budget_identities);
    gate.run(3, "archive invariants", criterion_archive_invariants);
    gate.run(4, "self-recovery", criterion_self_recovery);
    gate.run(5, "CMA-ES sanity", criterion_cmaes_sanity);
    gate.run(6, "method comparison", criterion_comparison);
    gate.run(7, "determinism", criterion_determinism);
    if (gate.failures == 0) {
        std::puts("all acceptance criteria passed");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", gate.failures);
    return 1;
}
