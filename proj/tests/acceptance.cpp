// Acceptance gate: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lect/alignment.hpp"
#include "lect/datagen.hpp"
#include "lect/ect.hpp"
#include "lect/experiments.hpp"
#include "lect/parallel.hpp"
#include "lect/pipeline.hpp"
#include "oracles.hpp"

using namespace lect;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

// Random complexes with at most 30 simplices in R^2 or R^3. Odd-numbered
// members are snapped to a 0.25 lattice so heights tie with thresholds.
std::vector<GeometricComplex> corpus(std::size_t count, std::uint64_t seed)
{
    std::vector<GeometricComplex> out;
    auto rng = make_rng(seed);
    std::uint64_t draw = 0;
    while (out.size() < count) {
        const int n = 2 + static_cast<int>(out.size() % 2);
        const int vertices = std::uniform_int_distribution<int>(1, 8)(rng);
        const int max_dim = std::uniform_int_distribution<int>(0, std::min(3, vertices - 1))(rng);
        const double density = std::uniform_real_distribution<double>(0.1, 0.7)(rng);
        GeometricComplex x = gen_random_complex(vertices, max_dim, density, n, seed * 1000003 + draw++);
        if (x.total_simplices() > 30) continue;
        if (out.size() % 4 >= 2) {
            Points snapped = (x.vertices() * 4.0).array().round() / 4.0;
            std::set<std::vector<double>> seen;
            bool distinct = true;
            for (Eigen::Index r = 0; r < snapped.rows(); ++r) {
                distinct &= seen.insert(std::vector<double>(snapped.row(r).data(), snapped.row(r).data() + n)).second;
            }
            if (!distinct) continue;
            x = x.with_vertices(std::move(snapped));
        }
        out.push_back(std::move(x));
    }
    return out;
}

// Random unit directions plus the coordinate axes.
SamplingGrid tie_grid(int n, double lower, double upper, int l, std::uint64_t seed)
{
    const SamplingGrid random = make_grid(n, 12, 2, -1.0, 1.0, seed);
    Eigen::MatrixXd dirs(12 + n, n);
    dirs.topRows(12) = random.directions();
    dirs.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
    return SamplingGrid(dirs, lower, upper, l, seed);
}

GeometricComplex unit_normalized(const GeometricComplex& x)
{
    Points p = x.vertices().rowwise() - x.vertices().colwise().mean();
    const double r = p.rowwise().norm().maxCoeff();
    if (r > 0.0) p /= r;
    return x.with_vertices(std::move(p));
}

Outcome criterion1()
{
    const auto start = std::chrono::steady_clock::now();
    const auto complexes = corpus(500, 1);
    std::size_t cells = 0, mismatches = 0;
    for (std::size_t c = 0; c < complexes.size(); ++c) {
        const auto& x = complexes[c];
        const SamplingGrid grid = tie_grid(x.ambient_dim(), -2.0, 2.0, 17, c);
        const Eigen::MatrixXd got = ect_hard_values(SimplexTable::from(x), grid);
        const Eigen::MatrixXd want = oracle::ect(x, grid.directions(), grid.thresholds());
        cells += static_cast<std::size_t>(got.size());
        mismatches += static_cast<std::size_t>((got.array() != want.array()).count());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && seconds < 10.0,
            std::to_string(cells) + " cells, " + std::to_string(mismatches) + " mismatches, " + fmt(seconds) + " s"};
}

Outcome criterion2()
{
    const auto complexes = corpus(500, 1);
    std::size_t rows = 0, bad = 0;
    for (std::size_t c = 0; c < complexes.size(); ++c) {
        const auto& x = complexes[c];
        const SamplingGrid grid = tie_grid(x.ambient_dim(), -2.0, 2.0, 17, c);
        const Eigen::MatrixXd values = ect_hard_values(SimplexTable::from(x), grid);
        const double chi = static_cast<double>(oracle::euler(x));
        if (chi != static_cast<double>(euler_characteristic(x))) ++bad;
        for (Eigen::Index i = 0; i < values.rows(); ++i, ++rows) bad += values(i, values.cols() - 1) != chi;
    }
    return {bad == 0, std::to_string(rows) + " rows, " + std::to_string(bad) + " off chi"};
}

Outcome criterion3()
{
    const auto complexes = corpus(500, 1);
    constexpr double lambda = 500.0, gap = 0.05;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t c = 0; c < complexes.size(); ++c) {
        const GeometricComplex x = unit_normalized(complexes[c]);
        const SamplingGrid grid = make_grid(x.ambient_dim(), 16, 33, -1.0, 1.0, c);
        const auto table = SimplexTable::from(x);
        const Eigen::MatrixXd smooth = ect_smooth_values(table, grid, lambda);
        const Eigen::MatrixXd hard = ect_hard_values(table, grid);
        const auto cells = oracle::all_simplices(x);
        for (int i = 0; i < grid.num_directions(); ++i) {
            const Eigen::VectorXd v = grid.directions().row(i).transpose();
            for (int j = 0; j < grid.num_thresholds(); ++j) {
                const double t = grid.thresholds()[static_cast<std::size_t>(j)];
                bool clear = true;
                for (const auto& cell : cells) clear &= std::abs(t - oracle::height(x, cell, v)) >= gap;
                if (!clear) continue;
                ++checked;
                worst = std::max(worst, std::abs(smooth(i, j) - hard(i, j)));
            }
        }
    }
    return {checked > 0 && worst <= 1e-6, std::to_string(checked) + " entries, max |smooth - hard| = " + fmt(worst)};
}

Outcome criterion4()
{
    auto rng = make_rng(4);
    double worst = 0.0;
    int points = 0;
    for (int trial = 0; trial < 100; ++trial, ++points) {
        const int n = 2 + trial % 2;
        const GeometricComplex fixed = unit_normalized(gen_random_complex(6, 2, 0.4, n, 400 + trial));
        const GeometricComplex moving = rotate(fixed, RotationParams::random(n, rng, 1.0));
        const SamplingGrid grid = make_grid(n, 16, 24, -1.0, 1.0, trial);
        const AlignmentObjective objective(fixed, moving, grid, 100.0);
        const RotationParams at = RotationParams::random(n, rng, std::numbers::pi);
        Eigen::VectorXd grad;
        objective.value_and_gradient(at, grad);
        const Eigen::VectorXd fd = oracle::central_difference(
            [&](const Eigen::VectorXd& p) { return objective.value({n, p}); }, at.skew, 1e-5);
        const double scale = std::max({grad.norm(), fd.norm(), 1e-12});
        worst = std::max(worst, (grad - fd).norm() / scale);
    }
    return {worst <= 1e-4, std::to_string(points) + " points, max relative error " + fmt(worst)};
}

Outcome criterion5()
{
    const auto start = std::chrono::steady_clock::now();
    ReproConfig c = ReproConfig::defaults("kstar-align");
    c.trials = 50;
    const Json report = run_repro(c);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = seconds <= 300.0;
    std::string detail;
    for (const auto& entry : report["results"]["per_k"]) {
        const double pre = entry["median_hausdorff_pre"], post = entry["median_hausdorff_post"];
        ok &= post <= 0.05 && pre > post;
        detail += "k=" + std::to_string(entry["k"].get<int>()) + " pre " + fmt(pre) + " post " + fmt(post) + "; ";
    }
    return {ok, detail + fmt(seconds) + " s"};
}

Outcome criterion6()
{
    ReproConfig c = ReproConfig::defaults("wedge-align");
    c.trials = 30;
    c.points_per_sphere = 500;
    const Json r = run_repro(c)["results"];
    const double ratio = r["loss_ratio"];
    return {ratio <= 0.1, "median loss aligned " + fmt(r["median_loss_aligned_l2sq"]) + " vs identity " +
                              fmt(r["median_loss_identity_l2sq"]) + ", ratio " + fmt(ratio)};
}

Outcome criterion7()
{
    bool ok = true;
    std::string detail;
    for (const auto& [noise, outliers] : {std::pair{0.0, 0.1}, std::pair{0.02, 0.0}}) {
        ReproConfig c = ReproConfig::defaults("wedge-align");
        c.trials = 50;
        c.points_per_sphere = 200;
        c.noise_sigma = noise;
        c.outlier_fraction = outliers;
        const Json r = run_repro(c)["results"];
        const double ratio = r["hausdorff_ratio"];
        ok &= ratio <= 0.25;
        detail += (noise > 0 ? "noise 0.02: " : "10% outliers: ") + fmt(r["median_hausdorff_post"]) + " / " +
                  fmt(r["median_hausdorff_pre"]) + " = " + fmt(ratio) + "; ";
    }
    return {ok, detail};
}

FeaturedGraph random_graph(int nodes, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    Points f(nodes, 2);
    for (int i = 0; i < nodes; ++i) f.row(i) << coord(rng), coord(rng);
    std::vector<std::pair<Index, Index>> edges;
    std::bernoulli_distribution keep(0.4);
    for (int u = 0; u < nodes; ++u) {
        for (int v = u + 1; v < nodes; ++v) {
            if (keep(rng)) edges.emplace_back(u, v);
        }
    }
    return FeaturedGraph(std::move(f), std::move(edges));
}

Outcome criterion8()
{
    auto rng = make_rng(8);
    const SamplingGrid grid = make_grid(2, 64, 64, -1.5, 1.5, 8);
    int agree = 0, oracle_agree = 0, isomorphic = 0;
    constexpr int pairs = 200;
    for (int p = 0; p < pairs; ++p) {
        const int nodes = std::uniform_int_distribution<int>(2, 8)(rng);
        const FeaturedGraph g1 = random_graph(nodes, rng);
        FeaturedGraph g2;
        switch (p % 4) {
            case 0: {  // relabeled copy
                std::vector<Index> perm(static_cast<std::size_t>(nodes));
                std::iota(perm.begin(), perm.end(), Index{0});
                std::shuffle(perm.begin(), perm.end(), rng);
                Points f(nodes, 2);
                for (int i = 0; i < nodes; ++i) f.row(perm[static_cast<std::size_t>(i)]) = g1.features.row(i);
                std::vector<std::pair<Index, Index>> edges;
                for (auto [u, v] : g1.edges) edges.emplace_back(perm[u], perm[v]);
                g2 = FeaturedGraph(std::move(f), std::move(edges));
                break;
            }
            case 1: {  // one edge moved (or added when there is nothing to move)
                std::set<std::pair<Index, Index>> present(g1.edges.begin(), g1.edges.end());
                std::vector<std::pair<Index, Index>> absent;
                for (int u = 0; u < nodes; ++u) {
                    for (int v = u + 1; v < nodes; ++v) {
                        if (!present.count({u, v})) absent.emplace_back(u, v);
                    }
                }
                auto edges = g1.edges;
                if (!edges.empty() && !absent.empty()) {
                    edges.erase(edges.begin() + std::uniform_int_distribution<long>(0, static_cast<long>(edges.size()) - 1)(rng));
                }
                if (!absent.empty()) {
                    edges.push_back(absent[std::uniform_int_distribution<std::size_t>(0, absent.size() - 1)(rng)]);
                } else {
                    edges.pop_back();
                }
                g2 = FeaturedGraph(g1.features, std::move(edges));
                break;
            }
            case 2: {  // one feature moved by at least 0.2
                Points f = g1.features;
                const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
                const double length = std::uniform_real_distribution<double>(0.2, 0.5)(rng);
                f.row(std::uniform_int_distribution<int>(0, nodes - 1)(rng)) +=
                    length * Eigen::RowVector2d(std::cos(angle), std::sin(angle));
                g2 = FeaturedGraph(std::move(f), g1.edges);
                break;
            }
            default:
                g2 = random_graph(nodes, rng);
        }
        const DistinguishReport r = check_distinguishes_t2(g1, g2, grid);
        agree += r.holds();
        oracle_agree += r.isomorphic == oracle::isomorphic(g1, g2);
        isomorphic += r.isomorphic;
    }
    return {agree == pairs && oracle_agree == pairs,
            std::to_string(agree) + "/" + std::to_string(pairs) + " pairs agree (" + std::to_string(isomorphic) +
                " isomorphic); isomorphism search matches brute force on " + std::to_string(oracle_agree)};
}

// A patch drawn on the lattice is only recoverable up to its underlying
// point set: an edge through a lattice point has the same ECT as the path
// subdivided there, and a degree-2 vertex between two collinear edges can be
// merged away. Patches are therefore drawn with no lattice point inside a
// patch edge and no three collinear patch vertices.
bool general_position(const std::vector<int>& sites, int degree, const std::vector<std::pair<Index, Index>>& edges)
{
    auto xy = [&](Index i) { return std::pair{sites[i] / 4, sites[i] % 4}; };
    for (auto [u, v] : edges) {
        if (static_cast<int>(v) > degree) continue;
        const auto [x1, y1] = xy(u);
        const auto [x2, y2] = xy(v);
        if (std::gcd(std::abs(x2 - x1), std::abs(y2 - y1)) > 1) return false;
    }
    for (int a = 0; a <= degree; ++a) {
        for (int b = a + 1; b <= degree; ++b) {
            for (int c = b + 1; c <= degree; ++c) {
                const auto [xa, ya] = xy(a);
                const auto [xb, yb] = xy(b);
                const auto [xc, yc] = xy(c);
                if ((xb - xa) * (yc - ya) - (yb - ya) * (xc - xa) == 0) return false;
            }
        }
    }
    return true;
}

Outcome criterion9()
{
    auto rng = make_rng(9);
    const LatticeSpec lattice;  // 4 x 4, spacing 1/3
    const SamplingGrid grid = make_grid(2, 64, 64, -1.0, 1.0, 9);
    auto site = [&](int p) {
        return Eigen::RowVector2d((p / 4 - 1.5) * lattice.spacing, (p % 4 - 1.5) * lattice.spacing);
    };
    int unique = 0;
    std::uint64_t candidates = 0;
    constexpr int patches = 20;
    for (int t = 0; t < patches; ++t) {
        std::vector<int> sites(16);
        std::iota(sites.begin(), sites.end(), 0);
        std::shuffle(sites.begin(), sites.end(), rng);
        const int degree = 1 + t % 3;
        // Node 0 is the center, 1..degree its neighbors, the rest hang off the neighbors.
        const int extra = 2;
        Points f(1 + degree + extra, 2);
        for (int i = 0; i < f.rows(); ++i) f.row(i) = site(sites[static_cast<std::size_t>(i)]);
        std::vector<std::pair<Index, Index>> edges;
        for (int i = 1; i <= degree; ++i) edges.emplace_back(0, i);
        std::bernoulli_distribution coin(0.5);
        for (int a = 1; a <= degree; ++a) {
            for (int b = a + 1; b <= degree; ++b) {
                if (coin(rng)) edges.emplace_back(a, b);
            }
        }
        for (int e = 0; e < extra; ++e) edges.emplace_back(1 + e % degree, 1 + degree + e);
        if (!general_position(sites, degree, edges)) {
            --t;
            continue;
        }
        const FeaturedGraph g(std::move(f), std::move(edges));
        const ReconstructionReport r = check_reconstruction_t1(g, 0, grid, lattice);
        unique += r.unique();
        candidates += r.candidates;
    }
    return {unique == patches, std::to_string(unique) + "/" + std::to_string(patches) + " patches identified uniquely, " +
                                   std::to_string(candidates) + " candidates scanned"};
}

Outcome criterion10()
{
    ReproConfig c = ReproConfig::defaults("hetero-class");
    const Json r = run_repro(c)["results"];
    const double lift = r["lift_of_medians"];
    ReproConfig a = ReproConfig::defaults("ablation-subsample");
    const Json ab = run_repro(a)["results"];
    const double drop = ab["largest_median_drop"];
    std::string curve;
    for (const auto& e : ab["per_count"]) curve += std::to_string(e["count"].get<long>()) + ":" + fmt(e["median_accuracy"]) + " ";
    constexpr double noise = 0.03;
    return {lift >= 0.10 && drop <= noise, "raw " + fmt(r["median_accuracy_raw"]) + ", raw+l-ECT " +
                                               fmt(r["median_accuracy_lect"]) + ", lift " + fmt(lift) +
                                               "; ablation " + curve + "largest drop " + fmt(drop)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion11()
{
    const fs::path root = fs::temp_directory_path() / "lect_acceptance_determinism";
    fs::remove_all(root);
    const std::string cli = LECT_CLI_PATH;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"kstar-align", "--trials 3 --ks 3 5"},
        {"wedge-align", "--trials 2 --points-per-sphere 40 --m 12 --l 12 --outlier-fraction 0.1 --noise 0.01"},
        {"hetero-class", "--trials 2 --nodes 120 --m 12 --l 12"},
        {"ablation-subsample", "--trials 2 --nodes 120 --m 12 --l 12 --counts 0 20 -1"},
    };
    int identical = 0;
    std::string detail;
    for (const auto& [id, flags] : runs) {
        const fs::path first = root / (id + "_a"), second = root / (id + "_b");
        const std::string quiet = " > /dev/null 2>&1";
        int rc = std::system((cli + " repro " + id + " " + flags + " -o " + first.string() + quiet).c_str());
        rc |= std::system((cli + " rerun " + (first / (id + ".summary.json")).string() + " -o " + second.string() + quiet).c_str());
        bool same = rc == 0;
        for (const auto* suffix : {".summary.json", ".trials.csv"}) {
            const std::string a = slurp(first / (id + suffix)), b = slurp(second / (id + suffix));
            same &= !a.empty() && a == b;
        }
        // Thread count is not part of the result.
        ReproConfig c = ReproConfig::from_json(read_embedded_config(first / (id + ".summary.json")));
        Json one = run_repro(c);
        c.jobs = 3;
        Json three = run_repro(c);
        same &= one["results"].dump() == three["results"].dump() && one["trials"].dump() == three["trials"].dump();
        identical += same;
        detail += id + (same ? " identical; " : " DIFFERS; ");
    }
    fs::remove_all(root);
    return {identical == static_cast<int>(runs.size()), detail};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", criterion1},
        {"terminal value equals chi", criterion2},
        {"smooth vs hard consistency", criterion3},
        {"gradient check", criterion4},
        {"k-star rotation recovery", criterion5},
        {"wedged-sphere alignment", criterion6},
        {"robustness to noise and outliers", criterion7},
        {"ECT equality vs isomorphism", criterion8},
        {"local reconstruction probe", criterion9},
        {"classification lift and ablation", criterion10},
        {"determinism", criterion11},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(number)) continue;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << number << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(seconds) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
