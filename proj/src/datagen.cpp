#include "lect/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "lect/parallel.hpp"

namespace lect {

GeometricComplex gen_k_star(int k, double radius, std::uint64_t seed)
{
    if (k < 2) throw std::invalid_argument("k-star needs k >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("k-star radius must be positive");
    auto rng = make_rng(seed, 0x5374);
    const double sector = 2.0 * std::numbers::pi / k;
    const double phase = std::uniform_real_distribution<double>(0.0, sector)(rng);

    Points pts = Points::Zero(k + 1, 2);
    std::vector<Simplex> edges;
    for (int i = 0; i < k; ++i) {
        const double angle = phase + sector * i;
        pts(i + 1, 0) = radius * std::cos(angle);
        pts(i + 1, 1) = radius * std::sin(angle);
        edges.push_back({0, static_cast<Index>(i + 1)});
    }
    return GeometricComplex(std::move(pts), {std::move(edges)});
}

GeometricComplex gen_wedged_spheres(int points_per_sphere, double noise_sigma, int outliers, std::uint64_t seed)
{
    if (points_per_sphere < 10) throw std::invalid_argument("wedged spheres need at least 10 points per sphere");
    if (noise_sigma < 0.0 || outliers < 0) throw std::invalid_argument("noise and outliers must be non-negative");
    auto rng = make_rng(seed, 0x5768);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Points pts(2 * points_per_sphere, 3);
    for (int i = 0; i < 2 * points_per_sphere; ++i) {
        Eigen::RowVector3d p;
        do {
            p = Eigen::RowVector3d(gauss(rng), gauss(rng), gauss(rng));
        } while (!(p.norm() > 1e-150));
        p /= p.norm();
        p(0) += i < points_per_sphere ? -1.0 : 1.0;
        pts.row(i) = p;
    }
    return GeometricComplex::point_cloud(corrupt(pts, noise_sigma, outliers, seed));
}

GeometricComplex gen_wedged_octahedra()
{
    // Sphere A: center (-1,0,0), vertex (0,0,0) shared with sphere B at (1,0,0).
    Points pts(11, 3);
    pts << 0, 0, 0,       // shared: +x of A, -x of B
        -2, 0, 0,         // 1: -x of A
        -1, 1, 0, -1, -1, 0, -1, 0, 1, -1, 0, -1,  // 2..5: +-y, +-z of A
        2, 0, 0,          // 6: +x of B
        1, 1, 0, 1, -1, 0, 1, 0, 1, 1, 0, -1;      // 7..10: +-y, +-z of B
    std::vector<Simplex> triangles;
    auto octahedron = [&](Index pole_a, Index pole_b, std::array<Index, 4> ring) {
        // ring order: +y, +z, -y, -z keeps consecutive entries adjacent.
        for (int i = 0; i < 4; ++i) {
            const Index u = ring[static_cast<std::size_t>(i)];
            const Index w = ring[static_cast<std::size_t>((i + 1) % 4)];
            triangles.push_back({pole_a, u, w});
            triangles.push_back({pole_b, u, w});
        }
    };
    octahedron(0, 1, {2, 4, 3, 5});
    octahedron(0, 6, {7, 9, 8, 10});
    return GeometricComplex::with_closure(std::move(pts), std::move(triangles));
}

Points corrupt(const Points& points, double noise_sigma, int outliers, std::uint64_t seed)
{
    if (noise_sigma < 0.0 || outliers < 0) throw std::invalid_argument("noise and outliers must be non-negative");
    Points out(points.rows() + outliers, points.cols());
    out.topRows(points.rows()) = points;
    if (noise_sigma > 0.0) {
        auto rng = make_rng(seed, 0x4e6f);
        std::normal_distribution<double> gauss(0.0, noise_sigma);
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            for (Eigen::Index c = 0; c < points.cols(); ++c) out(i, c) += gauss(rng);
        }
    }
    if (outliers > 0) {
        if (points.rows() == 0) throw std::invalid_argument("outliers need a non-empty sample for the bounding box");
        const Eigen::RowVectorXd lo = points.colwise().minCoeff();
        const Eigen::RowVectorXd hi = points.colwise().maxCoeff();
        const Eigen::RowVectorXd mid = 0.5 * (lo + hi);
        const Eigen::RowVectorXd half = 0.75 * (hi - lo);
        auto rng = make_rng(seed, 0x4f75);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (int i = 0; i < outliers; ++i) {
            for (Eigen::Index c = 0; c < points.cols(); ++c) {
                out(points.rows() + i, c) = mid(c) + half(c) * unit(rng);
            }
        }
    }
    return out;
}

FeaturedGraph gen_heterophily_graph(int n_nodes, int n_classes, int feat_dim, double homophily_target,
                                    std::uint64_t seed, int degree)
{
    if (!(homophily_target >= 0.0 && homophily_target <= 1.0)) {
        throw std::invalid_argument("homophily target must lie in [0, 1]");
    }
    if (n_classes < 1 || feat_dim < 2 || degree < 1 || n_nodes < 2 * n_classes) {
        throw std::invalid_argument("heterophily graph needs n_classes >= 1, feat_dim >= 2, degree >= 1 and "
                                    "at least two nodes per class");
    }
    if (n_classes == 1 && homophily_target < 1.0) {
        throw std::invalid_argument("infeasible homophily target " + std::to_string(homophily_target) +
                                    " for a single class");
    }
    auto rng = make_rng(seed, 0x4874);
    std::vector<int> labels(static_cast<std::size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) labels[static_cast<std::size_t>(i)] = i % n_classes;
    std::shuffle(labels.begin(), labels.end(), rng);

    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Points features(n_nodes, feat_dim);
    for (int i = 0; i < n_nodes; ++i) {
        for (int c = 0; c < feat_dim; ++c) features(i, c) = unit(rng);
    }

    std::vector<std::vector<Index>> members(static_cast<std::size_t>(n_classes));
    for (int i = 0; i < n_nodes; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(static_cast<Index>(i));

    // Class c places its proposed partners around the direction at angle 2 pi c / C.
    const double cone = std::cos(std::numbers::pi / std::max(n_classes, 2));
    constexpr double kReach = 0.6;
    std::bernoulli_distribution same_class(homophily_target);
    std::set<std::pair<Index, Index>> edges;
    std::vector<Index> candidates;
    for (int v = 0; v < n_nodes; ++v) {
        const int own = labels[static_cast<std::size_t>(v)];
        const double angle = 2.0 * std::numbers::pi * own / n_classes;
        const Eigen::Vector2d preferred(std::cos(angle), std::sin(angle));
        for (int e = 0; e < degree; ++e) {
            int cls = own;
            if (!same_class(rng)) {
                cls = std::uniform_int_distribution<int>(0, n_classes - 2)(rng);
                if (cls >= own) ++cls;
            }
            candidates.clear();
            Index fallback = 0;
            double fallback_score = -2.0;
            for (Index u : members[static_cast<std::size_t>(cls)]) {
                if (u == static_cast<Index>(v)) continue;
                if (edges.contains({std::min<Index>(u, v), std::max<Index>(u, v)})) continue;
                const Eigen::Vector2d d = (features.row(u).head<2>() - features.row(v).head<2>()).transpose();
                const double len = d.norm();
                if (len == 0.0) continue;
                const double score = d.dot(preferred) / len;
                if (score >= cone && len <= kReach) candidates.push_back(u);
                if (score > fallback_score) {
                    fallback_score = score;
                    fallback = u;
                }
            }
            if (candidates.empty() && fallback_score < -1.5) continue;
            const Index partner = candidates.empty()
                                      ? fallback
                                      : candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
            edges.emplace(std::min<Index>(partner, v), std::max<Index>(partner, v));
        }
    }
    return FeaturedGraph(std::move(features), {edges.begin(), edges.end()}, std::move(labels));
}

double edge_homophily(const FeaturedGraph& graph)
{
    if (!graph.labels) throw std::invalid_argument("edge homophily needs labels");
    if (graph.edges.empty()) return 0.0;
    std::size_t same = 0;
    for (auto [u, v] : graph.edges) same += (*graph.labels)[u] == (*graph.labels)[v];
    return static_cast<double>(same) / static_cast<double>(graph.edges.size());
}

GeometricComplex gen_random_complex(int n_vertices, int max_dim, double density, int ambient_dim,
                                    std::uint64_t seed)
{
    if (n_vertices < 1 || ambient_dim < 1) throw std::invalid_argument("random complex needs vertices and a dimension");
    if (max_dim < 0 || max_dim > 3) throw std::invalid_argument("random complex max_dim must lie in [0, 3]");
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    if (max_dim > 0 && n_vertices > 200) throw std::invalid_argument("random complex is limited to 200 vertices");
    auto rng = make_rng(seed, 0x5263);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Points pts(n_vertices, ambient_dim);
    for (int i = 0; i < n_vertices; ++i) {
        for (int c = 0; c < ambient_dim; ++c) pts(i, c) = unit(rng);
    }

    std::bernoulli_distribution keep(density);
    std::vector<Simplex> chosen;
    for (int k = 1; k <= max_dim && k < n_vertices; ++k) {
        // Enumerate (k+1)-subsets in lexicographic order.
        Simplex s(static_cast<std::size_t>(k + 1));
        for (int i = 0; i <= k; ++i) s[static_cast<std::size_t>(i)] = static_cast<Index>(i);
        for (;;) {
            if (keep(rng)) chosen.push_back(s);
            int i = k;
            while (i >= 0 && s[static_cast<std::size_t>(i)] == static_cast<Index>(n_vertices - k - 1 + i)) --i;
            if (i < 0) break;
            ++s[static_cast<std::size_t>(i)];
            for (int j = i + 1; j <= k; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return GeometricComplex::with_closure(std::move(pts), std::move(chosen));
}

GeometricComplex gen_point_cloud(int n_points, int ambient_dim, std::uint64_t seed)
{
    return gen_random_complex(n_points, 0, 0.0, ambient_dim, seed);
}

GeneratorKind parse_generator_kind(const std::string& text)
{
    if (text == "k_star") return GeneratorKind::k_star;
    if (text == "wedged_spheres") return GeneratorKind::wedged_spheres;
    if (text == "wedged_octahedra") return GeneratorKind::wedged_octahedra;
    if (text == "random_complex") return GeneratorKind::random_complex;
    if (text == "heterophily_graph") return GeneratorKind::heterophily_graph;
    if (text == "point_cloud") return GeneratorKind::point_cloud;
    throw std::invalid_argument("unknown generator kind '" + text + "'");
}

std::string to_string(GeneratorKind kind)
{
    switch (kind) {
    case GeneratorKind::k_star: return "k_star";
    case GeneratorKind::wedged_spheres: return "wedged_spheres";
    case GeneratorKind::wedged_octahedra: return "wedged_octahedra";
    case GeneratorKind::random_complex: return "random_complex";
    case GeneratorKind::heterophily_graph: return "heterophily_graph";
    case GeneratorKind::point_cloud: return "point_cloud";
    }
    return "unknown";
}

Generated generate(const GeneratorSpec& spec)
{
    auto get = [&](const char* key, double fallback) {
        auto it = spec.params.find(key);
        return it == spec.params.end() ? fallback : it->second;
    };
    auto get_int = [&](const char* key, int fallback) {
        const double v = get(key, fallback);
        if (v != std::floor(v)) throw std::invalid_argument(std::string("parameter ") + key + " must be an integer");
        return static_cast<int>(v);
    };
    switch (spec.kind) {
    case GeneratorKind::k_star:
        return gen_k_star(get_int("k", 5), get("radius", 1.0), spec.seed);
    case GeneratorKind::wedged_spheres:
        return gen_wedged_spheres(get_int("points_per_sphere", 1000), get("noise", 0.0), get_int("outliers", 0),
                                  spec.seed);
    case GeneratorKind::wedged_octahedra:
        return gen_wedged_octahedra();
    case GeneratorKind::random_complex:
        return gen_random_complex(get_int("vertices", 8), get_int("max_dim", 2), get("density", 0.3),
                                  get_int("ambient_dim", 2), spec.seed);
    case GeneratorKind::heterophily_graph:
        return gen_heterophily_graph(get_int("nodes", 600), get_int("classes", 3), get_int("feat_dim", 2),
                                     get("homophily", 0.1), spec.seed, get_int("degree", 3));
    case GeneratorKind::point_cloud:
        return gen_point_cloud(get_int("points", 100), get_int("ambient_dim", 2), spec.seed);
    }
    throw std::invalid_argument("unsupported generator kind");
}

}  // namespace lect
