#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "lect/complex.hpp"

namespace lect {

/// Center at the origin, k leaves equally spaced on a circle of the given
/// radius (global phase drawn from the seed), one edge per leaf.
GeometricComplex gen_k_star(int k, double radius = 1.0, std::uint64_t seed = 0);

/// Uniform samples on two unit spheres centered at (-1,0,0) and (1,0,0),
/// touching at the origin. Optional Gaussian noise and uniform outliers.
GeometricComplex gen_wedged_spheres(int points_per_sphere, double noise_sigma, int outliers, std::uint64_t seed);

/// Two octahedral sphere triangulations sharing the vertex at the origin
/// (11 vertices, 24 edges, 16 triangles).
GeometricComplex gen_wedged_octahedra();

/// Adds N(0, sigma^2) noise to every coordinate, then appends `outliers`
/// points drawn uniformly from the bounding box inflated 1.5x about its center.
Points corrupt(const Points& points, double noise_sigma, int outliers, std::uint64_t seed);

/**
 * Planted-partition featured graph with controllable edge homophily.
 *
 * Features are uniform in [-1, 1]^d and independent of the labels. Every
 * node proposes `degree` edges: the partner's class is its own with
 * probability `homophily_target`, and the partner itself is drawn from nodes
 * lying in a class-specific direction from the proposer. A node's own
 * features therefore say nothing about its class, while the geometry of its
 * neighborhood does.
 */
FeaturedGraph gen_heterophily_graph(int n_nodes, int n_classes, int feat_dim, double homophily_target,
                                    std::uint64_t seed, int degree = 3);

/// Fraction of edges joining nodes with equal labels.
double edge_homophily(const FeaturedGraph& graph);

/// Random points in [-1, 1]^n; every (k+1)-subset, 1 <= k <= max_dim, is kept
/// with probability `density`, then faces are completed.
GeometricComplex gen_random_complex(int n_vertices, int max_dim, double density, int ambient_dim,
                                    std::uint64_t seed);

GeometricComplex gen_point_cloud(int n_points, int ambient_dim, std::uint64_t seed);

enum class GeneratorKind { k_star, wedged_spheres, wedged_octahedra, random_complex, heterophily_graph, point_cloud };

GeneratorKind parse_generator_kind(const std::string& text);
std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::k_star;
    std::map<std::string, double> params;  // missing entries take documented defaults
    std::uint64_t seed = 0;
};

using Generated = std::variant<GeometricComplex, FeaturedGraph>;

Generated generate(const GeneratorSpec& spec);

}  // namespace lect
