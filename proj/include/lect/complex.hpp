#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lect {

using Index = std::uint32_t;
using Simplex = std::vector<Index>;
using Points = Eigen::MatrixXd;  // one row per point

/**
 * A simplicial complex with vertices embedded in R^n.
 *
 * Vertices are stored as rows of a matrix and are implicitly the 0-simplices.
 * Higher simplices are grouped by dimension and stored with strictly
 * increasing vertex indices. The constructor rejects anything that is not
 * closed under taking faces, so every instance is a valid complex.
 */
class GeometricComplex {
public:
    GeometricComplex() = default;

    /// simplices[k - 1] holds the k-simplices (k >= 1). Throws
    /// std::invalid_argument on bad indices, duplicates or missing faces.
    GeometricComplex(Points vertices, std::vector<std::vector<Simplex>> simplices);

    /// Builds a 0-dimensional complex.
    static GeometricComplex point_cloud(Points vertices);

    /// Adds every missing face of the given simplices, then constructs.
    static GeometricComplex with_closure(Points vertices, std::vector<Simplex> simplices);

    int ambient_dim() const { return static_cast<int>(vertices_.cols()); }
    std::size_t num_vertices() const { return static_cast<std::size_t>(vertices_.rows()); }
    int dimension() const;
    const Points& vertices() const { return vertices_; }

    /// k-simplices for k >= 1; empty when k exceeds the dimension.
    std::span<const Simplex> simplices(int k) const;
    std::size_t count(int k) const;
    std::size_t total_simplices() const;

    std::span<const Index> neighbors(Index v) const;

    /// Same simplices, new coordinates (row count and dimension must match).
    GeometricComplex with_vertices(Points vertices) const;

    /// Induced subcomplex on a sorted, duplicate-free vertex set; new vertex i
    /// is old vertex selection[i].
    GeometricComplex induced(std::span<const Index> selection) const;

private:
    void build_indices();

    Points vertices_;
    std::vector<std::vector<Simplex>> simplices_;
    // CSR adjacency of the 1-skeleton.
    std::vector<std::size_t> adj_offsets_;
    std::vector<Index> adj_;
    // (dim, position) of every simplex keyed by its smallest vertex.
    std::vector<std::vector<std::pair<int, std::uint32_t>>> by_min_vertex_;
};

struct FeaturedGraph {
    Points features;
    std::vector<std::pair<Index, Index>> edges;  // u < v, sorted, unique
    std::optional<std::vector<int>> labels;

    FeaturedGraph() = default;
    /// Normalizes edge orientation, drops duplicates. Throws on self-loops or
    /// out-of-range endpoints.
    FeaturedGraph(Points features, std::vector<std::pair<Index, Index>> edges,
                  std::optional<std::vector<int>> labels = std::nullopt);

    std::size_t num_nodes() const { return static_cast<std::size_t>(features.rows()); }
    int feature_dim() const { return static_cast<int>(features.cols()); }
};

enum class NeighborhoodMode { hop, knn };

struct NeighborhoodSpec {
    NeighborhoodMode mode = NeighborhoodMode::hop;
    int k = 1;

    void validate() const;
    std::string to_string() const;
};

NeighborhoodMode parse_neighborhood_mode(const std::string& text);

struct Neighborhood {
    GeometricComplex complex;
    std::vector<Index> original;  // local vertex -> vertex of the source complex
    Index center = 0;             // local index of the focal vertex
};

/// Vertices are node features plus seeded Gaussian jitter; one edge per graph
/// edge. Collisions trigger a re-jitter with a fresh stream (up to 8 times);
/// with sigma = 0 duplicates fail with "non-injective embedding".
GeometricComplex embed(const FeaturedGraph& graph, double jitter_sigma = 0.0, std::uint64_t seed = 0);

/// Full subcomplex on all vertices within graph distance k in the 1-skeleton.
Neighborhood hop_neighborhood(const GeometricComplex& complex, Index vertex, int k);

/// Full subcomplex on the vertex and its k nearest vertices (ties -> lower index).
Neighborhood knn_neighborhood(const GeometricComplex& complex, Index vertex, int k);

Neighborhood neighborhood(const GeometricComplex& complex, Index vertex, const NeighborhoodSpec& spec);

/// Exact search for an edge- and feature-preserving bijection.
bool is_isomorphic_featured(const FeaturedGraph& g1, const FeaturedGraph& g2, std::size_t max_nodes = 12);

}  // namespace lect
