#include "lect/complex.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <tuple>

#include "lect/parallel.hpp"

namespace lect {

namespace {

std::string describe(const Simplex& s)
{
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(s[i]);
    }
    return out + "]";
}

bool rows_distinct(const Points& points)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    auto row_less = [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < points.cols(); ++c) {
            if (points(a, c) != points(b, c)) return points(a, c) < points(b, c);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (!row_less(order[i - 1], order[i])) return false;
    }
    return true;
}

}  // namespace

GeometricComplex::GeometricComplex(Points vertices, std::vector<std::vector<Simplex>> simplices)
    : vertices_(std::move(vertices)), simplices_(std::move(simplices))
{
    if (vertices_.cols() < 1) throw std::invalid_argument("ambient dimension must be positive");
    if (!vertices_.allFinite()) throw std::invalid_argument("vertex coordinates must be finite");
    while (!simplices_.empty() && simplices_.back().empty()) simplices_.pop_back();

    const auto n = num_vertices();
    std::vector<std::set<Simplex>> seen(simplices_.size());
    for (std::size_t d = 0; d < simplices_.size(); ++d) {
        const std::size_t k = d + 1;
        for (const Simplex& s : simplices_[d]) {
            if (s.size() != k + 1) {
                throw std::invalid_argument("simplex " + describe(s) + " listed as dimension " +
                                            std::to_string(k));
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] >= n) throw std::invalid_argument("simplex " + describe(s) + " references missing vertex");
                if (i && s[i - 1] >= s[i]) {
                    throw std::invalid_argument("simplex " + describe(s) + " must have strictly increasing indices");
                }
            }
            if (!seen[d].insert(s).second) throw std::invalid_argument("duplicate simplex " + describe(s));
        }
    }
    // Facets of k-simplices (k >= 2) must be listed; vertices are implicit.
    for (std::size_t d = 1; d < simplices_.size(); ++d) {
        for (const Simplex& s : simplices_[d]) {
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex facet;
                facet.reserve(s.size() - 1);
                for (std::size_t i = 0; i < s.size(); ++i) {
                    if (i != drop) facet.push_back(s[i]);
                }
                if (!seen[d - 1].contains(facet)) {
                    throw std::invalid_argument("face " + describe(facet) + " of " + describe(s) + " is missing");
                }
            }
        }
    }
    build_indices();
}

GeometricComplex GeometricComplex::point_cloud(Points vertices)
{
    return GeometricComplex(std::move(vertices), {});
}

GeometricComplex GeometricComplex::with_closure(Points vertices, std::vector<Simplex> simplices)
{
    std::vector<std::set<Simplex>> by_dim;
    for (Simplex s : simplices) {
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
            throw std::invalid_argument("simplex " + describe(s) + " repeats a vertex");
        }
        if (s.size() < 2) continue;
        if (s.size() > 24) throw std::invalid_argument("simplex too large for closure completion");
        const std::uint32_t full = (1u << s.size()) - 1;
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            const int bits = std::popcount(mask);
            if (bits < 2) continue;
            Simplex face;
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (mask & (1u << i)) face.push_back(s[i]);
            }
            if (by_dim.size() < static_cast<std::size_t>(bits - 1)) by_dim.resize(static_cast<std::size_t>(bits - 1));
            by_dim[static_cast<std::size_t>(bits - 2)].insert(std::move(face));
        }
    }
    std::vector<std::vector<Simplex>> lists;
    for (auto& set : by_dim) lists.emplace_back(set.begin(), set.end());
    return GeometricComplex(std::move(vertices), std::move(lists));
}

void GeometricComplex::build_indices()
{
    const auto n = num_vertices();
    std::vector<std::vector<Index>> adjacency(n);
    if (!simplices_.empty()) {
        for (const Simplex& e : simplices_[0]) {
            adjacency[e[0]].push_back(e[1]);
            adjacency[e[1]].push_back(e[0]);
        }
    }
    adj_offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::sort(adjacency[v].begin(), adjacency[v].end());
        adj_offsets_[v + 1] = adj_offsets_[v] + adjacency[v].size();
    }
    adj_.clear();
    adj_.reserve(adj_offsets_[n]);
    for (const auto& list : adjacency) adj_.insert(adj_.end(), list.begin(), list.end());

    by_min_vertex_.assign(n, {});
    for (std::size_t d = 0; d < simplices_.size(); ++d) {
        for (std::size_t i = 0; i < simplices_[d].size(); ++i) {
            by_min_vertex_[simplices_[d][i][0]].emplace_back(static_cast<int>(d), static_cast<std::uint32_t>(i));
        }
    }
}

int GeometricComplex::dimension() const
{
    return static_cast<int>(simplices_.size());
}

std::span<const Simplex> GeometricComplex::simplices(int k) const
{
    if (k < 1 || static_cast<std::size_t>(k) > simplices_.size()) return {};
    return simplices_[static_cast<std::size_t>(k - 1)];
}

std::size_t GeometricComplex::count(int k) const
{
    if (k == 0) return num_vertices();
    return simplices(k).size();
}

std::size_t GeometricComplex::total_simplices() const
{
    std::size_t total = num_vertices();
    for (const auto& list : simplices_) total += list.size();
    return total;
}

std::span<const Index> GeometricComplex::neighbors(Index v) const
{
    return std::span<const Index>(adj_).subspan(adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]);
}

GeometricComplex GeometricComplex::with_vertices(Points vertices) const
{
    if (vertices.rows() != vertices_.rows() || vertices.cols() != vertices_.cols()) {
        throw std::invalid_argument("with_vertices: shape mismatch");
    }
    GeometricComplex out = *this;
    out.vertices_ = std::move(vertices);
    return out;
}

GeometricComplex GeometricComplex::induced(std::span<const Index> selection) const
{
    constexpr Index kAbsent = std::numeric_limits<Index>::max();
    std::vector<Index> local(num_vertices(), kAbsent);
    Points points(static_cast<Eigen::Index>(selection.size()), vertices_.cols());
    for (std::size_t i = 0; i < selection.size(); ++i) {
        if (selection[i] >= num_vertices()) throw std::out_of_range("induced: vertex out of range");
        if (i && selection[i - 1] >= selection[i]) throw std::invalid_argument("induced: selection must be sorted");
        local[selection[i]] = static_cast<Index>(i);
        points.row(static_cast<Eigen::Index>(i)) = vertices_.row(selection[i]);
    }

    std::vector<std::vector<Simplex>> lists(simplices_.size());
    for (Index v : selection) {
        for (const auto& [d, pos] : by_min_vertex_[v]) {
            const Simplex& s = simplices_[static_cast<std::size_t>(d)][pos];
            Simplex mapped;
            mapped.reserve(s.size());
            for (Index u : s) {
                if (local[u] == kAbsent) break;
                mapped.push_back(local[u]);
            }
            if (mapped.size() == s.size()) lists[static_cast<std::size_t>(d)].push_back(std::move(mapped));
        }
    }
    return GeometricComplex(std::move(points), std::move(lists));
}

FeaturedGraph::FeaturedGraph(Points feats, std::vector<std::pair<Index, Index>> edge_list,
                             std::optional<std::vector<int>> node_labels)
    : features(std::move(feats)), labels(std::move(node_labels))
{
    const auto n = num_nodes();
    for (auto [u, v] : edge_list) {
        if (u >= n || v >= n) {
            throw std::invalid_argument("edge (" + std::to_string(u) + "," + std::to_string(v) +
                                        ") references a missing node");
        }
        if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (labels && labels->size() != n) throw std::invalid_argument("label count does not match node count");
}

void NeighborhoodSpec::validate() const
{
    if (k < 0) throw std::invalid_argument("neighborhood k must be non-negative");
    if (mode == NeighborhoodMode::knn && k < 1) throw std::invalid_argument("knn neighborhoods require k >= 1");
}

std::string NeighborhoodSpec::to_string() const
{
    return std::string(mode == NeighborhoodMode::hop ? "hop" : "knn") + ":" + std::to_string(k);
}

NeighborhoodMode parse_neighborhood_mode(const std::string& text)
{
    if (text == "hop") return NeighborhoodMode::hop;
    if (text == "knn") return NeighborhoodMode::knn;
    throw std::invalid_argument("unknown neighborhood mode '" + text + "' (expected hop or knn)");
}

GeometricComplex embed(const FeaturedGraph& graph, double jitter_sigma, std::uint64_t seed)
{
    if (jitter_sigma < 0.0) throw std::invalid_argument("jitter sigma must be non-negative");
    std::vector<Simplex> edge_simplices;
    edge_simplices.reserve(graph.edges.size());
    for (auto [u, v] : graph.edges) edge_simplices.push_back({u, v});
    std::vector<std::vector<Simplex>> lists;
    if (!edge_simplices.empty()) lists.push_back(std::move(edge_simplices));

    constexpr int kMaxAttempts = 8;
    const int attempts = jitter_sigma > 0.0 ? kMaxAttempts : 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        Points positions = graph.features;
        if (jitter_sigma > 0.0) {
            auto rng = make_rng(seed, static_cast<std::uint64_t>(attempt));
            std::normal_distribution<double> noise(0.0, jitter_sigma);
            for (Eigen::Index i = 0; i < positions.rows(); ++i) {
                for (Eigen::Index c = 0; c < positions.cols(); ++c) positions(i, c) += noise(rng);
            }
        }
        if (rows_distinct(positions)) return GeometricComplex(std::move(positions), lists);
    }
    throw std::runtime_error("non-injective embedding: node features collide");
}

Neighborhood hop_neighborhood(const GeometricComplex& complex, Index vertex, int k)
{
    if (vertex >= complex.num_vertices()) throw std::out_of_range("hop_neighborhood: vertex out of range");
    if (k < 0) throw std::invalid_argument("hop_neighborhood: k must be non-negative");

    std::vector<int> depth(complex.num_vertices(), -1);
    std::vector<Index> frontier{vertex};
    std::vector<Index> selection{vertex};
    depth[vertex] = 0;
    for (int level = 1; level <= k && !frontier.empty(); ++level) {
        std::vector<Index> next;
        for (Index u : frontier) {
            for (Index w : complex.neighbors(u)) {
                if (depth[w] < 0) {
                    depth[w] = level;
                    next.push_back(w);
                    selection.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(selection.begin(), selection.end());

    Neighborhood result;
    result.center = static_cast<Index>(std::lower_bound(selection.begin(), selection.end(), vertex) - selection.begin());
    result.complex = complex.induced(selection);
    result.original = std::move(selection);
    return result;
}

Neighborhood knn_neighborhood(const GeometricComplex& complex, Index vertex, int k)
{
    const auto n = complex.num_vertices();
    if (vertex >= n) throw std::out_of_range("knn_neighborhood: vertex out of range");
    if (k < 0 || static_cast<std::size_t>(k) > n - 1) {
        throw std::invalid_argument("knn_neighborhood: k=" + std::to_string(k) + " exceeds the " +
                                    std::to_string(n - 1) + " available neighbors");
    }
    const auto& pts = complex.vertices();
    std::vector<std::pair<double, Index>> ranked;
    ranked.reserve(n - 1);
    for (Index u = 0; u < n; ++u) {
        if (u == vertex) continue;
        ranked.emplace_back((pts.row(u) - pts.row(vertex)).squaredNorm(), u);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());

    std::vector<Index> selection{vertex};
    for (int i = 0; i < k; ++i) selection.push_back(ranked[static_cast<std::size_t>(i)].second);
    std::sort(selection.begin(), selection.end());

    Neighborhood result;
    result.center = static_cast<Index>(std::lower_bound(selection.begin(), selection.end(), vertex) - selection.begin());
    result.complex = complex.induced(selection);
    result.original = std::move(selection);
    return result;
}

Neighborhood neighborhood(const GeometricComplex& complex, Index vertex, const NeighborhoodSpec& spec)
{
    spec.validate();
    return spec.mode == NeighborhoodMode::hop ? hop_neighborhood(complex, vertex, spec.k)
                                              : knn_neighborhood(complex, vertex, spec.k);
}

namespace {

struct IsoSearch {
    const FeaturedGraph& g1;
    const FeaturedGraph& g2;
    std::vector<std::vector<char>> adj1, adj2;
    std::vector<int> deg1, deg2;
    std::vector<Index> map;
    std::vector<char> used;

    static std::vector<std::vector<char>> adjacency(const FeaturedGraph& g)
    {
        std::vector<std::vector<char>> a(g.num_nodes(), std::vector<char>(g.num_nodes(), 0));
        for (auto [u, v] : g.edges) a[u][v] = a[v][u] = 1;
        return a;
    }

    bool extend(std::size_t i)
    {
        if (i == g1.num_nodes()) return true;
        for (Index j = 0; j < g2.num_nodes(); ++j) {
            if (used[j] || deg1[i] != deg2[j]) continue;
            if (g1.features.row(static_cast<Eigen::Index>(i)) != g2.features.row(j)) continue;
            bool consistent = true;
            for (std::size_t p = 0; p < i && consistent; ++p) consistent = adj1[i][p] == adj2[j][map[p]];
            if (!consistent) continue;
            used[j] = 1;
            map[i] = j;
            if (extend(i + 1)) return true;
            used[j] = 0;
        }
        return false;
    }
};

}  // namespace

bool is_isomorphic_featured(const FeaturedGraph& g1, const FeaturedGraph& g2, std::size_t max_nodes)
{
    if (g1.num_nodes() > max_nodes || g2.num_nodes() > max_nodes) {
        throw std::runtime_error("oracle too large: isomorphism search is capped at " + std::to_string(max_nodes) +
                                 " nodes");
    }
    if (g1.num_nodes() != g2.num_nodes() || g1.edges.size() != g2.edges.size() ||
        g1.feature_dim() != g2.feature_dim()) {
        return false;
    }
    IsoSearch search{g1, g2, IsoSearch::adjacency(g1), IsoSearch::adjacency(g2), {}, {}, {}, {}};
    auto degrees = [](const std::vector<std::vector<char>>& a) {
        std::vector<int> d;
        for (const auto& row : a) d.push_back(static_cast<int>(std::count(row.begin(), row.end(), 1)));
        return d;
    };
    search.deg1 = degrees(search.adj1);
    search.deg2 = degrees(search.adj2);
    search.map.assign(g1.num_nodes(), 0);
    search.used.assign(g2.num_nodes(), 0);
    return search.extend(0);
}

}  // namespace lect
