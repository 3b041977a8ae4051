#include <doctest.h>

#include <numeric>

#include "lect/complex.hpp"
#include "lect/datagen.hpp"
#include "oracles.hpp"

using namespace lect;

namespace {

Points pts(std::initializer_list<std::initializer_list<double>> rows)
{
    Points p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (double v : r) p(i, j++) = v;
        ++i;
    }
    return p;
}

GeometricComplex star5() { return gen_k_star(5, 1.0, 0); }

}  // namespace

TEST_SUITE("complex")
{
    TEST_CASE("construction validates simplices")
    {
        const Points p = pts({{0, 0}, {1, 0}, {0, 1}});
        CHECK_NOTHROW(GeometricComplex(p, {{{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}}));
        CHECK_THROWS_AS(GeometricComplex(p, {{{1, 0}}}), std::invalid_argument);
        CHECK_THROWS_AS(GeometricComplex(p, {{{0, 3}}}), std::invalid_argument);
        CHECK_THROWS_AS(GeometricComplex(p, {{{0, 1}, {0, 1}}}), std::invalid_argument);
        CHECK_THROWS_WITH_AS(GeometricComplex(p, {{{0, 1}}, {{0, 1, 2}}}), doctest::Contains("missing"),
                             std::invalid_argument);
    }

    TEST_CASE("dimension and counts")
    {
        const auto c = GeometricComplex::with_closure(pts({{0, 0}, {1, 0}, {0, 1}, {5, 5}}), {{0, 1, 2}});
        CHECK(c.dimension() == 2);
        CHECK(c.count(0) == 4);
        CHECK(c.count(1) == 3);
        CHECK(c.count(2) == 1);
        CHECK(c.total_simplices() == 8);
        CHECK(GeometricComplex::point_cloud(pts({{0.0}})).dimension() == 0);
        CHECK(GeometricComplex(pts({{0, 0}}), {{}, {}}).dimension() == 0);
    }

    TEST_CASE("embed")
    {
        const FeaturedGraph g(pts({{0, 0}, {1, 0}}), {{0, 1}});
        const GeometricComplex c = embed(g);
        CHECK(c.num_vertices() == 2);
        CHECK(c.count(1) == 1);
        CHECK(c.vertices() == g.features);

        const FeaturedGraph twins(pts({{0.5, 0.5}, {0.5, 0.5}}), {{0, 1}});
        CHECK_THROWS_WITH(embed(twins), doctest::Contains("non-injective embedding"));
        const GeometricComplex jittered = embed(twins, 1e-6, 7);
        CHECK(jittered.vertices().row(0) != jittered.vertices().row(1));
        CHECK((jittered.vertices() - twins.features).cwiseAbs().maxCoeff() < 1e-4);
        CHECK(embed(twins, 1e-6, 7).vertices() == jittered.vertices());
    }

    TEST_CASE("featured graph validation")
    {
        CHECK_THROWS_AS(FeaturedGraph(pts({{0}, {1}}), {{1, 1}}), std::invalid_argument);
        CHECK_THROWS_AS(FeaturedGraph(pts({{0}, {1}}), {{0, 2}}), std::invalid_argument);
        const FeaturedGraph g(pts({{0}, {1}, {2}}), {{2, 0}, {0, 2}, {1, 0}});
        CHECK(g.edges == std::vector<std::pair<Index, Index>>{{0, 1}, {0, 2}});
    }

    TEST_CASE("hop neighborhoods")
    {
        const GeometricComplex star = star5();
        const Neighborhood n0 = hop_neighborhood(star, 3, 0);
        CHECK(n0.complex.num_vertices() == 1);
        CHECK(n0.complex.total_simplices() == 1);

        const Neighborhood center = hop_neighborhood(star, 0, 1);
        CHECK(center.complex.num_vertices() == 6);
        CHECK(center.complex.count(1) == 5);

        const Neighborhood leaf = hop_neighborhood(star, 2, 1);
        CHECK(leaf.complex.num_vertices() == 2);
        CHECK(leaf.complex.count(1) == 1);
        CHECK(leaf.original[leaf.center] == 2);
        CHECK(leaf.complex.vertices().row(leaf.center) == star.vertices().row(2));

        // Full subcomplex: the triangle comes along with its vertices.
        const auto tri = GeometricComplex::with_closure(pts({{0, 0}, {1, 0}, {0, 1}, {2, 0}}), {{0, 1, 2}, {1, 3}});
        const Neighborhood t = hop_neighborhood(tri, 0, 1);
        CHECK(t.complex.num_vertices() == 3);
        CHECK(t.complex.count(2) == 1);
    }

    TEST_CASE("hop neighborhoods grow monotonically and stop at the component")
    {
        const GeometricComplex x = gen_random_complex(12, 1, 0.15, 2, 5);
        for (Index v = 0; v < x.num_vertices(); ++v) {
            std::size_t previous = 0;
            for (int k = 0; k <= 12; ++k) {
                const auto n = hop_neighborhood(x, v, k);
                CHECK(n.complex.num_vertices() >= previous);
                previous = n.complex.num_vertices();
            }
            CHECK(hop_neighborhood(x, v, 12).complex.num_vertices() == hop_neighborhood(x, v, 40).complex.num_vertices());
        }
    }

    TEST_CASE("knn neighborhoods")
    {
        const GeometricComplex cloud = GeometricComplex::point_cloud(pts({{0, 0}, {3, 0}, {1, 0}, {0, 2}, {-5, 0}}));
        const Neighborhood n = knn_neighborhood(cloud, 0, 3);
        CHECK(n.original == std::vector<Index>{0, 1, 2, 3});
        CHECK(knn_neighborhood(cloud, 0, 4).complex.num_vertices() == 5);
        CHECK_THROWS_AS(knn_neighborhood(cloud, 0, 5), std::invalid_argument);

        // (1,0) and (-1,0) are equidistant from the origin; the lower index wins.
        const GeometricComplex tie = GeometricComplex::point_cloud(pts({{0, 0}, {5, 5}, {1, 0}, {-1, 0}}));
        CHECK(knn_neighborhood(tie, 0, 1).original == std::vector<Index>{0, 2});
        CHECK(knn_neighborhood(tie, 0, 1).complex.vertices() == knn_neighborhood(tie, 0, 1).complex.vertices());

        CHECK_THROWS_AS((NeighborhoodSpec{NeighborhoodMode::knn, 0}.validate()), std::invalid_argument);
        CHECK_THROWS_AS((NeighborhoodSpec{NeighborhoodMode::hop, -1}.validate()), std::invalid_argument);
        CHECK(parse_neighborhood_mode("knn") == NeighborhoodMode::knn);
        CHECK_THROWS_AS(parse_neighborhood_mode("ball"), std::invalid_argument);
    }

    TEST_CASE("isomorphism search")
    {
        const Points f = pts({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        const FeaturedGraph cycle(f, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
        const FeaturedGraph path(f, {{0, 1}, {1, 2}, {2, 3}});
        CHECK(is_isomorphic_featured(cycle, cycle));
        CHECK_FALSE(is_isomorphic_featured(cycle, path));

        Points moved = f;
        moved(2, 0) = 2.0;
        CHECK_FALSE(is_isomorphic_featured(cycle, FeaturedGraph(moved, cycle.edges)));

        // Relabel nodes 0 <-> 2.
        const FeaturedGraph relabeled(pts({{1, 1}, {1, 0}, {0, 0}, {0, 1}}), {{2, 1}, {1, 0}, {0, 3}, {2, 3}});
        CHECK(is_isomorphic_featured(cycle, relabeled));
        CHECK(oracle::isomorphic(cycle, relabeled));

        // Equal features on several nodes force real search.
        const Points same = Points::Zero(6, 1);
        const FeaturedGraph a(same, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
        const FeaturedGraph b(same, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
        CHECK_FALSE(is_isomorphic_featured(a, b));
        CHECK(is_isomorphic_featured(b, FeaturedGraph(same, {{0, 2}, {2, 4}, {4, 1}, {1, 3}, {3, 5}, {5, 0}})));

        const FeaturedGraph big(Points::Zero(13, 1), {});
        CHECK_THROWS_WITH(is_isomorphic_featured(big, big), doctest::Contains("oracle too large"));
    }
}
