#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lect/datagen.hpp"
#include "lect/ect.hpp"
#include "oracles.hpp"

using namespace lect;

namespace {

SamplingGrid single_direction(Eigen::RowVectorXd v, double a, double b, int l)
{
    return SamplingGrid(Eigen::MatrixXd(v), a, b, l);
}

GeometricComplex segment()
{
    Points p(2, 2);
    p << -1, 0, 1, 0;
    return GeometricComplex(p, {{{0, 1}}});
}

}  // namespace

TEST_SUITE("ect")
{
    TEST_CASE("euler characteristic")
    {
        CHECK(euler_characteristic(GeometricComplex::point_cloud(Points::Zero(1, 2))) == 1);
        Points tri(3, 2);
        tri << 0, 0, 1, 0, 0, 1;
        CHECK(euler_characteristic(GeometricComplex(tri, {{{0, 1}, {0, 2}, {1, 2}}})) == 0);
        const GeometricComplex wedge = gen_wedged_octahedra();
        CHECK(euler_characteristic(wedge) == 3);
        CHECK(euler_characteristic(wedge) == oracle::euler(wedge));
    }

    TEST_CASE("grid construction")
    {
        const SamplingGrid g = make_grid(2, 4, 3, -1.0, 1.0, 0);
        CHECK(g.thresholds() == std::vector<double>{-1.0, 0.0, 1.0});
        CHECK(g.num_directions() == 4);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(g.directions().row(i).norm() - 1.0) <= 1e-12);
        CHECK(make_grid(2, 4, 3, -1.0, 1.0, 0).directions() == g.directions());
        CHECK(make_grid(2, 4, 3, -1.0, 1.0, 1).directions() != g.directions());
        CHECK(make_grid(2, 64, 64, -1, 1, 0).size() == 4096);

        const SamplingGrid fine = make_grid(3, 5, 41, -2.0, 3.0, 2);
        for (std::size_t j = 1; j < fine.thresholds().size(); ++j) {
            CHECK(std::abs(fine.thresholds()[j] - fine.thresholds()[j - 1] - fine.step()) <= 1e-12);
        }
        CHECK(fine.thresholds().back() == 3.0);

        CHECK_THROWS_AS(make_grid(2, 0, 3, -1, 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_grid(2, 3, 1, -1, 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(make_grid(2, 3, 3, 1, 1, 0), std::invalid_argument);
        CHECK_THROWS_AS(SamplingGrid(Eigen::MatrixXd::Constant(1, 2, 1.0), -1, 1, 3), std::invalid_argument);
    }

    TEST_CASE("grid error hint")
    {
        CHECK(grid_error_hint(2, std::numbers::e, 1) == doctest::Approx(1.0 / std::numbers::e));
        CHECK(grid_error_hint(3, 50, 20) == doctest::Approx(2.0 * grid_error_hint(3, 50, 40)));
        CHECK(grid_error_hint(2, 64, 64) == doctest::Approx(1.016e-3).epsilon(1e-3));
        CHECK(grid_error_hint(2, 128, 64) < grid_error_hint(2, 64, 64));
        CHECK_THROWS_AS(grid_error_hint(1, 4, 4), std::invalid_argument);
    }

    TEST_CASE("hard ECT on small complexes")
    {
        const auto point = GeometricComplex::point_cloud(Points::Zero(1, 2));
        const auto grid = std::make_shared<const SamplingGrid>(make_grid(2, 5, 5, -1.0, 1.0, 3));
        const EctMatrix e = ect_hard(point, grid, "point");
        for (int i = 0; i < 5; ++i) {
            CHECK(e.values.row(i) == Eigen::RowVectorXd((Eigen::RowVectorXd(5) << 0, 0, 1, 1, 1).finished()));
        }
        CHECK(e.provenance == "point");
        CHECK(e.kind == EctKind::hard);

        const SamplingGrid line = single_direction(Eigen::RowVector2d(1, 0), -1.5, 1.5, 7);
        const Eigen::MatrixXd s = ect_hard_values(SimplexTable::from(segment()), line);
        CHECK(s.row(0) == Eigen::RowVectorXd((Eigen::RowVectorXd(7) << 0, 1, 1, 1, 1, 1, 1).finished()));

        CHECK_THROWS_AS(ect_hard(segment(), std::make_shared<const SamplingGrid>(make_grid(3, 2, 2, -1, 1, 0))),
                        std::invalid_argument);
    }

    TEST_CASE("hard ECT matches the recount and ends at chi")
    {
        for (std::uint64_t s = 0; s < 60; ++s) {
            const int n = 2 + static_cast<int>(s % 2);
            const GeometricComplex x = gen_random_complex(7, 3, 0.3, n, s);
            const SamplingGrid grid = make_grid(n, 9, 15, -2.0, 2.0, s);
            const Eigen::MatrixXd got = ect_hard_values(SimplexTable::from(x), grid);
            CHECK(got == oracle::ect(x, grid.directions(), grid.thresholds()));
            CHECK((got.col(got.cols() - 1).array() == static_cast<double>(euler_characteristic(x))).all());
        }
    }

    TEST_CASE("flattening is direction-major")
    {
        const auto grid = std::make_shared<const SamplingGrid>(make_grid(2, 3, 4, -1, 1, 5));
        const EctMatrix e = ect_hard(gen_k_star(3, 0.8, 1), grid);
        const Eigen::VectorXd flat = e.flatten();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 4; ++j) CHECK(flat(i * 4 + j) == e.values(i, j));
        }
    }

    TEST_CASE("rotation changes the ECT of a segment")
    {
        const auto grid = std::make_shared<const SamplingGrid>(make_grid(2, 8, 16, -1.5, 1.5, 0));
        Points turned(2, 2);
        turned << 0, -1, 0, 1;
        CHECK(ect_hard(segment(), grid).values != ect_hard(segment().with_vertices(turned), grid).values);
    }

    TEST_CASE("smooth ECT")
    {
        const auto point = GeometricComplex::point_cloud(Points::Zero(1, 2));
        const SamplingGrid grid = make_grid(2, 3, 3, -1.0, 1.0, 0);
        CHECK(ect_smooth_values(SimplexTable::from(point), grid, 10.0)(1, 1) == doctest::Approx(0.5));

        // Against the direct logistic sum.
        for (std::uint64_t s = 0; s < 30; ++s) {
            const int n = 2 + static_cast<int>(s % 2);
            const GeometricComplex x = gen_random_complex(6, 2, 0.4, n, 100 + s);
            const SamplingGrid g = make_grid(n, 7, 21, -1.5, 1.5, s);
            for (double lambda : {1.0, 20.0, 100.0, 500.0}) {
                const Eigen::MatrixXd got = ect_smooth_values(SimplexTable::from(x), g, lambda);
                const Eigen::MatrixXd want = oracle::smooth_ect(x, g.directions(), g.thresholds(), lambda);
                CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }
        CHECK_THROWS_AS(ect_smooth_values(SimplexTable::from(point), grid, 0.0), std::invalid_argument);
    }

    TEST_CASE("smooth ECT converges to the hard ECT")
    {
        const SamplingGrid line = single_direction(Eigen::RowVector2d(1, 0), -1.125, 1.375, 11);
        const auto table = SimplexTable::from(segment());
        const Eigen::MatrixXd hard = ect_hard_values(table, line);
        for (double lambda : {50.0, 200.0, 1000.0}) {
            const Eigen::MatrixXd smooth = ect_smooth_values(table, line, lambda);
            // Closest threshold to any height is 0.125 away.
            const double bound = 3.0 / (1.0 + std::exp(lambda * 0.125));
            CHECK((smooth - hard).cwiseAbs().maxCoeff() <= bound + 1e-15);
        }

        for (std::uint64_t s = 0; s < 20; ++s) {
            const GeometricComplex x = gen_random_complex(6, 2, 0.5, 2, 300 + s);
            const SamplingGrid g = make_grid(2, 6, 13, -2.0, 2.0, s);
            const auto t = SimplexTable::from(x);
            const auto cells = oracle::all_simplices(x);
            double delta = INFINITY;
            for (int i = 0; i < g.num_directions(); ++i) {
                for (const auto& c : cells) {
                    const double h = oracle::height(x, c, g.directions().row(i).transpose());
                    for (double th : g.thresholds()) delta = std::min(delta, std::abs(th - h));
                }
            }
            const double lambda = 200.0;
            const double bound = static_cast<double>(cells.size()) / (1.0 + std::exp(lambda * delta));
            CHECK((ect_smooth_values(t, g, lambda) - ect_hard_values(t, g)).cwiseAbs().maxCoeff() <= bound + 1e-12);
        }
    }

    TEST_CASE("local ECT")
    {
        LectOptions o;
        o.num_directions = 6;
        o.num_thresholds = 9;
        o.seed = 4;

        const auto lonely = GeometricComplex::point_cloud((Points(2, 2) << 0.3, 0.2, 5, 5).finished());
        o.spec = {NeighborhoodMode::hop, 1};
        const LectSet iso = lect::lect(lonely, o);
        CHECK(iso.vectors.cols() == 54);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 9; ++j) CHECK(iso.vectors(0, i * 9 + j) == (j >= 4 ? 1.0 : 0.0));
        }

        const GeometricComplex star = gen_k_star(3, 1.0, 2);
        const LectSet s = lect::lect(star, o);
        CHECK(s.vectors.row(0) != s.vectors.row(1));
        // The three leaves see congruent neighborhoods, but rotated ones.
        CHECK(s.grid->num_directions() == 6);

        LectOptions big;
        big.spec = {NeighborhoodMode::hop, 1};
        CHECK(lect::lect(star, big).vectors.cols() == 4096);
    }

    TEST_CASE("normalized local ECT ignores translation and scaling")
    {
        const GeometricComplex x = gen_random_complex(10, 2, 0.3, 2, 11);
        LectOptions o;
        o.spec = {NeighborhoodMode::hop, 2};
        o.num_directions = 16;
        o.num_thresholds = 16;
        const Eigen::MatrixXd base = lect::lect(x, o).vectors;
        Points moved = (x.vertices() * 4.0).rowwise() + Eigen::RowVector2d(0.5, -2.25);
        CHECK(lect::lect(x.with_vertices(moved), o).vectors == base);

        o.spec = {NeighborhoodMode::knn, 3};
        CHECK(lect::lect(x.with_vertices(moved), o).vectors == lect::lect(x, o).vectors);
    }

    TEST_CASE("local ECT does not depend on the thread count")
    {
        const GeometricComplex x = gen_random_complex(40, 2, 0.05, 3, 12);
        LectOptions o;
        o.spec = {NeighborhoodMode::hop, 1};
        o.num_directions = 8;
        o.num_thresholds = 8;
        const Eigen::MatrixXd one = lect::lect(x, o).vectors;
        o.jobs = 4;
        CHECK(lect::lect(x, o).vectors == one);
    }

    TEST_CASE("unnormalized bounds cover the complex")
    {
        const GeometricComplex x = gen_k_star(4, 3.0, 0);
        LectOptions o;
        o.spec = {NeighborhoodMode::hop, 1};
        o.num_directions = 5;
        o.num_thresholds = 7;
        o.normalize = false;
        const LectSet s = lect::lect(x, o);
        CHECK(s.grid->upper() == doctest::Approx(3.0));
        CHECK_FALSE(s.normalized);
        // Last threshold of every row is the neighborhood's chi.
        for (int i = 0; i < 5; ++i) CHECK(s.vectors(0, i * 7 + 6) == 1.0);
    }

    TEST_CASE("cost estimate")
    {
        const auto cloud = GeometricComplex::point_cloud(Points::Random(9, 2));
        CHECK(cost_estimate(cloud, {NeighborhoodMode::hop, 1}, 1, 1) == 9);
        const GeometricComplex star = gen_k_star(5);
        // Center: 6 vertices + 5 edges; each leaf: 2 vertices + 1 edge.
        CHECK(cost_estimate(star, {NeighborhoodMode::hop, 1}, 2, 2) == 4 * (11 + 5 * 3));
    }
}
