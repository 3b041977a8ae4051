#include "lect/ect.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "lect/parallel.hpp"

namespace lect {

SamplingGrid::SamplingGrid(Eigen::MatrixXd directions, double lower, double upper, int num_thresholds,
                           std::uint64_t seed)
    : directions_(std::move(directions)), lower_(lower), upper_(upper), seed_(seed)
{
    if (directions_.rows() < 1) throw std::invalid_argument("grid needs at least one direction");
    if (directions_.cols() < 1) throw std::invalid_argument("grid ambient dimension must be positive");
    if (num_thresholds < 2) throw std::invalid_argument("grid needs at least two thresholds");
    if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw std::invalid_argument("grid bounds must satisfy a < b");
    }
    for (Eigen::Index i = 0; i < directions_.rows(); ++i) {
        if (std::abs(directions_.row(i).norm() - 1.0) > 1e-12) {
            throw std::invalid_argument("grid direction " + std::to_string(i) + " is not unit length");
        }
    }
    const double step = (upper - lower) / static_cast<double>(num_thresholds - 1);
    thresholds_.resize(static_cast<std::size_t>(num_thresholds));
    for (int j = 0; j < num_thresholds; ++j) thresholds_[static_cast<std::size_t>(j)] = lower + j * step;
    thresholds_.back() = upper;
}

SamplingGrid make_grid(int ambient_dim, int num_directions, int num_thresholds, double lower, double upper,
                       std::uint64_t seed)
{
    if (ambient_dim < 1) throw std::invalid_argument("ambient dimension must be positive");
    if (num_directions < 1) throw std::invalid_argument("m must be at least 1");
    auto rng = make_rng(seed, 0x6d616b65);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd dirs(num_directions, ambient_dim);
    for (int i = 0; i < num_directions; ++i) {
        Eigen::RowVectorXd v(ambient_dim);
        double norm = 0.0;
        do {
            for (int c = 0; c < ambient_dim; ++c) v(c) = gauss(rng);
            norm = v.norm();
        } while (!(norm > 1e-150));
        dirs.row(i) = v / norm;
    }
    return SamplingGrid(std::move(dirs), lower, upper, num_thresholds, seed);
}

double grid_error_hint(int ambient_dim, double num_directions, double num_thresholds)
{
    if (ambient_dim < 2) throw std::invalid_argument("grid_error_hint requires n >= 2");
    return std::pow(std::log(num_directions) / num_directions, 1.0 / (ambient_dim - 1)) / num_thresholds;
}

Eigen::VectorXd EctMatrix::flatten() const
{
    Eigen::VectorXd flat(values.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) flat(k++) = values(i, j);
    }
    return flat;
}

SimplexTable SimplexTable::from(const GeometricComplex& complex)
{
    SimplexTable table;
    table.vertices = complex.vertices();
    for (Index v = 0; v < complex.num_vertices(); ++v) table.add(std::span<const Index>(&v, 1));
    for (int k = 1; k <= complex.dimension(); ++k) {
        for (const Simplex& s : complex.simplices(k)) table.add(s);
    }
    return table;
}

void SimplexTable::add(std::span<const Index> simplex)
{
    members.insert(members.end(), simplex.begin(), simplex.end());
    offsets.push_back(static_cast<std::uint32_t>(members.size()));
    signs.push_back(simplex.size() % 2 == 1 ? 1 : -1);
}

std::int64_t euler_characteristic(const GeometricComplex& complex)
{
    std::int64_t chi = 0;
    for (int k = 0; k <= complex.dimension(); ++k) {
        const auto c = static_cast<std::int64_t>(complex.count(k));
        chi += (k % 2 == 0) ? c : -c;
    }
    return chi;
}

void simplex_heights(const SimplexTable& table, const Eigen::Ref<const Eigen::VectorXd>& direction,
                     std::vector<double>& heights, std::vector<Index>* argmax)
{
    if (direction.size() != table.vertices.cols()) throw std::invalid_argument("direction dimension mismatch");
    const Eigen::VectorXd vertex_heights = table.vertices * direction;
    heights.resize(table.size());
    if (argmax) argmax->resize(table.size());
    for (std::size_t s = 0; s < table.size(); ++s) {
        Index best = table.members[table.offsets[s]];
        double h = vertex_heights(best);
        for (std::uint32_t p = table.offsets[s] + 1; p < table.offsets[s + 1]; ++p) {
            const Index u = table.members[p];
            if (vertex_heights(u) > h) {
                h = vertex_heights(u);
                best = u;
            }
        }
        heights[s] = h;
        if (argmax) (*argmax)[s] = best;
    }
}

void ect_hard_row(const SimplexTable& table, const Eigen::Ref<const Eigen::VectorXd>& direction,
                  const std::vector<double>& thresholds, std::vector<double>& heights,
                  std::vector<std::int64_t>& counts)
{
    simplex_heights(table, direction, heights);
    counts.assign(thresholds.size() + 1, 0);
    for (std::size_t s = 0; s < table.size(); ++s) {
        // First threshold with h <= t_j; simplices above every threshold land in the spare slot.
        const auto j = std::lower_bound(thresholds.begin(), thresholds.end(), heights[s]) - thresholds.begin();
        counts[static_cast<std::size_t>(j)] += table.signs[s];
    }
    for (std::size_t j = 1; j < thresholds.size(); ++j) counts[j] += counts[j - 1];
    counts.pop_back();
}

Eigen::MatrixXd ect_hard_values(const SimplexTable& table, const SamplingGrid& grid)
{
    if (grid.ambient_dim() != table.vertices.cols()) {
        throw std::invalid_argument("grid dimension " + std::to_string(grid.ambient_dim()) +
                                    " does not match complex dimension " + std::to_string(table.vertices.cols()));
    }
    Eigen::MatrixXd values(grid.num_directions(), grid.num_thresholds());
    std::vector<double> heights;
    std::vector<std::int64_t> counts;
    for (int i = 0; i < grid.num_directions(); ++i) {
        ect_hard_row(table, grid.directions().row(i).transpose(), grid.thresholds(), heights, counts);
        for (int j = 0; j < grid.num_thresholds(); ++j) values(i, j) = static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
    return values;
}

EctMatrix ect_hard(const GeometricComplex& complex, std::shared_ptr<const SamplingGrid> grid, std::string provenance)
{
    EctMatrix out;
    out.kind = EctKind::hard;
    out.values = ect_hard_values(SimplexTable::from(complex), *grid);
    out.grid = std::move(grid);
    out.provenance = std::move(provenance);
    return out;
}

namespace detail {

namespace {

std::size_t first_at_or_above(const std::vector<double>& thresholds, double height)
{
    return static_cast<std::size_t>(std::lower_bound(thresholds.begin(), thresholds.end(), height) -
                                    thresholds.begin());
}

}  // namespace

void accumulate_logistic(double height, double sign, double sharpness, const std::vector<double>& thresholds,
                         double step, double* row, double* tail)
{
    const std::size_t l = thresholds.size();
    const std::size_t split = first_at_or_above(thresholds, height);
    const double ratio = std::exp(-sharpness * step);

    // t_j >= h: s = 1 / (1 + z) with z = exp(-lambda (t_j - h)) shrinking by `ratio`.
    if (split < l) {
        double z = std::exp(-sharpness * (thresholds[split] - height));
        for (std::size_t j = split; j < l; ++j) {
            if (z < kSaturation) {
                tail[j] += sign;
                break;
            }
            row[j] += sign / (1.0 + z);
            z *= ratio;
        }
    }
    // t_j < h: s = w / (1 + w) with w = exp(lambda (t_j - h)) shrinking downwards.
    if (split > 0) {
        double w = std::exp(sharpness * (thresholds[split - 1] - height));
        for (std::size_t j = split; j-- > 0;) {
            if (w < kSaturation) break;
            row[j] += sign * w / (1.0 + w);
            w *= ratio;
        }
    }
}

double logistic_slope_dot(double height, double sharpness, const std::vector<double>& thresholds, double step,
                          const double* weights)
{
    const std::size_t l = thresholds.size();
    const std::size_t split = first_at_or_above(thresholds, height);
    const double ratio = std::exp(-sharpness * step);
    double total = 0.0;
    if (split < l) {
        double z = std::exp(-sharpness * (thresholds[split] - height));
        for (std::size_t j = split; j < l && z >= kSaturation; ++j) {
            const double d = 1.0 + z;
            total += weights[j] * z / (d * d);
            z *= ratio;
        }
    }
    if (split > 0) {
        double w = std::exp(sharpness * (thresholds[split - 1] - height));
        for (std::size_t j = split; j-- > 0 && w >= kSaturation;) {
            const double d = 1.0 + w;
            total += weights[j] * w / (d * d);
            w *= ratio;
        }
    }
    return total;
}

}  // namespace detail

Eigen::MatrixXd ect_smooth_values(const SimplexTable& table, const SamplingGrid& grid, double sharpness)
{
    if (!(sharpness > 0.0)) throw std::invalid_argument("sharpness must be positive");
    if (grid.ambient_dim() != table.vertices.cols()) throw std::invalid_argument("grid/complex dimension mismatch");
    const auto l = static_cast<std::size_t>(grid.num_thresholds());
    Eigen::MatrixXd values(grid.num_directions(), grid.num_thresholds());
    std::vector<double> heights, row(l), tail(l);
    for (int i = 0; i < grid.num_directions(); ++i) {
        simplex_heights(table, grid.directions().row(i).transpose(), heights);
        std::fill(row.begin(), row.end(), 0.0);
        std::fill(tail.begin(), tail.end(), 0.0);
        for (std::size_t s = 0; s < table.size(); ++s) {
            detail::accumulate_logistic(heights[s], table.signs[s], sharpness, grid.thresholds(), grid.step(),
                                        row.data(), tail.data());
        }
        double running = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            running += tail[j];
            values(i, static_cast<Eigen::Index>(j)) = row[j] + running;
        }
    }
    return values;
}

EctMatrix ect_smooth(const GeometricComplex& complex, std::shared_ptr<const SamplingGrid> grid, double sharpness,
                     std::string provenance)
{
    EctMatrix out;
    out.kind = EctKind::smooth;
    out.values = ect_smooth_values(SimplexTable::from(complex), *grid, sharpness);
    out.grid = std::move(grid);
    out.provenance = std::move(provenance);
    return out;
}

GeometricComplex normalize_at(const GeometricComplex& complex, Index center)
{
    Points shifted = complex.vertices().rowwise() - complex.vertices().row(center);
    const double radius = shifted.rowwise().norm().maxCoeff();
    if (radius > 0.0) shifted /= radius;
    return complex.with_vertices(std::move(shifted));
}

LectSet lect(const GeometricComplex& complex, const LectOptions& options)
{
    options.spec.validate();
    std::pair<double, double> bounds{-1.0, 1.0};
    if (options.bounds) {
        bounds = *options.bounds;
    } else if (!options.normalize) {
        const double radius = complex.num_vertices() ? complex.vertices().rowwise().norm().maxCoeff() : 0.0;
        if (radius > 0.0) bounds = {-radius, radius};
    }
    auto grid = std::make_shared<const SamplingGrid>(make_grid(complex.ambient_dim(), options.num_directions,
                                                               options.num_thresholds, bounds.first, bounds.second,
                                                               options.seed));
    LectSet out;
    out.spec = options.spec;
    out.grid = grid;
    out.normalized = options.normalize;
    out.vectors.resize(static_cast<Eigen::Index>(complex.num_vertices()), static_cast<Eigen::Index>(grid->size()));

    parallel_for(complex.num_vertices(), options.jobs, [&](std::size_t x) {
        const Neighborhood local = neighborhood(complex, static_cast<Index>(x), options.spec);
        const GeometricComplex patch = options.normalize ? normalize_at(local.complex, local.center) : local.complex;
        const Eigen::MatrixXd values = ect_hard_values(SimplexTable::from(patch), *grid);
        // values is column-major; copy row by row for direction-major order.
        const Eigen::Index l = values.cols();
        for (Eigen::Index i = 0; i < values.rows(); ++i) {
            out.vectors.row(static_cast<Eigen::Index>(x)).segment(i * l, l) = values.row(i);
        }
    });
    return out;
}

std::uint64_t cost_estimate(const GeometricComplex& complex, const NeighborhoodSpec& spec, int num_directions,
                            int num_thresholds)
{
    const auto per_cell = static_cast<std::uint64_t>(num_directions) * static_cast<std::uint64_t>(num_thresholds);
    std::uint64_t total = 0;
    for (Index x = 0; x < complex.num_vertices(); ++x) {
        total += per_cell * neighborhood(complex, x, spec).complex.total_simplices();
    }
    return total;
}

}  // namespace lect
