#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lect/complex.hpp"

namespace lect {

/// A computation whose cost estimate is above the configured cap.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * m unit directions on S^{n-1} and l equispaced thresholds t_0 = a < ... < t_{l-1} = b.
 *
 * The same grid object is shared by every matrix computed on it so that
 * feature indices can always be mapped back to (direction, threshold).
 */
class SamplingGrid {
public:
    /// Throws std::invalid_argument unless every direction is unit length
    /// (1e-12), l >= 2 and lower < upper.
    SamplingGrid(Eigen::MatrixXd directions, double lower, double upper, int num_thresholds,
                 std::uint64_t seed = 0);

    int ambient_dim() const { return static_cast<int>(directions_.cols()); }
    int num_directions() const { return static_cast<int>(directions_.rows()); }
    int num_thresholds() const { return static_cast<int>(thresholds_.size()); }
    std::size_t size() const { return static_cast<std::size_t>(num_directions()) * thresholds_.size(); }

    const Eigen::MatrixXd& directions() const { return directions_; }
    const std::vector<double>& thresholds() const { return thresholds_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double step() const { return (upper_ - lower_) / static_cast<double>(thresholds_.size() - 1); }
    std::uint64_t seed() const { return seed_; }

private:
    Eigen::MatrixXd directions_;  // m x n
    std::vector<double> thresholds_;
    double lower_ = -1.0;
    double upper_ = 1.0;
    std::uint64_t seed_ = 0;
};

/// Directions are normalized seeded standard Gaussians (uniform on the sphere).
SamplingGrid make_grid(int ambient_dim, int num_directions, int num_thresholds, double lower, double upper,
                       std::uint64_t seed);

/// (log m / m)^{1/(n-1)} / l: expected domain resolution of an (m, l) grid.
double grid_error_hint(int ambient_dim, double num_directions, double num_thresholds);

enum class EctKind { hard, smooth };

struct EctMatrix {
    EctKind kind = EctKind::hard;
    Eigen::MatrixXd values;  // m x l; hard entries are exact integers
    std::shared_ptr<const SamplingGrid> grid;
    std::string provenance;

    /// Direction-major (row-major) flattening: entry (i, j) lands at i * l + j.
    Eigen::VectorXd flatten() const;
};

/// Flat simplex list used by the ECT kernels: vertices first (as 0-simplices),
/// then higher simplices, each with its sign (-1)^dim.
struct SimplexTable {
    Points vertices;
    std::vector<std::uint32_t> offsets{0};
    std::vector<Index> members;
    std::vector<int> signs;

    static SimplexTable from(const GeometricComplex& complex);
    void add(std::span<const Index> simplex);
    std::size_t size() const { return signs.size(); }
};

std::int64_t euler_characteristic(const GeometricComplex& complex);

/// heights[s] = max over vertices u of simplex s of <u, direction>; argmax (a
/// vertex index) is written when requested.
void simplex_heights(const SimplexTable& table, const Eigen::Ref<const Eigen::VectorXd>& direction,
                     std::vector<double>& heights, std::vector<Index>* argmax = nullptr);

/// Exact ECT row: counts[j] = sum of signs of simplices with height <= t_j.
void ect_hard_row(const SimplexTable& table, const Eigen::Ref<const Eigen::VectorXd>& direction,
                  const std::vector<double>& thresholds, std::vector<double>& heights,
                  std::vector<std::int64_t>& counts);

Eigen::MatrixXd ect_hard_values(const SimplexTable& table, const SamplingGrid& grid);

EctMatrix ect_hard(const GeometricComplex& complex, std::shared_ptr<const SamplingGrid> grid,
                   std::string provenance = {});
EctMatrix ect_smooth(const GeometricComplex& complex, std::shared_ptr<const SamplingGrid> grid, double sharpness,
                     std::string provenance = {});

Eigen::MatrixXd ect_smooth_values(const SimplexTable& table, const SamplingGrid& grid, double sharpness);

namespace detail {

/// Logistic terms below this magnitude are treated as saturated.
inline constexpr double kSaturation = 1e-20;

/// row[j] += sign * s(lambda (t_j - h)); fully saturated tails are recorded in
/// tail[j] (a difference array) and must be prefix-summed by the caller.
void accumulate_logistic(double height, double sign, double sharpness, const std::vector<double>& thresholds,
                         double step, double* row, double* tail);

/// sum_j weights[j] * s'(lambda (t_j - h)) where s' = s (1 - s).
double logistic_slope_dot(double height, double sharpness, const std::vector<double>& thresholds, double step,
                          const double* weights);

}  // namespace detail

struct LectOptions {
    NeighborhoodSpec spec;
    int num_directions = 64;
    int num_thresholds = 64;
    std::uint64_t seed = 0;
    bool normalize = true;
    /// Defaults to [-1, 1] when normalizing, otherwise [-R, R] with R the
    /// largest vertex norm of the whole complex.
    std::optional<std::pair<double, double>> bounds;
    int jobs = 1;
};

/// Local ECT vectors, one row per vertex.
struct LectSet {
    NeighborhoodSpec spec;
    std::shared_ptr<const SamplingGrid> grid;
    bool normalized = true;
    Eigen::MatrixXd vectors;  // num_vertices x (m * l)
};

/// Translates the focal vertex to the origin and scales by the largest vertex
/// norm; a zero radius leaves the scale unchanged.
GeometricComplex normalize_at(const GeometricComplex& complex, Index center);

LectSet lect(const GeometricComplex& complex, const LectOptions& options);

/// Number of simplex-threshold tests: sum over x of m * l * |N_k(x)|, with
/// |N_k(x)| the simplex count of the neighborhood.
std::uint64_t cost_estimate(const GeometricComplex& complex, const NeighborhoodSpec& spec, int num_directions,
                            int num_thresholds);

}  // namespace lect
