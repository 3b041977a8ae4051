#include "lect/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "lect/parallel.hpp"

namespace lect {

std::string ColumnInfo::id() const
{
    if (kind == ColumnKind::raw) return "raw:" + std::to_string(source);
    return "lect" + std::to_string(hops) + ":d" + std::to_string(direction) + ":t" + std::to_string(threshold);
}

std::size_t FeatureTable::raw_columns() const
{
    return static_cast<std::size_t>(
        std::count_if(columns.begin(), columns.end(), [](const ColumnInfo& c) { return c.kind == ColumnKind::raw; }));
}

std::vector<std::string> FeatureTable::column_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(columns.size());
    for (const auto& c : columns) ids.push_back(c.id());
    return ids;
}

FeatureTable build_features(const FeaturedGraph& graph, const FeatureOptions& options)
{
    const GeometricComplex complex = embed(graph, options.jitter_sigma, options.seed);

    std::uint64_t cost = 0;
    for (int k : options.hops) {
        cost += cost_estimate(complex, {NeighborhoodMode::hop, k}, options.num_directions, options.num_thresholds);
    }
    if (cost > options.budget) {
        throw BudgetExceeded("l-ECT cost estimate " + std::to_string(cost) +
                             " (sum over nodes x of m*l*|N_k(x)|) exceeds the budget of " +
                             std::to_string(options.budget));
    }

    const auto n = static_cast<Eigen::Index>(graph.num_nodes());
    const Eigen::Index raw = graph.feature_dim();
    const Eigen::Index block = static_cast<Eigen::Index>(options.num_directions) * options.num_thresholds;
    FeatureTable table;
    table.labels = graph.labels;
    table.data.resize(n, raw + block * static_cast<Eigen::Index>(options.hops.size()));
    table.data.leftCols(raw) = graph.features;
    for (Eigen::Index c = 0; c < raw; ++c) table.columns.push_back({ColumnKind::raw, static_cast<int>(c), 0, 0, 0});

    for (std::size_t b = 0; b < options.hops.size(); ++b) {
        LectOptions lo;
        lo.spec = {NeighborhoodMode::hop, options.hops[b]};
        lo.num_directions = options.num_directions;
        lo.num_thresholds = options.num_thresholds;
        lo.seed = options.seed;
        lo.normalize = true;
        lo.jobs = options.jobs;
        const LectSet set = lect(complex, lo);
        table.data.middleCols(raw + static_cast<Eigen::Index>(b) * block, block) = set.vectors;
        table.grids[options.hops[b]] = set.grid;
        for (int i = 0; i < options.num_directions; ++i) {
            for (int j = 0; j < options.num_thresholds; ++j) {
                table.columns.push_back({ColumnKind::lect, 0, options.hops[b], i, j});
            }
        }
    }
    return table;
}

FeatureTable subsample_features(const FeatureTable& table, std::size_t count, std::uint64_t seed)
{
    std::vector<std::size_t> raw, lect_cols;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        (table.columns[c].kind == ColumnKind::raw ? raw : lect_cols).push_back(c);
    }
    if (count > lect_cols.size()) {
        throw std::invalid_argument("cannot keep " + std::to_string(count) + " of " + std::to_string(lect_cols.size()) +
                                    " l-ECT columns");
    }
    std::vector<std::size_t> kept;
    auto rng = make_rng(seed, 0x5375);
    std::sample(lect_cols.begin(), lect_cols.end(), std::back_inserter(kept), count, rng);

    std::vector<std::size_t> order = raw;
    order.insert(order.end(), kept.begin(), kept.end());
    FeatureTable out;
    out.labels = table.labels;
    out.grids = table.grids;
    out.data.resize(table.data.rows(), static_cast<Eigen::Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        out.data.col(static_cast<Eigen::Index>(i)) = table.data.col(static_cast<Eigen::Index>(order[i]));
        out.columns.push_back(table.columns[order[i]]);
    }
    return out;
}

SplitSpec make_splits(std::size_t rows, std::uint64_t seed, double test_fraction, double val_fraction)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0) || !(val_fraction >= 0.0 && val_fraction < 1.0)) {
        throw std::invalid_argument("split fractions must lie in (0, 1)");
    }
    std::vector<std::size_t> order(rows);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rng = make_rng(seed, 0x5370);
    std::shuffle(order.begin(), order.end(), rng);

    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows)));
    const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(rows - n_test)));
    SplitSpec s;
    s.seed = seed;
    s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                 order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
    s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test + n_val), order.end());
    for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
    return s;
}

Eigen::MatrixXd LinearModel::decision(const Eigen::MatrixXd& rows) const
{
    const Eigen::MatrixXd standardized = (rows.rowwise() - mean).array().rowwise() / scale.array();
    return (standardized * weights).rowwise() + bias;
}

std::vector<int> LinearModel::predict(const Eigen::MatrixXd& rows) const
{
    const Eigen::MatrixXd scores = decision(rows);
    std::vector<int> out(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        scores.row(i).maxCoeff(&best);
        out[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(best)];
    }
    return out;
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

double accuracy(const LinearModel& model, const FeatureTable& table, const std::vector<std::size_t>& idx)
{
    if (idx.empty()) return 0.0;
    const auto predicted = model.predict(take_rows(table.data, idx));
    std::size_t hits = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) hits += predicted[i] == (*table.labels)[idx[i]];
    return static_cast<double>(hits) / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train_linear(const FeatureTable& table, const SplitSpec& splits, const LinearOptions& options)
{
    if (!table.labels) throw std::invalid_argument("train_linear needs labels");
    if (splits.train.empty()) throw std::invalid_argument("train_linear needs a non-empty training split");
    const auto& labels = *table.labels;
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw std::invalid_argument("single-class data: nothing to classify");

    TrainResult result;
    LinearModel& model = result.model;
    model.classes.assign(distinct.begin(), distinct.end());
    const auto n_classes = static_cast<Eigen::Index>(model.classes.size());

    const Eigen::MatrixXd x_raw = take_rows(table.data, splits.train);
    const auto n = static_cast<double>(x_raw.rows());
    model.mean = x_raw.colwise().mean();
    const Eigen::MatrixXd centered = x_raw.rowwise() - model.mean;
    model.scale = (centered.colwise().squaredNorm() / n).cwiseSqrt();
    for (Eigen::Index c = 0; c < model.scale.size(); ++c) {
        if (!(model.scale(c) > 1e-12)) model.scale(c) = 1.0;
    }
    const Eigen::MatrixXd x = centered.array().rowwise() / model.scale.array();

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(x.rows(), n_classes);
    for (std::size_t i = 0; i < splits.train.size(); ++i) {
        const auto pos = std::lower_bound(model.classes.begin(), model.classes.end(), labels[splits.train[i]]) -
                         model.classes.begin();
        y(static_cast<Eigen::Index>(i), pos) = 1.0;
    }

    // Lipschitz bound of the mean logistic loss: 0.25 * lambda_max([x 1]^T [x 1] / n) + l2.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(x.cols() + 1);
    double top = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Eigen::VectorXd xv = x * v.head(x.cols()) + Eigen::VectorXd::Constant(x.rows(), v(x.cols()));
        Eigen::VectorXd w(x.cols() + 1);
        w.head(x.cols()) = x.transpose() * xv / n;
        w(x.cols()) = xv.sum() / n;
        top = w.norm();
        if (!(top > 0.0)) break;
        v = w / top;
    }
    const double rate = 1.0 / (0.25 * std::max(top, 1.0) * 1.01 + options.l2);

    model.weights = Eigen::MatrixXd::Zero(x.cols(), n_classes);
    model.bias = Eigen::RowVectorXd::Zero(n_classes);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        const Eigen::MatrixXd z = (x * model.weights).rowwise() + model.bias;
        const Eigen::MatrixXd residual = (1.0 / (1.0 + (-z.array()).exp())).matrix() - y;
        model.weights -= rate * (x.transpose() * residual / n + options.l2 * model.weights);
        model.bias -= rate * residual.colwise().mean();
    }

    result.train_accuracy = accuracy(model, table, splits.train);
    result.val_accuracy = accuracy(model, table, splits.val);
    result.test_accuracy = accuracy(model, table, splits.test);

    const auto predicted = model.predict(take_rows(table.data, splits.test));
    for (int cls : model.classes) {
        ClassMetrics m;
        m.label = cls;
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < splits.test.size(); ++i) {
            const bool truth = labels[splits.test[i]] == cls;
            const bool guess = predicted[i] == cls;
            tp += truth && guess;
            fp += !truth && guess;
            fn += truth && !guess;
        }
        m.support = tp + fn;
        m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        result.per_class.push_back(m);
    }
    return result;
}

std::vector<Importance> feature_importance(const LinearModel& model, const FeatureTable& table)
{
    if (static_cast<std::size_t>(model.weights.rows()) != table.columns.size()) {
        throw std::invalid_argument("model and feature table disagree on the column count");
    }
    const Eigen::VectorXd scores = model.weights.cwiseAbs().rowwise().maxCoeff();
    std::vector<Importance> ranked;
    ranked.reserve(table.columns.size());
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        Importance imp;
        imp.column = c;
        imp.score = scores(static_cast<Eigen::Index>(c));
        imp.info = table.columns[c];
        if (imp.info.kind == ColumnKind::lect) {
            auto it = table.grids.find(imp.info.hops);
            if (it != table.grids.end()) {
                imp.direction = it->second->directions().row(imp.info.direction).transpose();
                imp.threshold = it->second->thresholds()[static_cast<std::size_t>(imp.info.threshold)];
            }
        }
        ranked.push_back(std::move(imp));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Importance& a, const Importance& b) { return a.score > b.score; });
    return ranked;
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
    if (k > n) return 0;
    long double r = 1.0L;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return r > 1.8e19L ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(std::llround(r));
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b)
{
    if (a && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

// Next combination of `k` indices out of [0, n) in lexicographic order.
bool next_combination(std::vector<int>& c, int n)
{
    const int k = static_cast<int>(c.size());
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

}  // namespace

ReconstructionReport check_reconstruction_t1(const FeaturedGraph& graph, Index vertex, const SamplingGrid& grid,
                                             const LatticeSpec& lattice, int extra_neighbors, std::uint64_t budget)
{
    const int dim = graph.feature_dim();
    if (dim > 3) throw std::invalid_argument("reconstruction probe supports ambient dimension <= 3");
    if (grid.ambient_dim() != dim) throw std::invalid_argument("grid dimension does not match the graph");
    if (lattice.points_per_axis < 2 || !(lattice.spacing > 0.0)) throw std::invalid_argument("invalid lattice");

    const GeometricComplex complex = embed(graph);
    const Neighborhood patch = hop_neighborhood(complex, vertex, 1);
    if (patch.complex.num_vertices() > 10) throw std::invalid_argument("reconstruction probe needs <= 10 patch nodes");

    // Lattice points in row-major index order.
    const int per_axis = lattice.points_per_axis;
    int total = 1;
    for (int d = 0; d < dim; ++d) total *= per_axis;
    const double offset = 0.5 * (per_axis - 1);
    Points sites(total, dim);
    for (int p = 0; p < total; ++p) {
        int rest = p;
        for (int d = dim - 1; d >= 0; --d) {
            sites(p, d) = (rest % per_axis - offset) * lattice.spacing;
            rest /= per_axis;
        }
    }
    if (grid.upper() < sites.rowwise().norm().maxCoeff()) {
        throw std::invalid_argument("grid upper bound must cover the lattice");
    }
    auto site_of = [&](const Eigen::RowVectorXd& x) {
        int p = 0;
        for (int d = 0; d < dim; ++d) {
            const double coord = x(d) / lattice.spacing + offset;
            const double rounded = std::round(coord);
            if (std::abs(coord - rounded) > 1e-9 || rounded < 0 || rounded >= per_axis) {
                throw std::invalid_argument("patch features must lie on the lattice");
            }
            p = p * per_axis + static_cast<int>(rounded);
        }
        return p;
    };

    const Eigen::MatrixXd target = ect_hard_values(SimplexTable::from(patch.complex), grid);
    const int l = grid.num_thresholds();
    const auto chi = static_cast<long>(std::llround(target(0, l - 1)));
    const auto degree = static_cast<int>(patch.complex.num_vertices()) - 1;
    const long inner_edges = 1 - chi;  // chi = (1 + s) - (s + inner)

    // True configuration in lattice coordinates.
    const int true_center = site_of(patch.complex.vertices().row(patch.center));
    std::vector<int> true_neighbors;
    for (Index u = 0; u < patch.complex.num_vertices(); ++u) {
        if (u != patch.center) true_neighbors.push_back(site_of(patch.complex.vertices().row(u)));
    }
    std::vector<int> sorted_neighbors = true_neighbors;
    std::sort(sorted_neighbors.begin(), sorted_neighbors.end());
    std::set<std::pair<int, int>> true_inner;
    for (const Simplex& e : patch.complex.simplices(1)) {
        if (e[0] == patch.center || e[1] == patch.center) continue;
        const int a = site_of(patch.complex.vertices().row(e[0]));
        const int b = site_of(patch.complex.vertices().row(e[1]));
        true_inner.emplace(std::min(a, b), std::max(a, b));
    }

    const int max_neighbors = std::min(degree + extra_neighbors, total - 1);
    ReconstructionReport report;
    std::uint64_t planned = 0;
    for (int s = 0; s <= max_neighbors; ++s) {
        const auto pairs = static_cast<std::uint64_t>(s * (s - 1) / 2);
        if (inner_edges < 0 || static_cast<std::uint64_t>(inner_edges) > pairs) continue;
        planned += saturating_mul(binomial(static_cast<std::uint64_t>(total - 1), static_cast<std::uint64_t>(s)),
                                  binomial(pairs, static_cast<std::uint64_t>(inner_edges)));
    }
    planned = saturating_mul(planned, static_cast<std::uint64_t>(total));
    if (planned > budget) {
        throw BudgetExceeded("search budget exceeded: " + std::to_string(planned) + " candidates > " +
                             std::to_string(budget));
    }

    // bins[i][p]: first threshold index at or above the height of site p along direction i.
    const int m = grid.num_directions();
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(total)));
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd h = sites * grid.directions().row(i).transpose();
        for (int p = 0; p < total; ++p) {
            bins[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)] = static_cast<int>(
                std::lower_bound(grid.thresholds().begin(), grid.thresholds().end(), h(p)) - grid.thresholds().begin());
        }
    }

    std::set<std::pair<std::vector<int>, std::set<std::pair<int, int>>>> matched;
    std::vector<long> diff(static_cast<std::size_t>(l) + 1);
    std::vector<int> members;
    std::vector<std::pair<int, int>> inner;
    auto matches_target = [&]() {
        for (int i = 0; i < m; ++i) {
            const auto& b = bins[static_cast<std::size_t>(i)];
            std::fill(diff.begin(), diff.end(), 0);
            for (int p : members) ++diff[static_cast<std::size_t>(b[static_cast<std::size_t>(p)])];
            for (std::size_t q = 1; q < members.size(); ++q) {
                --diff[static_cast<std::size_t>(std::max(b[static_cast<std::size_t>(members[0])], b[static_cast<std::size_t>(members[q])]))];
            }
            for (auto [u, w] : inner) {
                --diff[static_cast<std::size_t>(std::max(b[static_cast<std::size_t>(u)], b[static_cast<std::size_t>(w)]))];
            }
            long running = 0;
            for (int j = 0; j < l; ++j) {
                running += diff[static_cast<std::size_t>(j)];
                if (static_cast<double>(running) != target(i, j)) return false;
            }
        }
        return true;
    };

    for (int center = 0; center < total; ++center) {
        std::vector<int> others;
        for (int p = 0; p < total; ++p) {
            if (p != center) others.push_back(p);
        }
        for (int s = 0; s <= max_neighbors; ++s) {
            const int pairs = s * (s - 1) / 2;
            if (inner_edges < 0 || inner_edges > pairs) continue;
            std::vector<int> pick(static_cast<std::size_t>(s));
            std::iota(pick.begin(), pick.end(), 0);
            do {
                members.assign(1, center);
                for (int q : pick) members.push_back(others[static_cast<std::size_t>(q)]);
                std::vector<std::pair<int, int>> all_pairs;
                for (int a = 1; a <= s; ++a) {
                    for (int b = a + 1; b <= s; ++b) all_pairs.emplace_back(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
                }
                std::vector<int> chosen(static_cast<std::size_t>(inner_edges));
                std::iota(chosen.begin(), chosen.end(), 0);
                do {
                    inner.clear();
                    for (int c : chosen) inner.push_back(all_pairs[static_cast<std::size_t>(c)]);
                    ++report.candidates;
                    if (!matches_target()) continue;
                    ++report.configurations;
                    std::vector<int> sites = members;
                    std::sort(sites.begin(), sites.end());
                    std::set<std::pair<int, int>> edges(inner.begin(), inner.end());
                    for (std::size_t q = 1; q < members.size(); ++q) {
                        edges.emplace(std::min(center, members[q]), std::max(center, members[q]));
                    }
                    matched.emplace(std::move(sites), std::move(edges));
                } while (next_combination(chosen, pairs));
            } while (next_combination(pick, total - 1));
        }
    }

    std::vector<int> true_sites = sorted_neighbors;
    true_sites.push_back(true_center);
    std::sort(true_sites.begin(), true_sites.end());
    std::set<std::pair<int, int>> true_edges = true_inner;
    for (int u : sorted_neighbors) true_edges.emplace(std::min(true_center, u), std::max(true_center, u));
    report.matches = matched.size();
    report.true_matched = matched.count({true_sites, true_edges}) > 0;
    return report;
}

DistinguishReport check_distinguishes_t2(const FeaturedGraph& g1, const FeaturedGraph& g2, const SamplingGrid& grid,
                                         int direction_floor, std::size_t max_nodes)
{
    DistinguishReport report;
    report.isomorphic = is_isomorphic_featured(g1, g2, max_nodes);
    const Eigen::MatrixXd a = ect_hard_values(SimplexTable::from(embed(g1)), grid);
    const Eigen::MatrixXd b = ect_hard_values(SimplexTable::from(embed(g2)), grid);
    report.ect_equal = a == b;
    report.grid_artifact = !report.holds() && grid.num_directions() < direction_floor;
    return report;
}

}  // namespace lect
