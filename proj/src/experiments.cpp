#include "lect/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "lect/alignment.hpp"
#include "lect/datagen.hpp"
#include "lect/ect.hpp"
#include "lect/parallel.hpp"
#include "lect/pipeline.hpp"

namespace lect {

namespace {

const std::vector<std::string> kExperiments{"kstar-align", "wedge-align", "hetero-class", "ablation-subsample"};

std::uint64_t derive(std::uint64_t seed, std::uint64_t trial, std::uint64_t salt)
{
    auto rng = make_rng(seed, (trial << 8) | salt);
    return rng();
}

AlignOptions align_options(const ReproConfig& c, std::uint64_t seed)
{
    AlignOptions o;
    o.sharpness = c.sharpness;
    o.restarts = c.restarts;
    o.max_iters = c.max_iters;
    o.seed = seed;
    return o;
}

std::shared_ptr<const SamplingGrid> grid_for(const ReproConfig& c, int n)
{
    return std::make_shared<const SamplingGrid>(
        make_grid(n, c.num_directions, c.num_thresholds, c.bounds.first, c.bounds.second, c.seed));
}

Json run_kstar(const ReproConfig& c)
{
    const auto grid = grid_for(c, 2);
    const std::size_t per_k = static_cast<std::size_t>(c.trials);
    std::vector<Json> records(c.ks.size() * per_k);
    parallel_for(records.size(), c.jobs, [&](std::size_t idx) {
        const int k = c.ks[idx / per_k];
        const GeometricComplex x = gen_k_star(k, c.radius, derive(c.seed, idx, 1));
        auto rng = make_rng(derive(c.seed, idx, 2));
        const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        const GeometricComplex y = rotate(x, RotationParams::from_angle(angle));
        const AlignmentResult r = align(x, y, *grid, align_options(c, derive(c.seed, idx, 3)));
        Json rec;
        rec["trial"] = idx % per_k;
        rec["k"] = k;
        rec["angle"] = angle;
        rec["hausdorff_pre"] = hausdorff(x.vertices(), y.vertices());
        rec["hausdorff_post"] = hausdorff(x.vertices(), r.apply(y.vertices()));
        rec["loss_l2sq"] = r.final_loss_l2sq;
        rec["loss_linf"] = r.final_loss_linf;
        rec["best_restart"] = r.best_restart;
        records[idx] = std::move(rec);
    });

    Json results;
    std::vector<double> all_pre, all_post;
    Json per_k_results = Json::array();
    for (std::size_t ki = 0; ki < c.ks.size(); ++ki) {
        std::vector<double> pre, post;
        std::size_t exact = 0;
        for (std::size_t t = 0; t < per_k; ++t) {
            const Json& rec = records[ki * per_k + t];
            pre.push_back(rec["hausdorff_pre"].get<double>());
            post.push_back(rec["hausdorff_post"].get<double>());
            exact += rec["loss_linf"].get<double>() == 0.0;
        }
        all_pre.insert(all_pre.end(), pre.begin(), pre.end());
        all_post.insert(all_post.end(), post.begin(), post.end());
        Json entry;
        entry["k"] = c.ks[ki];
        entry["median_hausdorff_pre"] = median(pre);
        entry["median_hausdorff_post"] = median(post);
        entry["exact_recoveries"] = exact;
        per_k_results.push_back(std::move(entry));
    }
    results["per_k"] = std::move(per_k_results);
    results["median_hausdorff_pre"] = median(all_pre);
    results["median_hausdorff_post"] = median(all_post);
    Json out;
    out["results"] = std::move(results);
    out["trials"] = Json(records);
    return out;
}

Json run_wedge(const ReproConfig& c)
{
    const auto grid = grid_for(c, 3);
    std::vector<Json> records(static_cast<std::size_t>(c.trials));
    const int outliers = static_cast<int>(std::llround(c.outlier_fraction * 2.0 * c.points_per_sphere));
    parallel_for(records.size(), c.jobs, [&](std::size_t t) {
        const GeometricComplex x = gen_wedged_spheres(c.points_per_sphere, 0.0, 0, derive(c.seed, t, 1));
        auto rng = make_rng(derive(c.seed, t, 2));
        const RotationParams rho = RotationParams::random(3, rng, std::numbers::pi);
        const GeometricComplex y_clean = rotate(x, rho);
        const GeometricComplex y =
            GeometricComplex::point_cloud(corrupt(y_clean.vertices(), c.noise_sigma, outliers, derive(c.seed, t, 3)));
        const AlignmentResult r = align(x, y, *grid, align_options(c, derive(c.seed, t, 4)));
        Json rec;
        rec["trial"] = t;
        rec["loss_identity_l2sq"] = r.initial_loss_l2sq;
        rec["loss_aligned_l2sq"] = r.final_loss_l2sq;
        rec["loss_aligned_linf"] = r.final_loss_linf;
        rec["hausdorff_pre"] = hausdorff(x.vertices(), y_clean.vertices());
        rec["hausdorff_post"] = hausdorff(x.vertices(), r.apply(y_clean.vertices()));
        rec["best_restart"] = r.best_restart;
        records[t] = std::move(rec);
    });

    std::vector<double> identity, aligned, pre, post;
    for (const Json& rec : records) {
        identity.push_back(rec["loss_identity_l2sq"].get<double>());
        aligned.push_back(rec["loss_aligned_l2sq"].get<double>());
        pre.push_back(rec["hausdorff_pre"].get<double>());
        post.push_back(rec["hausdorff_post"].get<double>());
    }
    Json results;
    results["outliers"] = outliers;
    results["median_loss_identity_l2sq"] = median(identity);
    results["median_loss_aligned_l2sq"] = median(aligned);
    results["loss_ratio"] = median(aligned) / median(identity);
    results["median_hausdorff_pre"] = median(pre);
    results["median_hausdorff_post"] = median(post);
    results["hausdorff_ratio"] = median(post) / median(pre);
    Json out;
    out["results"] = std::move(results);
    out["trials"] = Json(records);
    return out;
}

FeatureTable hetero_table(const ReproConfig& c, std::size_t t, FeaturedGraph& graph)
{
    graph = gen_heterophily_graph(c.nodes, c.classes, c.feat_dim, c.homophily, derive(c.seed, t, 1), c.degree);
    FeatureOptions fo;
    fo.hops = c.hops;
    fo.num_directions = c.num_directions;
    fo.num_thresholds = c.num_thresholds;
    fo.seed = derive(c.seed, t, 2);
    fo.budget = c.budget;
    return build_features(graph, fo);
}

double test_accuracy(const ReproConfig& c, const FeatureTable& table, const SplitSpec& splits)
{
    return train_linear(table, splits, {c.epochs, c.l2}).test_accuracy;
}

Json run_hetero(const ReproConfig& c)
{
    std::vector<Json> records(static_cast<std::size_t>(c.trials));
    parallel_for(records.size(), c.jobs, [&](std::size_t t) {
        FeaturedGraph graph;
        const FeatureTable full = hetero_table(c, t, graph);
        const SplitSpec splits = make_splits(full.rows(), derive(c.seed, t, 3));
        Json rec;
        rec["trial"] = t;
        rec["homophily"] = edge_homophily(graph);
        rec["accuracy_raw"] = test_accuracy(c, subsample_features(full, 0, 0), splits);
        rec["accuracy_lect"] = test_accuracy(c, full, splits);
        records[t] = std::move(rec);
    });
    std::vector<double> raw, with_lect, lift;
    for (const Json& rec : records) {
        raw.push_back(rec["accuracy_raw"].get<double>());
        with_lect.push_back(rec["accuracy_lect"].get<double>());
        lift.push_back(with_lect.back() - raw.back());
    }
    Json results;
    results["median_accuracy_raw"] = median(raw);
    results["median_accuracy_lect"] = median(with_lect);
    results["median_lift"] = median(lift);
    results["lift_of_medians"] = median(with_lect) - median(raw);
    Json out;
    out["results"] = std::move(results);
    out["trials"] = Json(records);
    return out;
}

Json run_ablation(const ReproConfig& c)
{
    const std::size_t per_trial = c.counts.size();
    std::vector<Json> records(static_cast<std::size_t>(c.trials) * per_trial);
    parallel_for(static_cast<std::size_t>(c.trials), c.jobs, [&](std::size_t t) {
        FeaturedGraph graph;
        const FeatureTable full = hetero_table(c, t, graph);
        const SplitSpec splits = make_splits(full.rows(), derive(c.seed, t, 3));
        for (std::size_t i = 0; i < per_trial; ++i) {
            const std::size_t keep = c.counts[i] < 0 ? full.lect_columns() : static_cast<std::size_t>(c.counts[i]);
            Json rec;
            rec["trial"] = t;
            rec["count"] = keep;
            rec["accuracy"] = test_accuracy(c, subsample_features(full, keep, derive(c.seed, t, 4 + i)), splits);
            records[t * per_trial + i] = std::move(rec);
        }
    });
    Json per_count = Json::array();
    std::vector<double> medians;
    for (std::size_t i = 0; i < per_trial; ++i) {
        std::vector<double> acc;
        for (std::size_t t = 0; t < static_cast<std::size_t>(c.trials); ++t) {
            acc.push_back(records[t * per_trial + i]["accuracy"].get<double>());
        }
        medians.push_back(median(acc));
        Json entry;
        entry["count"] = records[i]["count"];
        entry["median_accuracy"] = medians.back();
        per_count.push_back(std::move(entry));
    }
    double worst_drop = 0.0;
    for (std::size_t i = 1; i < medians.size(); ++i) worst_drop = std::max(worst_drop, medians[i - 1] - medians[i]);
    Json results;
    results["per_count"] = std::move(per_count);
    results["largest_median_drop"] = worst_drop;
    Json out;
    out["results"] = std::move(results);
    out["trials"] = Json(records);
    return out;
}

template <typename T>
void read_field(const Json& j, const char* key, T& field)
{
    if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

double median(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("median of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<std::string> experiment_ids() { return kExperiments; }

ReproConfig ReproConfig::defaults(const std::string& experiment)
{
    if (std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end()) {
        throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }
    ReproConfig c;
    c.experiment = experiment;
    if (experiment == "wedge-align") {
        c.num_directions = 32;
        c.num_thresholds = 32;
    } else if (experiment == "hetero-class" || experiment == "ablation-subsample") {
        c.trials = 10;
    }
    return c;
}

Json ReproConfig::to_json() const
{
    Json j;
    j["experiment"] = experiment;
    j["trials"] = trials;
    j["seed"] = seed;
    j["m"] = num_directions;
    j["l"] = num_thresholds;
    j["bounds"] = {bounds.first, bounds.second};
    j["lambda"] = sharpness;
    j["restarts"] = restarts;
    j["max_iters"] = max_iters;
    j["jobs"] = jobs;
    j["ks"] = ks;
    j["radius"] = radius;
    j["points_per_sphere"] = points_per_sphere;
    j["noise_sigma"] = noise_sigma;
    j["outlier_fraction"] = outlier_fraction;
    j["nodes"] = nodes;
    j["classes"] = classes;
    j["feat_dim"] = feat_dim;
    j["homophily"] = homophily;
    j["degree"] = degree;
    j["hops"] = hops;
    j["counts"] = counts;
    j["epochs"] = epochs;
    j["l2"] = l2;
    j["budget"] = budget;
    return j;
}

ReproConfig ReproConfig::from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("experiment")) throw std::invalid_argument("config must name an experiment");
    ReproConfig c = defaults(j.at("experiment").get<std::string>());
    read_field(j, "trials", c.trials);
    read_field(j, "seed", c.seed);
    read_field(j, "m", c.num_directions);
    read_field(j, "l", c.num_thresholds);
    if (j.contains("bounds")) {
        const auto b = j.at("bounds").get<std::vector<double>>();
        if (b.size() != 2) throw std::invalid_argument("bounds must hold two numbers");
        c.bounds = {b[0], b[1]};
    }
    read_field(j, "lambda", c.sharpness);
    read_field(j, "restarts", c.restarts);
    read_field(j, "max_iters", c.max_iters);
    read_field(j, "jobs", c.jobs);
    read_field(j, "ks", c.ks);
    read_field(j, "radius", c.radius);
    read_field(j, "points_per_sphere", c.points_per_sphere);
    read_field(j, "noise_sigma", c.noise_sigma);
    read_field(j, "outlier_fraction", c.outlier_fraction);
    read_field(j, "nodes", c.nodes);
    read_field(j, "classes", c.classes);
    read_field(j, "feat_dim", c.feat_dim);
    read_field(j, "homophily", c.homophily);
    read_field(j, "degree", c.degree);
    read_field(j, "hops", c.hops);
    read_field(j, "counts", c.counts);
    read_field(j, "epochs", c.epochs);
    read_field(j, "l2", c.l2);
    read_field(j, "budget", c.budget);
    c.validate();
    return c;
}

void ReproConfig::validate() const
{
    defaults(experiment);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (num_directions < 1 || num_thresholds < 2) throw std::invalid_argument("grid needs m >= 1 and l >= 2");
    if (!(bounds.first < bounds.second)) throw std::invalid_argument("bounds must satisfy a < b");
    if (!(sharpness > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (restarts < 1 || max_iters < 1) throw std::invalid_argument("restarts and max_iters must be >= 1");
    if (ks.empty()) throw std::invalid_argument("ks must not be empty");
    if (outlier_fraction < 0.0 || noise_sigma < 0.0) throw std::invalid_argument("noise and outliers must be >= 0");
    if (hops.empty()) throw std::invalid_argument("hops must not be empty");
    if (counts.empty()) throw std::invalid_argument("counts must not be empty");
    if (epochs < 1 || l2 < 0.0) throw std::invalid_argument("invalid classifier options");
}

Json run_repro(const ReproConfig& config)
{
    config.validate();
    Json body;
    if (config.experiment == "kstar-align") body = run_kstar(config);
    else if (config.experiment == "wedge-align") body = run_wedge(config);
    else if (config.experiment == "hetero-class") body = run_hetero(config);
    else body = run_ablation(config);

    Json report;
    report["config"] = config.to_json();
    report["results"] = std::move(body["results"]);
    report["trials"] = std::move(body["trials"]);
    return report;
}

std::vector<std::string> trials_csv(const Json& report)
{
    std::vector<std::string> lines;
    const Json& trials = report.at("trials");
    if (trials.empty()) return lines;
    std::string header;
    for (const auto& [key, value] : trials.front().items()) header += (header.empty() ? "" : ",") + key;
    lines.push_back(header);
    for (const Json& rec : trials) {
        std::string row;
        bool first = true;
        for (const auto& [key, value] : rec.items()) {
            if (!first) row += ',';
            first = false;
            row += value.is_number_float() ? format_double(value.get<double>()) : value.dump();
        }
        lines.push_back(row);
    }
    return lines;
}

}  // namespace lect
