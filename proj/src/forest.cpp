#include "excast/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "excast/rng.hpp"

namespace excast {

double Tree::predict(std::span<const double> x) const {
    int node = 0;
    while (nodes[node].feature >= 0)
        node = x[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                               : nodes[node].right;
    return nodes[node].value;
}

namespace {

class TreeBuilder {
public:
    TreeBuilder(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                const ModelSpec& spec, std::mt19937_64 gen)
        : X_(X), y_(y), spec_(spec), gen_(gen), feature_pool_(X.front().size()) {
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
        mtry_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::lround(spec.feature_fraction * static_cast<double>(feature_pool_.size()))));
    }

    Tree build(std::vector<std::size_t> sample) {
        sample_ = std::move(sample);
        tree_.nodes.clear();
        grow(0, sample_.size(), 0);
        return std::move(tree_);
    }

private:
    int grow(std::size_t lo, std::size_t hi, int depth) {
        const std::size_t n = hi - lo;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += y_[sample_[i]];
        const double mean = sum / static_cast<double>(n);

        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back({});
        tree_.nodes[node_id].value = mean;

        if ((spec_.max_depth >= 0 && depth >= spec_.max_depth) ||
            n < 2 * static_cast<std::size_t>(spec_.min_leaf))
            return node_id;
        bool constant = true;
        for (std::size_t i = lo + 1; i < hi && constant; ++i)
            constant = y_[sample_[i]] == y_[sample_[lo]];
        if (constant) return node_id;

        // Draw the candidate features for this node without replacement.
        for (std::size_t i = 0; i < mtry_; ++i) {
            const std::size_t j =
                i + rng::bounded(gen_, feature_pool_.size() - i);
            std::swap(feature_pool_[i], feature_pool_[j]);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = sum * sum / static_cast<double>(n);
        const double base_score = best_score;

        std::vector<std::pair<double, double>> vals;  // (feature value, target)
        vals.reserve(n);
        for (std::size_t f = 0; f < mtry_; ++f) {
            const std::size_t feature = feature_pool_[f];
            vals.clear();
            for (std::size_t i = lo; i < hi; ++i)
                vals.emplace_back(X_[sample_[i]][feature], y_[sample_[i]]);
            std::sort(vals.begin(), vals.end());
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_sum += vals[i].second;
                const std::size_t nl = i + 1;
                if (nl < static_cast<std::size_t>(spec_.min_leaf)) continue;
                if (n - nl < static_cast<std::size_t>(spec_.min_leaf)) break;
                if (vals[i].first == vals[i + 1].first) continue;
                const double right_sum = sum - left_sum;
                const double score = left_sum * left_sum / static_cast<double>(nl) +
                                     right_sum * right_sum / static_cast<double>(n - nl);
                if (score > best_score + 1e-12) {
                    best_score = score;
                    best_feature = static_cast<int>(feature);
                    best_threshold = 0.5 * (vals[i].first + vals[i + 1].first);
                }
            }
        }
        if (best_feature < 0 || best_score <= base_score) return node_id;

        const auto mid = std::partition(
            sample_.begin() + static_cast<std::ptrdiff_t>(lo),
            sample_.begin() + static_cast<std::ptrdiff_t>(hi),
            [&](std::size_t i) { return X_[i][static_cast<std::size_t>(best_feature)] <= best_threshold; });
        const std::size_t cut = static_cast<std::size_t>(mid - sample_.begin());
        if (cut == lo || cut == hi) return node_id;  // numerically degenerate split

        tree_.nodes[node_id].feature = best_feature;
        tree_.nodes[node_id].threshold = best_threshold;
        const int left = grow(lo, cut, depth + 1);
        tree_.nodes[node_id].left = left;
        const int right = grow(cut, hi, depth + 1);
        tree_.nodes[node_id].right = right;
        return node_id;
    }

    const std::vector<std::vector<double>>& X_;
    const std::vector<double>& y_;
    const ModelSpec& spec_;
    std::mt19937_64 gen_;
    std::vector<std::size_t> feature_pool_;
    std::size_t mtry_;
    std::vector<std::size_t> sample_;
    Tree tree_;
};

}  // namespace

std::unique_ptr<ForestModel> ForestModel::fit(const std::vector<std::vector<double>>& X,
                                              const std::vector<double>& y, bool classification,
                                              const ModelSpec& spec,
                                              const std::vector<std::string>& feature_names) {
    const std::size_t n = X.size();
    if (n == 0 || n != y.size()) throw std::invalid_argument("bad training data shape");
    if (classification) {
        bool has0 = false, has1 = false;
        for (double v : y) (v >= 0.5 ? has1 : has0) = true;
        if (!has0 || !has1)
            throw std::runtime_error("degenerate target: classification needs both classes");
    }

    auto model = std::make_unique<ForestModel>();
    model->spec_ = spec;
    model->feature_names_ = feature_names;
    model->target_summary_ = summarize_target(y);
    model->classification_ = classification;
    model->trees_.reserve(static_cast<std::size_t>(spec.n_trees));

    for (int t = 0; t < spec.n_trees; ++t) {
        std::mt19937_64 gen(rng::mix(spec.seed ^ rng::mix(static_cast<std::uint64_t>(t) + 1)));
        std::vector<std::size_t> sample(n);
        if (spec.bootstrap)
            for (std::size_t i = 0; i < n; ++i) sample[i] = rng::bounded(gen, n);
        else
            std::iota(sample.begin(), sample.end(), 0);
        TreeBuilder builder(X, y, spec, gen);
        model->trees_.push_back(builder.build(std::move(sample)));
    }
    return model;
}

std::vector<double> ForestModel::member_predictions(std::span<const double> x) const {
    check_input(x);
    std::vector<double> out;
    out.reserve(trees_.size());
    for (const auto& tree : trees_) out.push_back(tree.predict(x));
    return out;
}

double ForestModel::predict_impl(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& tree : trees_) {
        const double v = tree.predict(x);
        sum += classification_ ? (v >= 0.5 ? 1.0 : 0.0) : v;
    }
    return sum / static_cast<double>(trees_.size());
}

void ForestModel::params_to_json(nlohmann::json& j) const {
    j["classification"] = classification_;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
}

std::unique_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<ForestModel>();
    model->classification_ = j.at("classification").get<bool>();
    for (const auto& tree_json : j.at("trees")) {
        Tree tree;
        for (const auto& n : tree_json) {
            TreeNode node;
            node.feature = n.at(0).get<int>();
            node.threshold = n.at(1).get<double>();
            node.left = n.at(2).get<int>();
            node.right = n.at(3).get<int>();
            node.value = n.at(4).get<double>();
            tree.nodes.push_back(node);
        }
        model->trees_.push_back(std::move(tree));
    }
    return model;
}

std::unique_ptr<Model> fit_tree_ensemble(const SupervisedDataset& ds, const ModelSpec& spec) {
    const std::size_t slot = ds.horizon_slot(spec.horizon);
    const bool classification = spec.family == ModelFamily::ForestClassifier;
    if (classification) {
        std::vector<double> yb(ds.b[slot].begin(), ds.b[slot].end());
        return ForestModel::fit(ds.X, yb, true, spec, ds.feature_names);
    }
    return ForestModel::fit(ds.X, ds.y[slot], false, spec, ds.feature_names);
}

}  // namespace excast
