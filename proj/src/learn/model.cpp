#include "prlat/learn/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <variant>

#include "prlat/error.hpp"
#include "prlat/learn/encode.hpp"
#include "prlat/learn/linear.hpp"
#include "prlat/learn/tree.hpp"
#include "prlat/rng.hpp"

namespace prlat {

namespace {

std::uint64_t row_identity_hash(const RowKey& key) {
    std::uint64_t h = hash_tag(key.project_id);
    h = splitmix64(h ^ static_cast<std::uint64_t>(key.pr_number) * 0x9e3779b97f4a7c15ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(key.instant.secs));
    return h;
}

// Canonical processing order: by measurement instant, then project/number.
// Training over a row-permuted matrix therefore visits identical data in an
// identical order and yields a bit-identical model.
std::vector<std::size_t> canonical_order(const FeatureMatrix& m) {
    std::vector<std::size_t> idx(m.n_rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = m.rows[a];
        const auto& rb = m.rows[b];
        if (ra.instant != rb.instant) return ra.instant < rb.instant;
        if (ra.project_id != rb.project_id) return ra.project_id < rb.project_id;
        return ra.pr_number < rb.pr_number;
    });
    return idx;
}

// Epoch visit order keyed to row identities rather than positions.
std::vector<std::size_t> keyed_epoch_order(const FeatureMatrix& m,
                                           std::span<const std::size_t> canonical,
                                           std::uint64_t epoch_seed) {
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(canonical.size());
    for (std::size_t i : canonical) {
        keyed.emplace_back(splitmix64(epoch_seed ^ row_identity_hash(m.rows[i])), i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<std::size_t> order;
    order.reserve(keyed.size());
    for (const auto& [_, i] : keyed) order.push_back(i);
    return order;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model cores
// ---------------------------------------------------------------------------

struct GbdtCore {
    std::array<double, kNumClasses> base_scores{};
    std::vector<Tree> trees;  // round-major, kNumClasses trees per round
    std::vector<double> train_loss;
};

struct ForestCore {
    std::vector<Tree> trees;
};

struct LinearCore {
    LinearWeights weights;
    bool softmax_output = true;  // false: raw margins (linear SVM)
};

struct MlpCore {
    MlpWeights weights;
};

struct NbCore {
    std::array<double, kNumClasses> log_prior{};
    std::vector<double> mean;  // kNumClasses x p
    std::vector<double> var;
};

struct KnnCore {
    int k = 15;
    EncodedMatrix train;
    std::vector<LatencyClass> labels;
};

struct TrainedModel::Impl {
    ModelKind kind = ModelKind::GBDT;
    std::vector<std::string> feature_names;
    PreprocBundle preproc;
    std::uint64_t seed = 0;
    nlohmann::ordered_json hp_echo;
    std::variant<GbdtCore, ForestCore, LinearCore, MlpCore, NbCore, KnnCore> core;

    const GbdtCore* gbdt() const { return std::get_if<GbdtCore>(&core); }
};

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace {

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::NonFinite, std::string("non-finite parameter in ") + what);
        }
    }
}

GbdtCore fit_gbdt(const FeatureMatrix& m, const Hyperparams::Gbdt& hp, std::uint64_t seed,
                  std::span<const std::size_t> canonical) {
    const std::size_t n = m.n_rows();
    const std::size_t p = m.n_cols();
    GbdtCore core;

    std::array<double, kNumClasses> counts{};
    for (auto y : m.labels) counts[static_cast<int>(y)] += 1.0;
    for (int c = 0; c < kNumClasses; ++c) {
        core.base_scores[c] = std::log(std::max(counts[c] / static_cast<double>(n), 1e-15));
    }
    if (hp.iterations == 0) return core;

    const auto binner = FeatureBinner::fit(m);
    const auto bins = binner.bin_rows(m);

    std::vector<double> f(n * kNumClasses);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < kNumClasses; ++c) f[i * kNumClasses + c] = core.base_scores[c];
    }

    RegressionTreeParams params;
    params.max_depth = hp.max_depth;
    params.min_samples_leaf = hp.min_samples_leaf;
    params.l2 = hp.l2_leaf;
    params.leaf_shrinkage = hp.learning_rate;

    std::vector<double> probs(n * kNumClasses);
    std::vector<double> grad(n), hess(n);
    auto round_rng = make_rng(derive_seed(seed, "gbdt_subsample"));

    for (int round = 0; round < hp.iterations; ++round) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::array<double, kNumClasses> z;
            for (int c = 0; c < kNumClasses; ++c) z[c] = f[i * kNumClasses + c];
            softmax_inplace(z);
            for (int c = 0; c < kNumClasses; ++c) probs[i * kNumClasses + c] = z[c];
            loss -= std::log(std::max(z[static_cast<int>(m.labels[i])], 1e-300));
        }
        core.train_loss.push_back(loss / static_cast<double>(n));

        std::vector<std::size_t> round_rows(canonical.begin(), canonical.end());
        if (hp.subsample < 1.0) {
            const auto keep =
                static_cast<std::size_t>(hp.subsample * static_cast<double>(n));
            for (std::size_t i = 0; i < keep; ++i) {
                const std::size_t j = i + draw_below(round_rng, round_rows.size() - i);
                std::swap(round_rows[i], round_rows[j]);
            }
            round_rows.resize(std::max<std::size_t>(keep, 1));
            std::sort(round_rows.begin(), round_rows.end());
        }

        for (int c = 0; c < kNumClasses; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                const double pk = probs[i * kNumClasses + c];
                grad[i] = pk - (static_cast<int>(m.labels[i]) == c ? 1.0 : 0.0);
                hess[i] = std::max(pk * (1.0 - pk), 1e-12);
            }
            auto tree = build_regression_tree(bins, p, binner, round_rows, grad, hess,
                                              params);
            for (std::size_t i = 0; i < n; ++i) {
                f[i * kNumClasses + c] += tree.predict_value(m.row(i));
            }
            core.trees.push_back(std::move(tree));
        }
    }
    return core;
}

ForestCore fit_forest(const FeatureMatrix& m, const Hyperparams::Forest& hp,
                      std::uint64_t seed, std::span<const std::size_t> canonical) {
    const std::size_t n = m.n_rows();
    const std::size_t p = m.n_cols();
    ForestCore core;
    const auto binner = FeatureBinner::fit(m);
    const auto bins = binner.bin_rows(m);

    ClassificationTreeParams params;
    params.max_depth = hp.max_depth;
    params.min_samples_leaf = hp.min_samples_leaf;
    params.max_features = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));

    for (int t = 0; t < hp.trees; ++t) {
        auto rng = make_rng(derive_seed(seed, "rf_tree", static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> sample(n);
        for (std::size_t i = 0; i < n; ++i) {
            sample[i] = canonical[draw_below(rng, n)];
        }
        std::sort(sample.begin(), sample.end());
        core.trees.push_back(build_classification_tree(bins, p, binner, sample, m.labels,
                                                       params, rng));
    }
    return core;
}

template <typename LossGrad>
LinearWeights sgd_linear(const FeatureMatrix& m, const EncodedMatrix& X,
                         std::span<const std::size_t> canonical, double l2, int epochs,
                         double lr0, double lr_decay, int batch_size, std::uint64_t seed,
                         LossGrad&& loss_grad, const char* what) {
    auto weights = LinearWeights::zeros(X.p);
    std::vector<double> grad;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        const auto order = keyed_epoch_order(
            m, canonical, derive_seed(seed, "epoch", static_cast<std::uint64_t>(epoch)));
        const double lr = lr0 / (1.0 + lr_decay * static_cast<double>(epoch));
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(batch_size));
            std::span<const std::size_t> batch(order.data() + start, end - start);
            const double loss = loss_grad(weights, X, m.labels, batch, l2, grad);
            if (!std::isfinite(loss)) {
                raise(ErrorCode::NonFinite, std::string(what) + " loss diverged");
            }
            for (std::size_t i = 0; i < weights.w.size(); ++i) {
                weights.w[i] -= lr * grad[i];
            }
        }
    }
    check_finite(weights.w, what);
    return weights;
}

MlpCore fit_mlp(const FeatureMatrix& m, const EncodedMatrix& X,
                std::span<const std::size_t> canonical, const Hyperparams::Mlp& hp,
                std::uint64_t seed) {
    MlpCore core;
    auto& w = core.weights;
    w.p = X.p;
    w.hidden = static_cast<std::size_t>(hp.hidden);
    w.w1.assign(w.hidden * (w.p + 1), 0.0);
    w.w2.assign(kNumClasses * (w.hidden + 1), 0.0);
    auto rng = make_rng(derive_seed(seed, "mlp_init"));
    const double s1 = std::sqrt(2.0 / static_cast<double>(w.p));
    for (std::size_t i = 0; i < w.hidden; ++i) {
        for (std::size_t j = 0; j < w.p; ++j) {
            w.w1[i * (w.p + 1) + j] = s1 * draw_normal(rng);
        }
    }
    const double s2 = std::sqrt(2.0 / static_cast<double>(w.hidden));
    for (int c = 0; c < kNumClasses; ++c) {
        for (std::size_t i = 0; i < w.hidden; ++i) {
            w.w2[c * (w.hidden + 1) + i] = s2 * draw_normal(rng);
        }
    }

    MlpWeights grad;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        const auto order = keyed_epoch_order(
            m, canonical, derive_seed(seed, "epoch", static_cast<std::uint64_t>(epoch)));
        const double lr = hp.learning_rate / (1.0 + hp.lr_decay * static_cast<double>(epoch));
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(hp.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(hp.batch_size));
            std::span<const std::size_t> batch(order.data() + start, end - start);
            const double loss = mlp_loss_grad(w, X, m.labels, batch, hp.l2, grad);
            if (!std::isfinite(loss)) raise(ErrorCode::NonFinite, "mlp loss diverged");
            for (std::size_t i = 0; i < w.w1.size(); ++i) w.w1[i] -= lr * grad.w1[i];
            for (std::size_t i = 0; i < w.w2.size(); ++i) w.w2[i] -= lr * grad.w2[i];
        }
    }
    check_finite(w.w1, "mlp");
    check_finite(w.w2, "mlp");
    return core;
}

NbCore fit_bayes(const FeatureMatrix& m, const EncodedMatrix& X,
                 std::span<const std::size_t> canonical, const Hyperparams::Bayes& hp) {
    NbCore core;
    const std::size_t p = X.p;
    core.mean.assign(kNumClasses * p, 0.0);
    core.var.assign(kNumClasses * p, 0.0);
    std::array<double, kNumClasses> counts{};
    for (std::size_t i : canonical) {
        const int c = static_cast<int>(m.labels[i]);
        counts[c] += 1.0;
        const auto x = X.row(i);
        for (std::size_t j = 0; j < p; ++j) core.mean[c * p + j] += x[j];
    }
    for (int c = 0; c < kNumClasses; ++c) {
        if (counts[c] == 0.0) continue;
        for (std::size_t j = 0; j < p; ++j) core.mean[c * p + j] /= counts[c];
    }
    for (std::size_t i : canonical) {
        const int c = static_cast<int>(m.labels[i]);
        const auto x = X.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = x[j] - core.mean[c * p + j];
            core.var[c * p + j] += d * d;
        }
    }
    const double n = static_cast<double>(canonical.size());
    for (int c = 0; c < kNumClasses; ++c) {
        core.log_prior[c] = std::log(std::max(counts[c] / n, 1e-15));
        for (std::size_t j = 0; j < p; ++j) {
            double& v = core.var[c * p + j];
            v = counts[c] > 0.0 ? std::max(v / counts[c], hp.variance_floor)
                                : hp.variance_floor;
        }
    }
    return core;
}

}  // namespace

// ---------------------------------------------------------------------------
// TrainedModel surface
// ---------------------------------------------------------------------------

TrainedModel::TrainedModel() : impl_(std::make_unique<Impl>()) {}
TrainedModel::~TrainedModel() = default;
TrainedModel::TrainedModel(TrainedModel&&) noexcept = default;
TrainedModel& TrainedModel::operator=(TrainedModel&&) noexcept = default;
TrainedModel::TrainedModel(const TrainedModel& other)
    : impl_(std::make_unique<Impl>(*other.impl_)) {}

ModelKind TrainedModel::kind() const { return impl_->kind; }
const std::vector<std::string>& TrainedModel::feature_names() const {
    return impl_->feature_names;
}
std::uint64_t TrainedModel::seed() const { return impl_->seed; }

std::vector<double> TrainedModel::gbdt_train_loss() const {
    if (const auto* gbdt = impl_->gbdt()) return gbdt->train_loss;
    return {};
}

bool TrainedModel::uses_feature(std::size_t feature_index) const {
    const auto idx = static_cast<int>(feature_index);
    if (const auto* gbdt = std::get_if<GbdtCore>(&impl_->core)) {
        for (const auto& t : gbdt->trees) {
            if (tree_uses_feature(t, idx)) return true;
        }
        return false;
    }
    if (const auto* forest = std::get_if<ForestCore>(&impl_->core)) {
        for (const auto& t : forest->trees) {
            if (tree_uses_feature(t, idx)) return true;
        }
        return false;
    }
    return true;
}

TrainedModel train(ModelKind kind, const FeatureMatrix& matrix, const Hyperparams& hp,
                   std::uint64_t seed) {
    const std::size_t n = matrix.n_rows();
    if (n < 10) raise(ErrorCode::TooFewRows, "training requires >= 10 rows");
    {
        std::array<int, kNumClasses> counts{};
        for (auto y : matrix.labels) ++counts[static_cast<int>(y)];
        int present = 0;
        for (int c : counts) present += (c > 0);
        if (present < 2) raise(ErrorCode::Degenerate, "training labels are single-class");
    }

    TrainedModel model;
    auto& impl = *model.impl_;
    impl.kind = kind;
    impl.feature_names = matrix.feature_names;
    impl.seed = seed;
    impl.hp_echo = hp.to_json();
    impl.preproc = PreprocBundle::fit(kind, matrix);

    const auto canonical = canonical_order(matrix);

    switch (kind) {
        case ModelKind::GBDT:
            impl.core = fit_gbdt(matrix, hp.gbdt, seed, canonical);
            break;
        case ModelKind::RANDOM_FOREST:
            impl.core = fit_forest(matrix, hp.forest, seed, canonical);
            break;
        case ModelKind::LOGISTIC: {
            const auto X = impl.preproc.encode(matrix);
            LinearCore core;
            core.softmax_output = true;
            core.weights = sgd_linear(matrix, X, canonical, hp.logistic.l2,
                                      hp.logistic.epochs, hp.logistic.learning_rate,
                                      hp.logistic.lr_decay, hp.logistic.batch_size, seed,
                                      softmax_xent_loss_grad, "logistic");
            impl.core = std::move(core);
            break;
        }
        case ModelKind::LINEAR_SVM: {
            const auto X = impl.preproc.encode(matrix);
            LinearCore core;
            core.softmax_output = false;
            core.weights = sgd_linear(matrix, X, canonical, hp.svm.l2, hp.svm.epochs,
                                      hp.svm.learning_rate, hp.svm.lr_decay,
                                      hp.svm.batch_size, seed, hinge_ovr_loss_grad,
                                      "linear_svm");
            impl.core = std::move(core);
            break;
        }
        case ModelKind::MLP: {
            const auto X = impl.preproc.encode(matrix);
            impl.core = fit_mlp(matrix, X, canonical, hp.mlp, seed);
            break;
        }
        case ModelKind::NAIVE_BAYES: {
            const auto X = impl.preproc.encode(matrix);
            impl.core = fit_bayes(matrix, X, canonical, hp.bayes);
            break;
        }
        case ModelKind::KNN: {
            KnnCore core;
            core.k = hp.knn.k;
            const auto X = impl.preproc.encode(matrix);
            // store rows in canonical order so neighbor tie-breaks are stable
            core.train.n = X.n;
            core.train.p = X.p;
            core.train.values.reserve(X.values.size());
            for (std::size_t i : canonical) {
                const auto row = X.row(i);
                core.train.values.insert(core.train.values.end(), row.begin(), row.end());
                core.labels.push_back(matrix.labels[i]);
            }
            impl.core = std::move(core);
            break;
        }
    }
    return model;
}

std::vector<double> TrainedModel::predict_row(std::span<const double> row) const {
    const auto& impl = *impl_;
    if (row.size() != impl.feature_names.size()) {
        raise(ErrorCode::FeatureMismatch,
              "expected " + std::to_string(impl.feature_names.size()) + " features, got " +
                  std::to_string(row.size()));
    }
    std::vector<double> scores(kNumClasses, 0.0);

    if (const auto* gbdt = std::get_if<GbdtCore>(&impl.core)) {
        std::array<double, kNumClasses> f = gbdt->base_scores;
        const std::size_t rounds = gbdt->trees.size() / kNumClasses;
        for (std::size_t r = 0; r < rounds; ++r) {
            for (int c = 0; c < kNumClasses; ++c) {
                f[c] += gbdt->trees[r * kNumClasses + c].predict_value(row);
            }
        }
        softmax_inplace(f);
        for (int c = 0; c < kNumClasses; ++c) scores[c] = f[c];
        return scores;
    }
    if (const auto* forest = std::get_if<ForestCore>(&impl.core)) {
        for (const auto& tree : forest->trees) {
            const auto& dist = tree.predict_dist(row);
            for (int c = 0; c < kNumClasses; ++c) scores[c] += dist[c];
        }
        const double inv = 1.0 / static_cast<double>(forest->trees.size());
        for (double& s : scores) s *= inv;
        return scores;
    }

    std::vector<double> enc(impl.preproc.encoded_width());
    impl.preproc.encode_row(row, enc);

    if (const auto* linear = std::get_if<LinearCore>(&impl.core)) {
        const auto& w = linear->weights;
        for (int c = 0; c < kNumClasses; ++c) {
            double s = w.at(c, w.p);
            for (std::size_t j = 0; j < w.p; ++j) s += w.at(c, j) * enc[j];
            scores[c] = s;
        }
        if (linear->softmax_output) {
            softmax_inplace(scores);
        }
        return scores;
    }
    if (const auto* mlp = std::get_if<MlpCore>(&impl.core)) {
        std::vector<double> hidden(mlp->weights.hidden);
        mlp_forward(mlp->weights, enc, hidden, scores);
        softmax_inplace(scores);
        return scores;
    }
    if (const auto* nb = std::get_if<NbCore>(&impl.core)) {
        const std::size_t p = enc.size();
        for (int c = 0; c < kNumClasses; ++c) {
            double logp = nb->log_prior[c];
            for (std::size_t j = 0; j < p; ++j) {
                const double var = nb->var[c * p + j];
                const double d = enc[j] - nb->mean[c * p + j];
                logp += -0.5 * (std::log(2.0 * 3.141592653589793 * var) + d * d / var);
            }
            scores[c] = logp;
        }
        softmax_inplace(scores);  // normalize joint log-densities to posteriors
        return scores;
    }
    const auto& knn = std::get<KnnCore>(impl.core);
    const std::size_t n = knn.train.n;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(knn.k), n);
    std::vector<std::pair<double, std::size_t>> dists(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = knn.train.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < t.size(); ++j) {
            const double d = t[j] - enc[j];
            d2 += d * d;
        }
        dists[i] = {d2, i};
    }
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k),
                      dists.end());
    for (std::size_t i = 0; i < k; ++i) {
        scores[static_cast<int>(knn.labels[dists[i].second])] += 1.0;
    }
    for (double& s : scores) s /= static_cast<double>(k);
    return scores;
}

std::vector<double> TrainedModel::predict_scores(const FeatureMatrix& rows) const {
    if (rows.feature_names != impl_->feature_names) {
        raise(ErrorCode::FeatureMismatch, "matrix features do not match the model");
    }
    std::vector<double> out;
    out.reserve(rows.n_rows() * kNumClasses);
    for (std::size_t r = 0; r < rows.n_rows(); ++r) {
        const auto s = predict_row(rows.row(r));
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json trees_to_json(const std::vector<Tree>& trees) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : trees) arr.push_back(t.to_json());
    return arr;
}

std::vector<Tree> trees_from_json(const nlohmann::json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j) trees.push_back(Tree::from_json(t));
    return trees;
}

}  // namespace

void TrainedModel::save(const std::filesystem::path& path) const {
    const auto& impl = *impl_;
    nlohmann::ordered_json j;
    j["format"] = "prlat-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = model_kind_name(impl.kind);
    j["classes"] = {latency_class_name(LatencyClass::WITHIN_1_DAY),
                    latency_class_name(LatencyClass::DAY_TO_WEEK),
                    latency_class_name(LatencyClass::OVER_WEEK)};
    j["feature_names"] = impl.feature_names;
    j["seed"] = impl.seed;
    j["hyperparams"] = impl.hp_echo;
    j["preproc"] = impl.preproc.to_json();

    nlohmann::ordered_json params;
    if (const auto* gbdt = std::get_if<GbdtCore>(&impl.core)) {
        params["base_scores"] = gbdt->base_scores;
        params["trees"] = trees_to_json(gbdt->trees);
        params["train_loss"] = gbdt->train_loss;
    } else if (const auto* forest = std::get_if<ForestCore>(&impl.core)) {
        params["trees"] = trees_to_json(forest->trees);
    } else if (const auto* linear = std::get_if<LinearCore>(&impl.core)) {
        params["p"] = linear->weights.p;
        params["weights"] = linear->weights.w;
        params["softmax_output"] = linear->softmax_output;
    } else if (const auto* mlp = std::get_if<MlpCore>(&impl.core)) {
        params["p"] = mlp->weights.p;
        params["hidden"] = mlp->weights.hidden;
        params["w1"] = mlp->weights.w1;
        params["w2"] = mlp->weights.w2;
    } else if (const auto* nb = std::get_if<NbCore>(&impl.core)) {
        params["log_prior"] = nb->log_prior;
        params["mean"] = nb->mean;
        params["var"] = nb->var;
    } else {
        const auto& knn = std::get<KnnCore>(impl.core);
        params["k"] = knn.k;
        params["n"] = knn.train.n;
        params["p"] = knn.train.p;
        params["values"] = knn.train.values;
        auto labels = nlohmann::ordered_json::array();
        for (auto y : knn.labels) labels.push_back(static_cast<int>(y));
        params["labels"] = std::move(labels);
    }
    j["params"] = std::move(params);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::Io, "cannot write " + path.string());
    out << j.dump() << '\n';
    if (!out.flush()) raise(ErrorCode::Io, "write failed for " + path.string());
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::Io, "cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        raise(ErrorCode::SchemaMismatch, "model bundle unparseable: " + std::string(e.what()));
    }
    if (j.value("format", std::string{}) != "prlat-model" ||
        j.value("version", -1) != kModelFormatVersion) {
        raise(ErrorCode::SchemaMismatch, "unrecognized model bundle header");
    }

    TrainedModel model;
    auto& impl = *model.impl_;
    try {
        impl.kind = parse_model_kind(j.at("kind").get<std::string>());
        impl.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        impl.seed = j.at("seed").get<std::uint64_t>();
        impl.hp_echo = j.at("hyperparams");
        impl.preproc = PreprocBundle::from_json(j.at("preproc"));
        const auto& params = j.at("params");
        switch (impl.kind) {
            case ModelKind::GBDT: {
                GbdtCore core;
                const auto base = params.at("base_scores").get<std::vector<double>>();
                std::copy(base.begin(), base.end(), core.base_scores.begin());
                core.trees = trees_from_json(params.at("trees"));
                core.train_loss = params.at("train_loss").get<std::vector<double>>();
                impl.core = std::move(core);
                break;
            }
            case ModelKind::RANDOM_FOREST: {
                ForestCore core;
                core.trees = trees_from_json(params.at("trees"));
                impl.core = std::move(core);
                break;
            }
            case ModelKind::LOGISTIC:
            case ModelKind::LINEAR_SVM: {
                LinearCore core;
                core.weights.p = params.at("p").get<std::size_t>();
                core.weights.w = params.at("weights").get<std::vector<double>>();
                core.softmax_output = params.at("softmax_output").get<bool>();
                impl.core = std::move(core);
                break;
            }
            case ModelKind::MLP: {
                MlpCore core;
                core.weights.p = params.at("p").get<std::size_t>();
                core.weights.hidden = params.at("hidden").get<std::size_t>();
                core.weights.w1 = params.at("w1").get<std::vector<double>>();
                core.weights.w2 = params.at("w2").get<std::vector<double>>();
                impl.core = std::move(core);
                break;
            }
            case ModelKind::NAIVE_BAYES: {
                NbCore core;
                const auto prior = params.at("log_prior").get<std::vector<double>>();
                std::copy(prior.begin(), prior.end(), core.log_prior.begin());
                core.mean = params.at("mean").get<std::vector<double>>();
                core.var = params.at("var").get<std::vector<double>>();
                impl.core = std::move(core);
                break;
            }
            case ModelKind::KNN: {
                KnnCore core;
                core.k = params.at("k").get<int>();
                core.train.n = params.at("n").get<std::size_t>();
                core.train.p = params.at("p").get<std::size_t>();
                core.train.values = params.at("values").get<std::vector<double>>();
                for (const auto& y : params.at("labels")) {
                    core.labels.push_back(static_cast<LatencyClass>(y.get<int>()));
                }
                impl.core = std::move(core);
                break;
            }
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        raise(ErrorCode::SchemaMismatch, "model bundle field error: " + std::string(e.what()));
    }
    return model;
}

}  // namespace prlat
