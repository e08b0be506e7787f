#include "prlat/learn/hyperparams.hpp"

#include <set>

#include "prlat/error.hpp"

namespace prlat {

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::GBDT: return "gbdt";
        case ModelKind::KNN: return "knn";
        case ModelKind::LOGISTIC: return "logistic";
        case ModelKind::NAIVE_BAYES: return "naive_bayes";
        case ModelKind::MLP: return "mlp";
        case ModelKind::RANDOM_FOREST: return "random_forest";
        case ModelKind::LINEAR_SVM: return "linear_svm";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    for (ModelKind kind : kAllModelKinds) {
        if (name == model_kind_name(kind)) return kind;
    }
    raise(ErrorCode::Parse, "unknown model kind: " + name);
}

nlohmann::ordered_json Hyperparams::to_json() const {
    nlohmann::ordered_json j;
    j["gbdt"] = {{"iterations", gbdt.iterations},
                 {"learning_rate", gbdt.learning_rate},
                 {"max_depth", gbdt.max_depth},
                 {"min_samples_leaf", gbdt.min_samples_leaf},
                 {"subsample", gbdt.subsample},
                 {"l2_leaf", gbdt.l2_leaf}};
    j["random_forest"] = {{"trees", forest.trees},
                          {"max_depth", forest.max_depth},
                          {"min_samples_leaf", forest.min_samples_leaf}};
    j["knn"] = {{"k", knn.k}};
    j["logistic"] = {{"l2", logistic.l2},
                     {"epochs", logistic.epochs},
                     {"learning_rate", logistic.learning_rate},
                     {"lr_decay", logistic.lr_decay},
                     {"batch_size", logistic.batch_size}};
    j["mlp"] = {{"hidden", mlp.hidden},
                {"l2", mlp.l2},
                {"epochs", mlp.epochs},
                {"learning_rate", mlp.learning_rate},
                {"lr_decay", mlp.lr_decay},
                {"batch_size", mlp.batch_size}};
    j["linear_svm"] = {{"l2", svm.l2},
                       {"epochs", svm.epochs},
                       {"learning_rate", svm.learning_rate},
                       {"lr_decay", svm.lr_decay},
                       {"batch_size", svm.batch_size}};
    j["naive_bayes"] = {{"variance_floor", bayes.variance_floor}};
    return j;
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) {
            raise(ErrorCode::Parse, "unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
    Hyperparams hp;
    check_keys(j, {"gbdt", "random_forest", "knn", "logistic", "mlp", "linear_svm",
                   "naive_bayes"},
               "hyperparams");
    if (j.contains("gbdt")) {
        const auto& g = j["gbdt"];
        check_keys(g, {"iterations", "learning_rate", "max_depth", "min_samples_leaf",
                       "subsample", "l2_leaf"},
                   "hyperparams.gbdt");
        hp.gbdt.iterations = g.value("iterations", hp.gbdt.iterations);
        hp.gbdt.learning_rate = g.value("learning_rate", hp.gbdt.learning_rate);
        hp.gbdt.max_depth = g.value("max_depth", hp.gbdt.max_depth);
        hp.gbdt.min_samples_leaf = g.value("min_samples_leaf", hp.gbdt.min_samples_leaf);
        hp.gbdt.subsample = g.value("subsample", hp.gbdt.subsample);
        hp.gbdt.l2_leaf = g.value("l2_leaf", hp.gbdt.l2_leaf);
    }
    if (j.contains("random_forest")) {
        const auto& f = j["random_forest"];
        check_keys(f, {"trees", "max_depth", "min_samples_leaf"}, "hyperparams.random_forest");
        hp.forest.trees = f.value("trees", hp.forest.trees);
        hp.forest.max_depth = f.value("max_depth", hp.forest.max_depth);
        hp.forest.min_samples_leaf = f.value("min_samples_leaf", hp.forest.min_samples_leaf);
    }
    if (j.contains("knn")) {
        check_keys(j["knn"], {"k"}, "hyperparams.knn");
        hp.knn.k = j["knn"].value("k", hp.knn.k);
    }
    auto read_sgd = [&](const char* name, auto& out) {
        if (!j.contains(name)) return;
        const auto& s = j[name];
        check_keys(s, {"l2", "epochs", "learning_rate", "lr_decay", "batch_size",
                       "hidden"},
                   std::string("hyperparams.") + name);
        out.l2 = s.value("l2", out.l2);
        out.epochs = s.value("epochs", out.epochs);
        out.learning_rate = s.value("learning_rate", out.learning_rate);
        out.lr_decay = s.value("lr_decay", out.lr_decay);
        out.batch_size = s.value("batch_size", out.batch_size);
    };
    read_sgd("logistic", hp.logistic);
    read_sgd("linear_svm", hp.svm);
    if (j.contains("mlp")) {
        read_sgd("mlp", hp.mlp);
        hp.mlp.hidden = j["mlp"].value("hidden", hp.mlp.hidden);
    }
    if (j.contains("naive_bayes")) {
        check_keys(j["naive_bayes"], {"variance_floor"}, "hyperparams.naive_bayes");
        hp.bayes.variance_floor = j["naive_bayes"].value("variance_floor",
                                                         hp.bayes.variance_floor);
    }
    return hp;
}

}  // namespace prlat
