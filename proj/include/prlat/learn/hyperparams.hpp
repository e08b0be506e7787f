#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace prlat {

enum class ModelKind {
    GBDT,
    KNN,
    LOGISTIC,
    NAIVE_BAYES,
    MLP,
    RANDOM_FOREST,
    LINEAR_SVM,
};

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::GBDT,        ModelKind::KNN, ModelKind::LOGISTIC,
    ModelKind::NAIVE_BAYES, ModelKind::MLP, ModelKind::RANDOM_FOREST,
    ModelKind::LINEAR_SVM,
};

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);  // raises Parse

// Training defaults for every kind. The source paper reports none, so these
// are the toolkit's documented defaults; every report echoes the values in
// effect.
struct Hyperparams {
    struct Gbdt {
        int iterations = 500;
        double learning_rate = 0.1;
        int max_depth = 6;
        int min_samples_leaf = 20;
        double subsample = 1.0;
        double l2_leaf = 1.0;
    } gbdt;

    struct Forest {
        int trees = 300;
        int max_depth = 32;
        int min_samples_leaf = 5;
        // max_features is sqrt(p), computed from the training matrix
    } forest;

    struct Knn {
        int k = 15;
    } knn;

    struct Logistic {
        double l2 = 1e-3;
        int epochs = 200;
        double learning_rate = 0.5;
        double lr_decay = 0.01;  // lr_e = lr / (1 + decay * epoch)
        int batch_size = 64;
    } logistic;

    struct Mlp {
        int hidden = 64;
        double l2 = 1e-4;
        int epochs = 80;
        double learning_rate = 0.05;
        double lr_decay = 0.01;
        int batch_size = 64;
    } mlp;

    struct Svm {
        double l2 = 1e-3;
        int epochs = 200;
        double learning_rate = 0.5;
        double lr_decay = 0.01;
        int batch_size = 64;
    } svm;

    struct Bayes {
        double variance_floor = 1e-9;
    } bayes;

    nlohmann::ordered_json to_json() const;
    static Hyperparams from_json(const nlohmann::json& j);  // unknown keys rejected
};

}  // namespace prlat
