#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prlat/features.hpp"
#include "prlat/learn/hyperparams.hpp"

namespace prlat {

inline constexpr int kModelFormatVersion = 1;

// A fitted classifier of one of the seven kinds. Owns its preprocessing
// bundle (one-hot map, imputation medians, scaler) so that predict consumes
// raw feature rows in feature_names order and emits one score per class:
//  - GBDT / RANDOM_FOREST / LOGISTIC / MLP / NAIVE_BAYES: probabilities
//    summing to 1 per row
//  - KNN: neighbor-vote fractions
//  - LINEAR_SVM: one-vs-rest margins (monotone in confidence; the AUC
//    metrics downstream are rank-based, so calibration is not required)
class TrainedModel {
  public:
    TrainedModel();
    ~TrainedModel();
    TrainedModel(TrainedModel&&) noexcept;
    TrainedModel& operator=(TrainedModel&&) noexcept;
    TrainedModel(const TrainedModel&);

    ModelKind kind() const;
    const std::vector<std::string>& feature_names() const;
    std::uint64_t seed() const;

    // rows must carry exactly feature_names, in order; raises FeatureMismatch.
    std::vector<double> predict_scores(const FeatureMatrix& rows) const;
    // One raw feature row (may contain MISSING); returns kNumClasses scores.
    std::vector<double> predict_row(std::span<const double> row) const;

    void save(const std::filesystem::path& path) const;
    static TrainedModel load(const std::filesystem::path& path);

    // Training cross-entropy per boosting round (GBDT only; empty otherwise).
    std::vector<double> gbdt_train_loss() const;
    // For tree models: whether any split reads the feature. Non-tree models
    // conservatively report true.
    bool uses_feature(std::size_t feature_index) const;

    struct Impl;

  private:
    friend TrainedModel train(ModelKind, const FeatureMatrix&, const Hyperparams&,
                              std::uint64_t);
    std::unique_ptr<Impl> impl_;
};

// Deterministic: identical (kind, matrix, hp, seed) gives a bit-identical
// model. Requires >= 10 rows and >= 2 label classes.
TrainedModel train(ModelKind kind, const FeatureMatrix& matrix, const Hyperparams& hp,
                   std::uint64_t seed);

}  // namespace prlat
