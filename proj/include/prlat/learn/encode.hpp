#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "prlat/features.hpp"
#include "prlat/learn/hyperparams.hpp"
#include "prlat/preprocess.hpp"

namespace prlat {

// Dense encoded row block used by the numeric learners.
struct EncodedMatrix {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> values;  // row-major, never MISSING after encoding

    std::span<const double> row(std::size_t r) const { return {values.data() + r * p, p}; }
};

// Per-model input preparation fitted on training rows only.
//
// Tree pipelines (GBDT, RANDOM_FOREST) pass raw values through: weekday and
// hour stay ordinal and MISSING stays NaN for native routing.
//
// Numeric pipelines impute the training-fold median per feature, expand
// weekday/hour to one-hot indicators (except NAIVE_BAYES, which keeps
// ordinals for its per-feature Gaussians), and z-score the encoded columns.
struct PreprocBundle {
    bool passthrough = true;
    bool one_hot = false;
    std::vector<std::string> input_features;
    std::vector<FeatureScale> input_scales;
    std::vector<double> impute_values;  // per input feature (numeric pipelines)
    ScalerState scaler;                 // over encoded columns

    static PreprocBundle fit(ModelKind kind, const FeatureMatrix& train);

    std::size_t encoded_width() const;
    void encode_row(std::span<const double> raw, std::span<double> out) const;
    EncodedMatrix encode(const FeatureMatrix& rows) const;

    nlohmann::ordered_json to_json() const;
    static PreprocBundle from_json(const nlohmann::json& j);
};

}  // namespace prlat
