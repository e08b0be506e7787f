#include "prlat/learn/encode.hpp"

#include <algorithm>

#include "prlat/error.hpp"

namespace prlat {

namespace {

double train_median(const FeatureMatrix& m, std::size_t c) {
    std::vector<double> vals;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        const double v = m.at(r, c);
        if (!is_missing(v)) vals.push_back(v);
    }
    if (vals.empty()) return 0.0;  // all-missing column: neutral fill
    std::sort(vals.begin(), vals.end());
    const std::size_t n = vals.size();
    return n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

std::size_t scale_width(FeatureScale scale, bool one_hot) {
    if (!one_hot) return 1;
    switch (scale) {
        case FeatureScale::Weekday: return 7;
        case FeatureScale::HourOfDay: return 24;
        case FeatureScale::Numeric: return 1;
    }
    return 1;
}

}  // namespace

PreprocBundle PreprocBundle::fit(ModelKind kind, const FeatureMatrix& train) {
    PreprocBundle bundle;
    bundle.input_features = train.feature_names;
    bundle.input_scales = train.feature_scales;
    bundle.passthrough = kind == ModelKind::GBDT || kind == ModelKind::RANDOM_FOREST;
    if (bundle.passthrough) return bundle;

    bundle.one_hot = kind != ModelKind::NAIVE_BAYES;
    bundle.impute_values.resize(train.n_cols());
    for (std::size_t c = 0; c < train.n_cols(); ++c) {
        bundle.impute_values[c] = train_median(train, c);
    }

    // scaler over encoded training rows
    FeatureMatrix encoded_train;
    encoded_train.role = train.role;
    const std::size_t width = bundle.encoded_width();
    for (std::size_t c = 0; c < bundle.input_features.size(); ++c) {
        const std::size_t w = scale_width(bundle.input_scales[c], bundle.one_hot);
        for (std::size_t i = 0; i < w; ++i) {
            encoded_train.feature_names.push_back(
                w == 1 ? bundle.input_features[c]
                       : bundle.input_features[c] + "=" + std::to_string(i));
            encoded_train.feature_scales.push_back(FeatureScale::Numeric);
        }
    }
    std::vector<double> buf(width);
    for (std::size_t r = 0; r < train.n_rows(); ++r) {
        bundle.encode_row(train.row(r), buf);
        encoded_train.append_row(train.rows[r], buf, train.labels[r]);
    }
    bundle.scaler = zscore_fit(encoded_train);
    return bundle;
}

std::size_t PreprocBundle::encoded_width() const {
    if (passthrough) return input_features.size();
    std::size_t w = 0;
    for (auto scale : input_scales) w += scale_width(scale, one_hot);
    return w;
}

void PreprocBundle::encode_row(std::span<const double> raw, std::span<double> out) const {
    if (raw.size() != input_features.size()) {
        raise(ErrorCode::FeatureMismatch, "row width mismatch in encode");
    }
    if (passthrough) {
        std::copy(raw.begin(), raw.end(), out.begin());
        return;
    }
    std::size_t o = 0;
    for (std::size_t c = 0; c < raw.size(); ++c) {
        double v = raw[c];
        if (is_missing(v)) v = impute_values[c];
        const std::size_t w = scale_width(input_scales[c], one_hot);
        if (w == 1) {
            out[o++] = v;
        } else {
            const auto idx = static_cast<std::size_t>(v);
            for (std::size_t i = 0; i < w; ++i) out[o + i] = (i == idx) ? 1.0 : 0.0;
            o += w;
        }
    }
    if (!scaler.mean.empty()) {
        for (std::size_t c = 0; c < out.size(); ++c) {
            if (scaler.scaled[c]) out[c] = (out[c] - scaler.mean[c]) / scaler.stddev[c];
        }
    }
}

EncodedMatrix PreprocBundle::encode(const FeatureMatrix& rows) const {
    EncodedMatrix enc;
    enc.n = rows.n_rows();
    enc.p = encoded_width();
    enc.values.resize(enc.n * enc.p);
    for (std::size_t r = 0; r < enc.n; ++r) {
        encode_row(rows.row(r), {enc.values.data() + r * enc.p, enc.p});
    }
    return enc;
}

nlohmann::ordered_json PreprocBundle::to_json() const {
    nlohmann::ordered_json j;
    j["passthrough"] = passthrough;
    j["one_hot"] = one_hot;
    j["input_features"] = input_features;
    auto scales = nlohmann::ordered_json::array();
    for (auto s : input_scales) {
        scales.push_back(s == FeatureScale::Weekday   ? "weekday"
                         : s == FeatureScale::HourOfDay ? "hour_of_day"
                                                        : "numeric");
    }
    j["input_scales"] = std::move(scales);
    j["impute_values"] = impute_values;
    if (!scaler.mean.empty()) {
        j["scaler"] = {{"feature_names", scaler.feature_names},
                       {"mean", scaler.mean},
                       {"stddev", scaler.stddev},
                       {"scaled", scaler.scaled}};
    }
    return j;
}

PreprocBundle PreprocBundle::from_json(const nlohmann::json& j) {
    PreprocBundle b;
    b.passthrough = j.at("passthrough").get<bool>();
    b.one_hot = j.at("one_hot").get<bool>();
    b.input_features = j.at("input_features").get<std::vector<std::string>>();
    for (const auto& s : j.at("input_scales")) {
        const auto text = s.get<std::string>();
        b.input_scales.push_back(text == "weekday"       ? FeatureScale::Weekday
                                 : text == "hour_of_day" ? FeatureScale::HourOfDay
                                                         : FeatureScale::Numeric);
    }
    b.impute_values = j.at("impute_values").get<std::vector<double>>();
    if (j.contains("scaler")) {
        const auto& s = j["scaler"];
        b.scaler.feature_names = s.at("feature_names").get<std::vector<std::string>>();
        b.scaler.mean = s.at("mean").get<std::vector<double>>();
        b.scaler.stddev = s.at("stddev").get<std::vector<double>>();
        b.scaler.scaled = s.at("scaled").get<std::vector<bool>>();
    }
    return b;
}

}  // namespace prlat
