#include <doctest.h>

#include <cmath>
#include <fstream>

#include "prlat/error.hpp"
#include "prlat/learn/linear.hpp"
#include "prlat/learn/model.hpp"
#include "prlat/learn/tree.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace prlat;
using namespace prlat::testsupport;

namespace {

Hyperparams fast_hp() {
    Hyperparams hp;
    hp.gbdt.iterations = 40;
    hp.gbdt.min_samples_leaf = 5;
    hp.forest.trees = 40;
    hp.logistic.epochs = 120;
    hp.mlp.epochs = 40;
    hp.svm.epochs = 120;
    return hp;
}

double training_accuracy(const TrainedModel& model, const FeatureMatrix& m) {
    const auto scores = model.predict_scores(m);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        int argmax = 0;
        for (int c = 1; c < kNumClasses; ++c) {
            if (scores[r * kNumClasses + c] > scores[r * kNumClasses + argmax]) argmax = c;
        }
        hits += argmax == static_cast<int>(m.labels[r]);
    }
    return static_cast<double>(hits) / static_cast<double>(m.n_rows());
}

}  // namespace

TEST_CASE("logistic separates 3-class blobs") {
    auto m = three_blobs(7, 300, 0.4);
    auto model = train(ModelKind::LOGISTIC, m, fast_hp(), 1);
    CHECK(training_accuracy(model, m) >= 0.95);
}

TEST_CASE("every kind fits blobs well above chance") {
    auto m = three_blobs(8, 240, 0.5);
    for (ModelKind kind : kAllModelKinds) {
        auto model = train(kind, m, fast_hp(), 2);
        CHECK(training_accuracy(model, m) >= 0.8);
    }
}

TEST_CASE("constant labels raise Degenerate; tiny sets raise TooFewRows") {
    auto m = three_blobs(9, 30, 0.5);
    for (auto& y : m.labels) y = LatencyClass::WITHIN_1_DAY;
    CHECK_THROWS_AS(train(ModelKind::GBDT, m, fast_hp(), 1), Error);

    auto small = three_blobs(9, 5, 0.5);
    CHECK_THROWS_AS(train(ModelKind::KNN, small, fast_hp(), 1), Error);
}

TEST_CASE("GBDT with zero iterations predicts class priors") {
    auto m = three_blobs(10, 20, 0.5);
    // force distribution 10 / 6 / 4
    for (std::size_t i = 0; i < 20; ++i) {
        m.labels[i] = i < 10 ? LatencyClass::WITHIN_1_DAY
                     : i < 16 ? LatencyClass::DAY_TO_WEEK
                              : LatencyClass::OVER_WEEK;
    }
    Hyperparams hp = fast_hp();
    hp.gbdt.iterations = 0;
    auto model = train(ModelKind::GBDT, m, hp, 3);
    const auto scores = model.predict_scores(m);
    for (std::size_t r = 0; r < m.n_rows(); ++r) {
        CHECK(scores[r * kNumClasses + 0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(scores[r * kNumClasses + 1] == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(scores[r * kNumClasses + 2] == doctest::Approx(0.2).epsilon(1e-9));
    }
}

TEST_CASE("KNN with k=1 returns the one-hot of a training row's own label") {
    auto m = three_blobs(11, 30, 0.5);
    Hyperparams hp = fast_hp();
    hp.knn.k = 1;
    auto model = train(ModelKind::KNN, m, hp, 4);
    for (std::size_t r : {std::size_t{0}, std::size_t{7}, std::size_t{29}}) {
        const auto s = model.predict_row(m.row(r));
        const int label = static_cast<int>(m.labels[r]);
        CHECK(s[label] == doctest::Approx(1.0));
    }
}

TEST_CASE("naive bayes is symmetric between equidistant blobs") {
    // classes 0/1 at -3/+3 on f0, equal counts and spreads
    std::vector<std::vector<double>> rows;
    std::vector<LatencyClass> labels;
    for (int i = 0; i < 10; ++i) {
        const double off = (i % 2 == 0) ? 0.5 : -0.5;
        rows.push_back({-3.0 + off, 1.0 + off});
        labels.push_back(LatencyClass::WITHIN_1_DAY);
        rows.push_back({3.0 + off, 1.0 + off});
        labels.push_back(LatencyClass::DAY_TO_WEEK);
    }
    auto m = matrix_from({"f0", "f1"}, {}, rows, labels);
    auto model = train(ModelKind::NAIVE_BAYES, m, fast_hp(), 5);
    const auto s = model.predict_row(std::vector<double>{0.0, 1.0});
    CHECK(s[0] == doctest::Approx(s[1]).epsilon(1e-9));
}

TEST_CASE("probability outputs sum to one") {
    auto m = three_blobs(12, 60, 0.7);
    for (ModelKind kind : {ModelKind::GBDT, ModelKind::RANDOM_FOREST, ModelKind::LOGISTIC,
                           ModelKind::MLP, ModelKind::NAIVE_BAYES}) {
        auto model = train(kind, m, fast_hp(), 6);
        const auto scores = model.predict_scores(m);
        for (std::size_t r = 0; r < m.n_rows(); ++r) {
            double sum = 0;
            for (int c = 0; c < kNumClasses; ++c) sum += scores[r * kNumClasses + c];
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("determinism: identical inputs and seed give bit-identical models") {
    auto m = three_blobs(13, 80, 0.6);
    TempDir tmp;
    for (ModelKind kind : kAllModelKinds) {
        auto a = train(kind, m, fast_hp(), 99);
        auto b = train(kind, m, fast_hp(), 99);
        auto pa = tmp.path / (std::string(model_kind_name(kind)) + "_a.json");
        auto pb = tmp.path / (std::string(model_kind_name(kind)) + "_b.json");
        a.save(pa);
        b.save(pb);
        std::ifstream fa(pa), fb(pb);
        std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
}

TEST_CASE("row-permutation invariance of trained models") {
    auto m = three_blobs(14, 70, 0.6);
    auto probe = three_blobs(15, 20, 0.6);

    auto rng = make_rng(123);
    std::vector<std::size_t> perm = random_permutation(m.n_rows(), rng);
    auto shuffled = m.select_rows(perm);

    for (ModelKind kind : kAllModelKinds) {
        auto a = train(kind, m, fast_hp(), 31);
        auto b = train(kind, shuffled, fast_hp(), 31);
        const auto sa = a.predict_scores(probe);
        const auto sb = b.predict_scores(probe);
        REQUIRE(sa.size() == sb.size());
        for (std::size_t i = 0; i < sa.size(); ++i) {
            CHECK(sa[i] == sb[i]);
        }
    }
}

TEST_CASE("model bundles round-trip exactly") {
    auto m = three_blobs(16, 60, 0.6);
    auto probe = three_blobs(17, 15, 0.6);
    TempDir tmp;
    for (ModelKind kind : kAllModelKinds) {
        auto model = train(kind, m, fast_hp(), 8);
        auto path = tmp.path / (std::string(model_kind_name(kind)) + ".json");
        model.save(path);
        auto loaded = TrainedModel::load(path);
        const auto sa = model.predict_scores(probe);
        const auto sb = loaded.predict_scores(probe);
        for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);

        // byte-stable: saving the loaded model reproduces the file
        auto path2 = tmp.path / (std::string(model_kind_name(kind)) + "_2.json");
        loaded.save(path2);
        std::ifstream fa(path), fb(path2);
        std::string a((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string b((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        CHECK(a == b);
    }
}

TEST_CASE("truncated bundle raises SchemaMismatch; bad probe raises FeatureMismatch") {
    auto m = three_blobs(18, 40, 0.6);
    auto model = train(ModelKind::LOGISTIC, m, fast_hp(), 9);
    TempDir tmp;
    auto path = tmp.path / "model.json";
    model.save(path);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream(path) << text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(TrainedModel::load(path), Error);

    std::vector<double> short_row{1.0, 2.0};
    CHECK_THROWS_AS(model.predict_row(short_row), Error);
    auto wrong = three_blobs(19, 12, 0.6, 5);  // extra columns
    CHECK_THROWS_AS(model.predict_scores(wrong), Error);
}

TEST_CASE("GBDT training loss is non-increasing with full sampling") {
    auto m = three_blobs(20, 150, 1.2);
    Hyperparams hp = fast_hp();
    hp.gbdt.iterations = 60;
    auto model = train(ModelKind::GBDT, m, hp, 10);
    const auto loss = model.gbdt_train_loss();
    REQUIRE(loss.size() == 60);
    for (std::size_t i = 1; i < loss.size(); ++i) {
        CHECK(loss[i] <= loss[i - 1] + 1e-9);
    }
}

TEST_CASE("tree models are invariant under increasing feature transforms") {
    auto m = monotone_signal_project(21, 400, "p");
    auto probe = monotone_signal_project(22, 50, "p");
    Hyperparams hp = fast_hp();
    hp.gbdt.iterations = 25;
    hp.forest.trees = 25;

    auto transform = [](FeatureMatrix mm) {
        auto idx = mm.column_index("commits");
        REQUIRE(idx);
        for (std::size_t r = 0; r < mm.n_rows(); ++r) {
            double& v = mm.at(r, *idx);
            if (!is_missing(v)) v = std::asinh(v) * 3.0 + 1.0;  // strictly increasing
        }
        return mm;
    };
    auto mt = transform(m);
    auto pt = transform(probe);

    for (ModelKind kind : {ModelKind::GBDT, ModelKind::RANDOM_FOREST}) {
        auto base = train(kind, m, hp, 11);
        auto mapped = train(kind, mt, hp, 11);
        const auto sa = base.predict_scores(probe);
        const auto sb = mapped.predict_scores(pt);
        for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);
    }
}

TEST_CASE("MISSING values route through tree models and imputation") {
    auto m = monotone_signal_project(23, 300, "p");
    // knock out a third of contributor_responsiveness
    auto idx = *m.column_index("contributor_responsiveness");
    for (std::size_t r = 0; r < m.n_rows(); r += 3) m.at(r, idx) = missing_value();

    for (ModelKind kind : kAllModelKinds) {
        auto model = train(kind, m, fast_hp(), 12);
        const auto scores = model.predict_scores(m);
        for (double s : scores) CHECK(std::isfinite(s));
    }
}

// ---------------------------------------------------------------------------
// Gradient checks
// ---------------------------------------------------------------------------

namespace {

struct GradInstance {
    EncodedMatrix X;
    std::vector<LatencyClass> y;
    std::vector<std::size_t> rows;
};

GradInstance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t p) {
    GradInstance inst;
    inst.X.n = n;
    inst.X.p = p;
    inst.X.values.resize(n * p);
    for (auto& v : inst.X.values) v = draw_normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
        inst.y.push_back(static_cast<LatencyClass>(draw_below(rng, 3)));
        inst.rows.push_back(i);
    }
    return inst;
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("logistic analytic gradient matches central differences") {
    auto rng = make_rng(2027);
    for (int trial = 0; trial < 12; ++trial) {
        auto inst = random_instance(rng, 10 + draw_below(rng, 10), 3 + draw_below(rng, 4));
        auto w = LinearWeights::zeros(inst.X.p);
        for (auto& v : w.w) v = 0.5 * draw_normal(rng);
        std::vector<double> grad;
        softmax_xent_loss_grad(w, inst.X, inst.y, inst.rows, 1e-3, grad);
        const double eps = 1e-6;
        for (std::size_t i = 0; i < w.w.size(); ++i) {
            auto wp = w;
            wp.w[i] += eps;
            auto wm = w;
            wm.w[i] -= eps;
            std::vector<double> dummy;
            const double lp = softmax_xent_loss_grad(wp, inst.X, inst.y, inst.rows, 1e-3, dummy);
            const double lm = softmax_xent_loss_grad(wm, inst.X, inst.y, inst.rows, 1e-3, dummy);
            const double numeric = (lp - lm) / (2 * eps);
            CHECK(rel_err(grad[i], numeric) < 1e-4);
        }
    }
}

TEST_CASE("mlp analytic gradient matches central differences") {
    auto rng = make_rng(2028);
    int done = 0;
    while (done < 8) {
        auto inst = random_instance(rng, 8 + draw_below(rng, 8), 3 + draw_below(rng, 3));
        MlpWeights w;
        w.p = inst.X.p;
        w.hidden = 4 + draw_below(rng, 3);
        w.w1.resize(w.hidden * (w.p + 1));
        w.w2.resize(kNumClasses * (w.hidden + 1));
        for (auto& v : w.w1) v = 0.4 * draw_normal(rng);
        for (auto& v : w.w2) v = 0.4 * draw_normal(rng);

        // reject instances with a pre-activation near the ReLU kink, where
        // the finite-difference probe would straddle the non-smooth point
        bool near_kink = false;
        std::vector<double> hidden(w.hidden);
        std::array<double, kNumClasses> z{};
        for (std::size_t r = 0; r < inst.X.n && !near_kink; ++r) {
            const auto x = inst.X.row(r);
            for (std::size_t i = 0; i < w.hidden; ++i) {
                const double* wr = w.w1.data() + i * (w.p + 1);
                double a = wr[w.p];
                for (std::size_t j = 0; j < w.p; ++j) a += wr[j] * x[j];
                if (std::abs(a) < 1e-3) near_kink = true;
            }
            mlp_forward(w, x, hidden, z);
        }
        if (near_kink) continue;
        ++done;

        MlpWeights grad;
        mlp_loss_grad(w, inst.X, inst.y, inst.rows, 1e-4, grad);
        const double eps = 1e-6;
        auto check_block = [&](std::vector<double>& wv, const std::vector<double>& gv) {
            for (std::size_t i = 0; i < wv.size(); ++i) {
                const double orig = wv[i];
                MlpWeights dummy;
                wv[i] = orig + eps;
                const double lp = mlp_loss_grad(w, inst.X, inst.y, inst.rows, 1e-4, dummy);
                wv[i] = orig - eps;
                const double lm = mlp_loss_grad(w, inst.X, inst.y, inst.rows, 1e-4, dummy);
                wv[i] = orig;
                const double numeric = (lp - lm) / (2 * eps);
                CHECK(rel_err(gv[i], numeric) < 1e-4);
            }
        };
        check_block(w.w1, grad.w1);
        check_block(w.w2, grad.w2);
    }
}
