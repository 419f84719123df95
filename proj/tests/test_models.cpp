#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "excast/ensemble.hpp"
#include "excast/forest.hpp"
#include "excast/knn.hpp"
#include "excast/linear.hpp"
#include "excast/logistic.hpp"
#include "excast/model.hpp"
#include "excast/rng.hpp"
#include "excast/smote.hpp"

using namespace excast;

namespace {

std::vector<std::string> feature_names(std::size_t p) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
    return names;
}

std::vector<std::vector<double>> random_matrix(std::size_t n, std::size_t p,
                                               std::mt19937_64& gen) {
    std::vector<std::vector<double>> X(n, std::vector<double>(p));
    for (auto& row : X)
        for (auto& v : row) v = 2.0 * rng::uniform01(gen) - 1.0;
    return X;
}

// Independent KKT residual for the coordinate-descent lasso objective
// (1/2n)||y - Zw - b||^2 + lambda ||w||_1 in standardized space.
double lasso_kkt_residual(const LinearModel& model, const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y, double lambda) {
    const auto& w = model.coefficients();
    const std::size_t n = X.size(), p = w.size();
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto z = model.standardizer().transform(X[i]);
        double pred = model.intercept();
        for (std::size_t j = 0; j < p; ++j) pred += w[j] * z[j];
        resid[i] = y[i] - pred;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            g += model.standardizer().transform(X[i])[j] * resid[i];
        g /= static_cast<double>(n);
        if (w[j] > 0)
            worst = std::max(worst, std::fabs(g - lambda));
        else if (w[j] < 0)
            worst = std::max(worst, std::fabs(g + lambda));
        else
            worst = std::max(worst, std::max(0.0, std::fabs(g) - lambda));
    }
    return worst;
}

// Gaussian elimination on the normal equations with intercept column.
std::vector<double> normal_equations(const std::vector<std::vector<double>>& X,
                                     const std::vector<double>& y) {
    const std::size_t n = X.size(), p = X.front().size(), m = p + 1;
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    auto xi = [&](std::size_t i, std::size_t j) { return j < p ? X[i][j] : 1.0; };
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < n; ++i) A[j][k] += xi(i, j) * xi(i, k);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) A[j][m] += xi(i, j) * y[i];
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<double> beta(m);
    for (std::size_t j = 0; j < m; ++j) beta[j] = A[j][m] / A[j][j];
    return beta;  // slopes then intercept
}

}  // namespace

TEST_CASE("lasso with lambda 0 interpolates two points") {
    ModelSpec spec;
    spec.family = ModelFamily::LinearLasso;
    spec.lambda = 0.0;
    const auto model = LinearModel::fit({{0.0}, {1.0}}, {0.0, 1.0}, spec, feature_names(1));
    CHECK(model->predict(std::vector<double>{0.0}) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(model->predict(std::vector<double>{1.0}) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(model->predict(std::vector<double>{0.5}) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("huge lambda shrinks every slope to exactly zero") {
    std::mt19937_64 gen(1);
    const auto X = random_matrix(40, 4, gen);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = X[i][0] + 0.1 * (rng::uniform01(gen) - 0.5);
    ModelSpec spec;
    spec.family = ModelFamily::LinearLasso;
    spec.lambda = 1e9;
    const auto model = LinearModel::fit(X, y, spec, feature_names(4));
    for (double w : model->coefficients()) CHECK(w == 0.0);
}

TEST_CASE("lasso satisfies the KKT conditions on a random problem") {
    std::mt19937_64 gen(2);
    const auto X = random_matrix(20, 5, gen);
    std::vector<double> y(20);
    for (std::size_t i = 0; i < 20; ++i)
        y[i] = 0.7 * X[i][1] - 1.2 * X[i][3] + 0.3 * (rng::uniform01(gen) - 0.5);
    ModelSpec spec;
    spec.family = ModelFamily::LinearLasso;
    spec.lambda = 0.1;
    const auto model = LinearModel::fit(X, y, spec, feature_names(5));
    CHECK(lasso_kkt_residual(*model, X, y, 0.1) < 1e-6);
}

TEST_CASE("linear fit with lambda 0 matches normal equations") {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 5; ++rep) {
        const auto X = random_matrix(30, 5, gen);
        std::vector<double> y(30);
        for (std::size_t i = 0; i < 30; ++i)
            y[i] = 1.5 + X[i][0] - 2.0 * X[i][4] + 0.05 * (rng::uniform01(gen) - 0.5);
        ModelSpec spec;
        spec.family = ModelFamily::LinearRidge;
        spec.lambda = 0.0;
        const auto model = LinearModel::fit(X, y, spec, feature_names(5));
        const auto beta = normal_equations(X, y);
        for (int probe = 0; probe < 10; ++probe) {
            std::vector<double> x(5);
            for (auto& v : x) v = 2.0 * rng::uniform01(gen) - 1.0;
            double expected = beta[5];
            for (std::size_t j = 0; j < 5; ++j) expected += beta[j] * x[j];
            CHECK(model->predict(x) == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("zero-variance feature gets coefficient zero") {
    std::mt19937_64 gen(4);
    auto X = random_matrix(25, 3, gen);
    for (auto& row : X) row[1] = 7.0;  // constant column
    std::vector<double> y(25);
    for (std::size_t i = 0; i < 25; ++i) y[i] = X[i][0];
    ModelSpec spec;
    spec.family = ModelFamily::LinearLasso;
    spec.lambda = 0.01;
    const auto model = LinearModel::fit(X, y, spec, feature_names(3));
    CHECK(model->coefficients()[1] == 0.0);
}

TEST_CASE("knn exact and degenerate cases") {
    const std::vector<std::vector<double>> X = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
    const std::vector<double> y = {1.0, 2.0, 3.0, 10.0};
    ModelSpec spec;
    spec.family = ModelFamily::Knn;

    SUBCASE("k=1 on a training row returns its target") {
        spec.k = 1;
        const auto model = KnnModel::fit(X, y, spec, feature_names(2));
        CHECK(model->predict(std::vector<double>{5, 5}) == 10.0);
    }
    SUBCASE("k=n uniform gives the global mean") {
        spec.k = 4;
        const auto model = KnnModel::fit(X, y, spec, feature_names(2));
        CHECK(model->predict(std::vector<double>{0.2, 0.2}) == doctest::Approx(4.0));
    }
    SUBCASE("k=2 averages the two nearest by the exhaustive distance table") {
        spec.k = 2;
        const auto model = KnnModel::fit(X, y, spec, feature_names(2));
        // Query at the first row: nearest two are rows 0 and (1 or 2, tie
        // broken by index) under standardized distances.
        Standardizer sc;
        sc.fit(X);
        const auto q = std::vector<double>{0.1, 0.0};
        const auto zq = sc.transform(q);
        std::vector<std::pair<double, std::size_t>> d;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto zi = sc.transform(X[i]);
            double d2 = 0;
            for (std::size_t j = 0; j < 2; ++j) d2 += (zq[j] - zi[j]) * (zq[j] - zi[j]);
            d.emplace_back(d2, i);
        }
        std::sort(d.begin(), d.end());
        const double expected = 0.5 * (y[d[0].second] + y[d[1].second]);
        CHECK(model->predict(q) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("k greater than n is rejected") {
        spec.k = 5;
        CHECK_THROWS_AS(KnnModel::fit(X, y, spec, feature_names(2)), std::invalid_argument);
    }
}

TEST_CASE("forest stump predicts the training mean") {
    std::mt19937_64 gen(5);
    const auto X = random_matrix(50, 3, gen);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < 50; ++i) y[i] = 3.0 * X[i][0] + 1.0;
    ModelSpec spec;
    spec.family = ModelFamily::ForestRegressor;
    spec.n_trees = 1;
    spec.max_depth = 0;
    spec.bootstrap = false;
    const auto model = ForestModel::fit(X, y, false, spec, feature_names(3));
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 50.0;
    CHECK(model->predict(X[0]) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(model->predict(X[17]) == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("forest classifier separates a linearly separable set exactly") {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    std::mt19937_64 gen(6);
    for (int i = 0; i < 16; ++i) {
        const double a = rng::uniform01(gen), b = rng::uniform01(gen);
        X.push_back({a, b});
        y.push_back(a + b > 1.0 ? 1.0 : 0.0);
    }
    if (std::count(y.begin(), y.end(), 1.0) == 0) y[0] = 1.0;
    ModelSpec spec;
    spec.family = ModelFamily::ForestClassifier;
    spec.n_trees = 50;
    spec.min_leaf = 1;
    spec.feature_fraction = 1.0;
    spec.seed = 77;
    const auto model = ForestModel::fit(X, y, true, spec, feature_names(2));
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double p = model->predict(X[i]);
        CHECK((p >= 0.5) == (y[i] >= 0.5));
    }
}

TEST_CASE("forest is deterministic per seed, prediction stays in target range") {
    std::mt19937_64 gen(7);
    const auto X = random_matrix(120, 4, gen);
    std::vector<double> y(120);
    for (std::size_t i = 0; i < 120; ++i)
        y[i] = std::sin(3.0 * X[i][0]) + X[i][2] + 0.1 * rng::uniform01(gen);
    ModelSpec spec;
    spec.family = ModelFamily::ForestRegressor;
    spec.n_trees = 20;
    spec.seed = 99;
    const auto a = ForestModel::fit(X, y, false, spec, feature_names(4));
    const auto b = ForestModel::fit(X, y, false, spec, feature_names(4));
    const double lo = *std::min_element(y.begin(), y.end());
    const double hi = *std::max_element(y.begin(), y.end());
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> x(4);
        for (auto& v : x) v = 2.0 * rng::uniform01(gen) - 1.0;
        const double pa = a->predict(x);
        CHECK(pa == b->predict(x));
        CHECK(pa >= lo);
        CHECK(pa <= hi);
    }
}

TEST_CASE("forest rejects single-class classification data") {
    ModelSpec spec;
    spec.family = ModelFamily::ForestClassifier;
    spec.n_trees = 3;
    CHECK_THROWS_AS(
        ForestModel::fit({{0.0}, {1.0}, {2.0}}, {0.0, 0.0, 0.0}, true, spec, feature_names(1)),
        std::runtime_error);
}

TEST_CASE("logistic intercept-only fit recovers the prevalence") {
    std::vector<std::vector<double>> X(100, std::vector<double>{});
    std::vector<std::uint8_t> b(100, 0);
    for (int i = 0; i < 30; ++i) b[i] = 1;
    ModelSpec spec;
    spec.family = ModelFamily::Logistic;
    spec.l2 = 0.0;
    const auto model = LogisticModel::fit(X, b, spec, {});
    CHECK(model->converged());
    CHECK(model->predict(std::vector<double>{}) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("logistic gradient vanishes at the solution (finite differences)") {
    std::mt19937_64 gen(8);
    const auto X = random_matrix(80, 2, gen);
    std::vector<std::uint8_t> b(80);
    for (std::size_t i = 0; i < 80; ++i)
        b[i] = (X[i][0] + 0.5 * X[i][1] + 0.3 * (rng::uniform01(gen) - 0.5)) > 0 ? 1 : 0;
    ModelSpec spec;
    spec.family = ModelFamily::Logistic;
    spec.l2 = 0.01;
    const auto model = LogisticModel::fit(X, b, spec, feature_names(2));
    CHECK(model->converged());
    CHECK(model->gradient_norm() < 1e-6);

    // Independent finite-difference check of the penalized mean
    // log-likelihood around the returned weights.
    Standardizer sc;
    sc.fit(X);
    auto objective = [&](const std::vector<double>& w, double intercept) {
        double obj = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            const auto z = sc.transform(X[i]);
            double t = intercept;
            for (std::size_t j = 0; j < w.size(); ++j) t += w[j] * z[j];
            const double p = 1.0 / (1.0 + std::exp(-t));
            obj += b[i] ? std::log(p) : std::log1p(-p);
        }
        obj /= static_cast<double>(X.size());
        for (double v : w) obj -= 0.5 * spec.l2 * v * v;
        return obj;
    };
    const auto w = model->coefficients();
    const double h = 1e-6;
    for (std::size_t j = 0; j < w.size(); ++j) {
        auto wp = w, wm = w;
        wp[j] += h;
        wm[j] -= h;
        const double fd =
            (objective(wp, model->intercept()) - objective(wm, model->intercept())) / (2 * h);
        CHECK(std::fabs(fd) < 1e-5);
    }
}

TEST_CASE("logistic rejects single-class data") {
    ModelSpec spec;
    spec.family = ModelFamily::Logistic;
    CHECK_THROWS_AS(LogisticModel::fit({{0.0}, {1.0}}, {1, 1}, spec, feature_names(1)),
                    std::runtime_error);
}

TEST_CASE("smote geometry and balance") {
    SUBCASE("two minority points: synthetics lie on their segment") {
        std::vector<std::vector<double>> X = {{0, 0}, {1, 1}};
        std::vector<std::uint8_t> b = {1, 1};
        for (int i = 0; i < 8; ++i) {
            X.push_back({5.0 + i, 5.0});
            b.push_back(0);
        }
        const auto res = smote_resample(X, b, 1, 42);
        REQUIRE(res.synthetic_count == 6);
        for (std::size_t i = X.size(); i < res.X.size(); ++i) {
            CHECK(res.b[i] == 1);
            // On the segment from (0,0) to (1,1): x == y, 0 <= x <= 1.
            CHECK(res.X[i][0] == doctest::Approx(res.X[i][1]).epsilon(1e-12));
            CHECK(res.X[i][0] >= 0.0);
            CHECK(res.X[i][0] <= 1.0);
        }
    }
    SUBCASE("balanced input is returned unchanged") {
        const std::vector<std::vector<double>> X = {{0.0}, {1.0}, {2.0}, {3.0}};
        const std::vector<std::uint8_t> b = {0, 0, 1, 1};
        const auto res = smote_resample(X, b, 3, 1);
        CHECK(res.X == X);
        CHECK(res.b == b);
        CHECK(res.synthetic_count == 0);
    }
    SUBCASE("5 vs 50 balances to 1:1 with segment-membership oracle") {
        std::mt19937_64 gen(9);
        std::vector<std::vector<double>> X;
        std::vector<std::uint8_t> b;
        for (int i = 0; i < 5; ++i) {
            X.push_back({rng::uniform01(gen), rng::uniform01(gen)});
            b.push_back(1);
        }
        for (int i = 0; i < 50; ++i) {
            X.push_back({5 + rng::uniform01(gen), 5 + rng::uniform01(gen)});
            b.push_back(0);
        }
        const auto res = smote_resample(X, b, 3, 7);
        std::size_t pos = 0;
        for (auto v : res.b) pos += v;
        CHECK(pos == 50);
        CHECK(res.X.size() == 100);
        // Originals preserved verbatim.
        for (std::size_t i = 0; i < X.size(); ++i) CHECK(res.X[i] == X[i]);
        // Every synthetic lies on a segment between two minority rows.
        for (std::size_t s = X.size(); s < res.X.size(); ++s) {
            bool on_some_segment = false;
            for (int a = 0; a < 5 && !on_some_segment; ++a)
                for (int c = 0; c < 5; ++c) {
                    if (a == c) continue;
                    const auto &pa = X[a], &pc = X[c], &q = res.X[s];
                    const double dx = pc[0] - pa[0], dy = pc[1] - pa[1];
                    const double t = std::fabs(dx) > std::fabs(dy) ? (q[0] - pa[0]) / dx
                                                                   : (q[1] - pa[1]) / dy;
                    if (t < -1e-9 || t > 1.0 + 1e-9) continue;
                    if (std::fabs(pa[0] + t * dx - q[0]) < 1e-9 &&
                        std::fabs(pa[1] + t * dy - q[1]) < 1e-9) {
                        on_some_segment = true;
                        break;
                    }
                }
            CHECK(on_some_segment);
        }
    }
    SUBCASE("minority smaller than 2 is an error") {
        CHECK_THROWS_AS(smote_resample({{0.0}, {1.0}, {2.0}}, {1, 0, 0}, 1, 0),
                        std::runtime_error);
    }
}

namespace {

SupervisedDataset toy_dataset(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    SupervisedDataset ds;
    ds.horizons = {1};
    ds.feature_names = feature_names(2);
    ds.y.resize(1);
    ds.b.resize(1);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng::uniform01(gen), c = rng::uniform01(gen);
        ds.X.push_back({a, c});
        ds.origins.push_back(i);
        const double target = 2.0 * a - c + 0.05 * (rng::uniform01(gen) - 0.5);
        ds.y[0].push_back(target);
        ds.b[0].push_back(target >= 1.0 ? 1 : 0);
    }
    ds.tau = 1.0;
    return ds;
}

}  // namespace

TEST_CASE("heterogeneous ensemble trims to the better half and averages") {
    const auto ds = toy_dataset(200, 10);
    const auto specs = default_ensemble_specs(3);
    REQUIRE(specs.size() == 8);
    const auto hre = EnsembleModel::fit(ds, specs, 0.2, 1);
    CHECK(hre.member_count() == 4);  // ceil(8 / 2)
    CHECK(hre.validation_maes().size() == 8);

    // Kept indices are exactly the 4 smallest validation MAEs.
    auto maes = hre.validation_maes();
    std::vector<std::size_t> order(maes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return maes[a] < maes[b]; });
    std::vector<std::size_t> expected(order.begin(), order.begin() + 4);
    std::sort(expected.begin(), expected.end());
    CHECK(hre.kept_spec_indices() == expected);

    const std::vector<double> q = {0.4, 0.6};
    const auto members = hre.predict_members(q);
    REQUIRE(members.size() == 4);
    const double mean = std::accumulate(members.begin(), members.end(), 0.0) / 4.0;
    CHECK(hre.predict(q) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(hre.predict_members(q) == members);  // stable order

    CHECK_THROWS_AS(EnsembleModel::fit(ds, {specs[0]}, 0.2, 1), std::invalid_argument);
}

TEST_CASE("predict input validation") {
    const auto ds = toy_dataset(50, 11);
    ModelSpec spec;
    spec.family = ModelFamily::ForestRegressor;
    spec.n_trees = 5;
    spec.horizon = 1;
    const auto model = fit_model(ds, spec);
    CHECK_THROWS_AS(model->predict(std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(
        model->predict(std::vector<double>{std::numeric_limits<double>::quiet_NaN(), 0.0}),
        std::invalid_argument);
}

TEST_CASE("classifier probability favours its own separable training points") {
    std::vector<std::vector<double>> X;
    std::vector<std::uint8_t> b;
    for (int i = 0; i < 5; ++i) {
        X.push_back({static_cast<double>(i), 0.0});
        b.push_back(0);
        X.push_back({static_cast<double>(i) + 10.0, 0.0});
        b.push_back(1);
    }
    ModelSpec spec;
    spec.family = ModelFamily::Logistic;
    const auto model = LogisticModel::fit(X, b, spec, feature_names(2));
    for (std::size_t i = 0; i < X.size(); ++i) {
        const double p = model->predict(X[i]);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        CHECK((p > 0.5) == (b[i] == 1));
    }
}

TEST_CASE("model JSON round trip reproduces predictions") {
    const auto ds = toy_dataset(120, 12);
    std::mt19937_64 gen(13);
    for (ModelFamily family :
         {ModelFamily::LinearLasso, ModelFamily::LinearRidge, ModelFamily::Knn,
          ModelFamily::ForestRegressor, ModelFamily::Logistic,
          ModelFamily::ForestClassifier}) {
        ModelSpec spec;
        spec.family = family;
        spec.horizon = 1;
        spec.lambda = 0.05;
        spec.n_trees = 10;
        spec.seed = 4;
        const auto model = fit_model(ds, spec);
        const auto restored = model_from_json(model->to_json());
        for (int probe = 0; probe < 10; ++probe) {
            const std::vector<double> x = {rng::uniform01(gen), rng::uniform01(gen)};
            CHECK(restored->predict(x) == model->predict(x));
        }
    }
}
