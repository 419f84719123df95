#include "excast/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace excast {

namespace {

double sigmoid(double t) {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Solves A x = rhs for a symmetric positive definite A (in-place Cholesky).
std::vector<double> spd_solve(std::vector<double> A, std::vector<double> rhs, std::size_t m) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = A[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= A[i * m + k] * A[j * m + k];
            if (i == j) {
                if (s <= 0) throw std::runtime_error("Hessian not positive definite");
                A[i * m + i] = std::sqrt(s);
            } else {
                A[i * m + j] = s / A[j * m + j];
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= A[i * m + k] * rhs[k];
        rhs[i] = s / A[i * m + i];
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double s = rhs[ii];
        for (std::size_t k = ii + 1; k < m; ++k) s -= A[k * m + ii] * rhs[k];
        rhs[ii] = s / A[ii * m + ii];
    }
    return rhs;
}

}  // namespace

std::unique_ptr<LogisticModel> LogisticModel::fit(const std::vector<std::vector<double>>& X,
                                                  const std::vector<std::uint8_t>& b,
                                                  const ModelSpec& spec,
                                                  const std::vector<std::string>& feature_names) {
    const std::size_t n = X.size();
    if (n == 0 || n != b.size()) throw std::invalid_argument("bad training data shape");
    bool has0 = false, has1 = false;
    for (auto v : b) (v ? has1 : has0) = true;
    if (!has0 || !has1)
        throw std::runtime_error("degenerate target: logistic fit needs both classes");

    auto model = std::make_unique<LogisticModel>();
    model->spec_ = spec;
    model->feature_names_ = feature_names;
    std::vector<double> yd(b.begin(), b.end());
    model->target_summary_ = summarize_target(yd);
    model->scaler_.fit(X);

    std::vector<std::vector<double>> Z(n);
    for (std::size_t i = 0; i < n; ++i) Z[i] = model->scaler_.transform(X[i]);

    const std::size_t p = Z.front().size();
    const std::size_t m = p + 1;  // weights plus intercept, intercept last
    const double nd = static_cast<double>(n);
    std::vector<double> w(m, 0.0);

    // Maximizes the mean log-likelihood minus (l2/2)*||w||^2 (intercept
    // unpenalized) by damped Newton steps.
    std::vector<double> prob(n), grad(m), H(m * m);
    constexpr double kTol = 1e-7;
    const int max_iter = 200;
    double gnorm = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double t = w[p];
            for (std::size_t j = 0; j < p; ++j) t += w[j] * Z[i][j];
            prob[i] = sigmoid(t);
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = static_cast<double>(b[i]) - prob[i];
            for (std::size_t j = 0; j < p; ++j) grad[j] += r * Z[i][j];
            grad[p] += r;
        }
        for (std::size_t j = 0; j < m; ++j) grad[j] /= nd;
        for (std::size_t j = 0; j < p; ++j) grad[j] -= spec.l2 * w[j];

        gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        if (gnorm < kTol) {
            model->converged_ = true;
            break;
        }

        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = std::max(prob[i] * (1.0 - prob[i]), 1e-12) / nd;
            for (std::size_t j = 0; j < p; ++j) {
                for (std::size_t k = 0; k <= j; ++k) H[j * m + k] += wt * Z[i][j] * Z[i][k];
                H[p * m + j] += wt * Z[i][j];
            }
            H[p * m + p] += wt;
        }
        for (std::size_t j = 0; j < p; ++j) H[j * m + j] += spec.l2;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) H[j * m + k] = H[k * m + j];

        const auto step = spd_solve(H, grad, m);
        double scale = 1.0;
        double step_max = 0.0;
        for (double s : step) step_max = std::max(step_max, std::fabs(s));
        if (step_max > 10.0) scale = 10.0 / step_max;  // damping for near-separation
        for (std::size_t j = 0; j < m; ++j) w[j] += scale * step[j];
    }

    model->gradient_norm_ = gnorm;
    model->weights_.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(p));
    model->intercept_ = w[p];
    return model;
}

double LogisticModel::predict_impl(std::span<const double> x) const {
    const auto z = scaler_.transform(x);
    double t = intercept_;
    for (std::size_t j = 0; j < z.size(); ++j) t += weights_[j] * z[j];
    return sigmoid(t);
}

void LogisticModel::params_to_json(nlohmann::json& j) const {
    j["standardizer"] = scaler_.to_json();
    j["weights"] = weights_;
    j["intercept"] = intercept_;
    j["converged"] = converged_;
    j["gradient_norm"] = gradient_norm_;
}

std::unique_ptr<LogisticModel> LogisticModel::from_json(const nlohmann::json& j) {
    auto model = std::make_unique<LogisticModel>();
    model->scaler_ = Standardizer::from_json(j.at("standardizer"));
    model->weights_ = j.at("weights").get<std::vector<double>>();
    model->intercept_ = j.at("intercept").get<double>();
    model->converged_ = j.at("converged").get<bool>();
    model->gradient_norm_ = j.at("gradient_norm").get<double>();
    return model;
}

std::unique_ptr<Model> fit_logistic(const SupervisedDataset& ds, const ModelSpec& spec) {
    const std::size_t slot = ds.horizon_slot(spec.horizon);
    return LogisticModel::fit(ds.X, ds.b[slot], spec, ds.feature_names);
}

}  // namespace excast
