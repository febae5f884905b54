#include "qsent/svm.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

namespace qsent::svm {

KernelMatrix linear_kernel(const FeatureMatrix &a, const FeatureMatrix &b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("linear_kernel: feature dimension mismatch");
    return a * b.transpose();
}

SvmModel SvmModel::solve(const KernelMatrix &K, const Labels &y01,
                         const SvmConfig &cfg) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n)
        throw std::invalid_argument("svm: kernel matrix must be square");
    if (Eigen::Index(y01.size()) != n)
        throw std::invalid_argument("svm: label count does not match kernel");
    if (cfg.C <= 0.0)
        throw std::invalid_argument("svm: C must be positive");
    if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("svm: kernel matrix is not symmetric");

    SvmModel m;
    m.C_ = cfg.C;
    m.y_pm_.reserve(std::size_t(n));
    for (int v : y01) {
        if (v != 0 && v != 1)
            throw std::invalid_argument("svm: labels must be 0/1");
        m.y_pm_.push_back(v == 1 ? 1 : -1);
    }

    Eigen::VectorXd &a = m.alphas_;
    a = Eigen::VectorXd::Zero(n);
    double b = 0.0;
    const double C = cfg.C;
    const double tol = cfg.tol;
    std::mt19937 rng(cfg.seed);

    // f[i] = sum_j alpha_j y_j K_ji, maintained incrementally so KKT checks
    // and step attempts stay O(1).
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);

    // One SMO step on the pair (i, j). Returns true if alphas moved.
    auto take_step = [&](Eigen::Index i, Eigen::Index j, double Ei) {
        if (i == j)
            return false;
        const double yi = m.y_pm_[std::size_t(i)];
        const double yj = m.y_pm_[std::size_t(j)];
        const double Ej = f[j] + b - yj;
        const double ai_old = a[i];
        const double aj_old = a[j];

        double L, H;
        if (yi == yj) {
            L = std::max(0.0, ai_old + aj_old - C);
            H = std::min(C, ai_old + aj_old);
        } else {
            L = std::max(0.0, aj_old - ai_old);
            H = std::min(C, C + aj_old - ai_old);
        }
        if (H - L < 1e-12)
            return false;

        const double eta = 2.0 * K(i, j) - K(i, i) - K(j, j);
        if (eta >= 0.0)
            return false;

        double aj = aj_old - yj * (Ei - Ej) / eta;
        aj = std::clamp(aj, L, H);
        if (std::abs(aj - aj_old) < 1e-8 * (aj + aj_old + 1e-8))
            return false;

        const double ai = ai_old + yi * yj * (aj_old - aj);
        a[i] = ai;
        a[j] = aj;
        f += (ai - ai_old) * yi * K.col(i) + (aj - aj_old) * yj * K.col(j);

        const double b1 = b - Ei - yi * (ai - ai_old) * K(i, i) -
                          yj * (aj - aj_old) * K(i, j);
        const double b2 = b - Ej - yi * (ai - ai_old) * K(i, j) -
                          yj * (aj - aj_old) * K(j, j);
        if (ai > 0.0 && ai < C)
            b = b1;
        else if (aj > 0.0 && aj < C)
            b = b2;
        else
            b = (b1 + b2) / 2.0;
        return true;
    };

    m.converged_ = false;
    for (int pass = 0; pass < cfg.max_passes; ++pass) {
        int changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double yi = m.y_pm_[std::size_t(i)];
            const double Ei = f[i] + b - yi;
            const bool violates = (yi * Ei < -tol && a[i] < C) ||
                                  (yi * Ei > tol && a[i] > 0.0);
            if (!violates)
                continue;
            // Random second index; on failure scan the rest from a seeded
            // offset so a violating pair is never missed.
            const Eigen::Index start = Eigen::Index(rng() % std::uint64_t(n));
            bool stepped = false;
            for (Eigen::Index off = 0; off < n && !stepped; ++off)
                stepped = take_step(i, (start + off) % n, Ei);
            if (stepped)
                ++changed;
        }
        if (changed == 0) {
            m.converged_ = true;
            break;
        }
    }

    for (Eigen::Index i = 0; i < n; ++i)
        if (a[i] > 0.0)
            m.support_.push_back(int(i));
    m.bias_ = b;
    return m;
}

SvmModel SvmModel::train_linear(const FeatureMatrix &X, const Labels &y,
                                const SvmConfig &cfg) {
    SvmModel m = solve(linear_kernel(X, X), y, cfg);
    m.mode_ = KernelMode::Linear;
    m.support_X_.resize(Eigen::Index(m.support_.size()), X.cols());
    for (std::size_t s = 0; s < m.support_.size(); ++s)
        m.support_X_.row(Eigen::Index(s)) = X.row(m.support_[s]);
    return m;
}

SvmModel SvmModel::train_precomputed(const KernelMatrix &K, const Labels &y,
                                     const SvmConfig &cfg) {
    SvmModel m = solve(K, y, cfg);
    m.mode_ = KernelMode::Precomputed;
    return m;
}

double SvmModel::decision(const Eigen::VectorXd &x) const {
    if (mode_ != KernelMode::Linear)
        throw std::logic_error("svm: decision(x) requires linear mode");
    double acc = bias_;
    for (std::size_t s = 0; s < support_.size(); ++s) {
        const int i = support_[s];
        acc += alphas_[i] * y_pm_[std::size_t(i)] *
               support_X_.row(Eigen::Index(s)).dot(x.transpose());
    }
    return acc;
}

double SvmModel::decision_row(const Eigen::VectorXd &k_row) const {
    if (mode_ != KernelMode::Precomputed)
        throw std::logic_error("svm: decision_row requires precomputed mode");
    if (std::size_t(k_row.size()) != support_.size())
        throw std::invalid_argument(
            "svm: kernel row length must equal support count");
    double acc = bias_;
    for (std::size_t s = 0; s < support_.size(); ++s) {
        const int i = support_[s];
        acc += alphas_[i] * y_pm_[std::size_t(i)] * k_row[Eigen::Index(s)];
    }
    return acc;
}

// Decision value 0 is a tie and predicts class 1.
int SvmModel::predict(const Eigen::VectorXd &x) const {
    return decision(x) >= 0.0 ? 1 : 0;
}

int SvmModel::predict_row(const Eigen::VectorXd &k_row) const {
    return decision_row(k_row) >= 0.0 ? 1 : 0;
}

double SvmModel::dual_objective(const KernelMatrix &K) const {
    double obj = alphas_.sum();
    for (int i : support_)
        for (int j : support_)
            obj -= 0.5 * alphas_[i] * alphas_[j] * y_pm_[std::size_t(i)] *
                   y_pm_[std::size_t(j)] * K(i, j);
    return obj;
}

nlohmann::json SvmModel::to_json() const {
    nlohmann::json j;
    j["mode"] = mode_ == KernelMode::Linear ? "linear" : "precomputed";
    j["C"] = C_;
    j["bias"] = bias_;
    j["converged"] = converged_;
    j["alphas"] = std::vector<double>(alphas_.begin(), alphas_.end());
    j["labels"] = y_pm_;
    j["support"] = support_;
    if (mode_ == KernelMode::Linear) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < support_X_.rows(); ++r) {
            std::vector<double> row(std::size_t(support_X_.cols()));
            for (Eigen::Index c = 0; c < support_X_.cols(); ++c)
                row[std::size_t(c)] = support_X_(r, c);
            rows.push_back(row);
        }
        j["support_vectors"] = rows;
    }
    return j;
}

SvmModel SvmModel::from_json(const nlohmann::json &j) {
    SvmModel m;
    m.mode_ = j.at("mode").get<std::string>() == "linear"
                  ? KernelMode::Linear
                  : KernelMode::Precomputed;
    m.C_ = j.at("C").get<double>();
    m.bias_ = j.at("bias").get<double>();
    m.converged_ = j.at("converged").get<bool>();
    const auto alphas = j.at("alphas").get<std::vector<double>>();
    m.alphas_ = Eigen::Map<const Eigen::VectorXd>(alphas.data(),
                                                  Eigen::Index(alphas.size()));
    m.y_pm_ = j.at("labels").get<std::vector<int>>();
    m.support_ = j.at("support").get<std::vector<int>>();
    if (m.mode_ == KernelMode::Linear) {
        const auto rows = j.at("support_vectors");
        const Eigen::Index cols =
            rows.empty() ? 0 : Eigen::Index(rows[0].size());
        m.support_X_.resize(Eigen::Index(rows.size()), cols);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                m.support_X_(Eigen::Index(r), c) = rows[r][std::size_t(c)];
    }
    return m;
}

} // namespace qsent::svm
