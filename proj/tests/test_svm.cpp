#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "oracles.hpp"
#include "qsent/errors.hpp"
#include "qsent/svm.hpp"

using namespace qsent;
using namespace qsent::svm;

namespace {

FeatureMatrix random_points(Eigen::Index rows, Eigen::Index cols,
                            std::mt19937 &rng) {
    FeatureMatrix X(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            X(r, c) = oracles::uniform(rng, -2.0, 2.0);
    return X;
}

} // namespace

TEST_CASE("linear kernel basics") {
    FeatureMatrix X(2, 2);
    X << 1, 0, 0, 1;
    const KernelMatrix K = linear_kernel(X, X);
    CHECK(K(0, 0) == doctest::Approx(1));
    CHECK(K(0, 1) == doctest::Approx(0));
    CHECK(K(1, 1) == doctest::Approx(1));

    Eigen::VectorXd x(3);
    x << 1, 2, 3;
    const KernelMatrix self = linear_kernel(x.transpose(), x.transpose());
    CHECK(self(0, 0) == doctest::Approx(x.squaredNorm()));

    FeatureMatrix bad(2, 4);
    CHECK_THROWS(linear_kernel(X, bad));
}

TEST_CASE("linear kernel matches a naive triple loop") {
    std::mt19937 rng(3);
    const FeatureMatrix A = random_points(5, 3, rng);
    const FeatureMatrix B = random_points(4, 3, rng);
    const KernelMatrix K = linear_kernel(A, B);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (Eigen::Index c = 0; c < 3; ++c)
                acc += A(i, c) * B(j, c);
            CHECK(std::abs(K(i, j) - acc) < 1e-12);
        }
}

TEST_CASE("separable 1-D points train to full accuracy") {
    FeatureMatrix X(4, 1);
    X << -2, -1, 1, 2;
    const Labels y = {0, 0, 1, 1};
    const SvmModel m = SvmModel::train_linear(X, y, {});
    CHECK(m.converged());
    for (Eigen::Index i = 0; i < 4; ++i)
        CHECK(m.predict(X.row(i).transpose()) == y[std::size_t(i)]);
}

TEST_CASE("XOR is not linearly separable") {
    FeatureMatrix X(4, 2);
    X << 0, 0, 1, 1, 0, 1, 1, 0;
    const Labels y = {1, 1, 0, 0};
    const SvmModel m = SvmModel::train_linear(X, y, {});
    int correct = 0;
    for (Eigen::Index i = 0; i < 4; ++i)
        correct += m.predict(X.row(i).transpose()) == y[std::size_t(i)];
    CHECK(correct < 4);
}

TEST_CASE("trained alphas satisfy the dual constraints") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const FeatureMatrix X = random_points(12, 2, rng);
        Labels y;
        for (int i = 0; i < 12; ++i)
            y.push_back(int(rng() % 2));
        y[0] = 0;
        y[1] = 1;
        const SvmConfig cfg{1.0, 1e-3, 200, 7};
        const SvmModel m = SvmModel::train_linear(X, y, cfg);
        double balance = 0.0;
        for (Eigen::Index i = 0; i < m.alphas().size(); ++i) {
            CHECK(m.alphas()[i] >= -1e-12);
            CHECK(m.alphas()[i] <= cfg.C + 1e-12);
            balance += m.alphas()[i] * m.internal_labels()[std::size_t(i)];
        }
        CHECK(std::abs(balance) < 1e-8);
    }
}

TEST_CASE("SMO reaches the brute-force dual optimum on a tiny instance") {
    std::mt19937 rng(11);
    const FeatureMatrix X = random_points(6, 2, rng);
    const Labels y = {0, 1, 0, 1, 1, 0};
    const KernelMatrix K = linear_kernel(X, X);

    const SvmModel m =
        SvmModel::train_precomputed(K, y, {1.0, 1e-5, 500, 13});
    CHECK(m.converged());

    const auto oracle = oracles::brute_force_dual(K, m.internal_labels(), 1.0);
    CHECK(std::abs(m.dual_objective(K) - oracle.best_objective) < 1e-4);
}

TEST_CASE("precomputed linear Gram equals the linear mode") {
    std::mt19937 rng(17);
    const FeatureMatrix X = random_points(10, 3, rng);
    Labels y;
    for (int i = 0; i < 10; ++i)
        y.push_back(i % 2);
    const SvmConfig cfg{1.0, 1e-4, 300, 19};

    const SvmModel lin = SvmModel::train_linear(X, y, cfg);
    const SvmModel pre =
        SvmModel::train_precomputed(linear_kernel(X, X), y, cfg);

    const auto &support = pre.support_indices();
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd x = random_points(1, 3, rng).row(0).transpose();
        Eigen::VectorXd k_row(Eigen::Index(support.size()));
        for (std::size_t s = 0; s < support.size(); ++s)
            k_row[Eigen::Index(s)] = X.row(support[s]).dot(x.transpose());
        CHECK(lin.predict(x) == pre.predict_row(k_row));
        CHECK(std::abs(lin.decision(x) - pre.decision_row(k_row)) < 1e-6);
    }
}

TEST_CASE("decision value zero at the midpoint predicts class 1") {
    FeatureMatrix X(2, 1);
    X << -1, 1;
    const Labels y = {0, 1};
    const SvmModel m = SvmModel::train_linear(X, y, {});
    Eigen::VectorXd mid(1);
    mid << 0.0;
    CHECK(std::abs(m.decision(mid)) < 1e-9);
    CHECK(m.predict(mid) == 1);
}

TEST_CASE("larger C never hurts training accuracy on a noisy separable set") {
    std::mt19937 rng(23);
    FeatureMatrix X(20, 2);
    Labels y;
    for (int i = 0; i < 20; ++i) {
        const int cls = i % 2;
        X(i, 0) = (cls ? 1.5 : -1.5) + oracles::uniform(rng, -1.0, 1.0);
        X(i, 1) = oracles::uniform(rng, -1.0, 1.0);
        y.push_back(cls);
    }
    double last_acc = -1.0;
    for (const double C : {0.01, 0.1, 1.0, 10.0}) {
        const SvmModel m = SvmModel::train_linear(X, y, {C, 1e-4, 500, 29});
        REQUIRE(m.converged());
        int correct = 0;
        for (Eigen::Index i = 0; i < 20; ++i)
            correct += m.predict(X.row(i).transpose()) == y[std::size_t(i)];
        const double acc = correct / 20.0;
        CHECK(acc >= last_acc);
        last_acc = acc;
    }
}

TEST_CASE("asymmetric kernels are rejected") {
    KernelMatrix K(2, 2);
    K << 1, 0.5, 0.2, 1;
    CHECK_THROWS_AS(SvmModel::train_precomputed(K, {0, 1}, {}),
                    std::invalid_argument);
}

TEST_CASE("training is deterministic for a fixed seed") {
    std::mt19937 rng(31);
    const FeatureMatrix X = random_points(8, 2, rng);
    const Labels y = {0, 1, 1, 0, 1, 0, 0, 1};
    const SvmConfig cfg{1.0, 1e-3, 100, 37};
    const SvmModel a = SvmModel::train_linear(X, y, cfg);
    const SvmModel b = SvmModel::train_linear(X, y, cfg);
    CHECK((a.alphas() - b.alphas()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.bias() == b.bias());
}

TEST_CASE("model JSON round trip preserves predictions") {
    std::mt19937 rng(41);
    const FeatureMatrix X = random_points(8, 2, rng);
    const Labels y = {0, 1, 1, 0, 1, 0, 0, 1};
    const SvmModel m = SvmModel::train_linear(X, y, {});
    const SvmModel back = SvmModel::from_json(m.to_json());
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd x = random_points(1, 2, rng).row(0).transpose();
        CHECK(m.predict(x) == back.predict(x));
    }
}
