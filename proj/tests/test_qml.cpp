#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>
#include <random>

#include "oracles.hpp"
#include "qsent/qml.hpp"

using namespace qsent;
using namespace qsent::qml;
using featmap::Entanglement;
using featmap::FeatureMapConfig;
constexpr double kPi = 3.14159265358979323846;

namespace {

FeatureMatrix random_scaled(Eigen::Index rows, Eigen::Index cols,
                            std::mt19937 &rng) {
    FeatureMatrix X(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            X(r, c) = oracles::uniform(rng, 0.0, 2.0 * kPi);
    return X;
}

Eigen::VectorXd random_theta(Eigen::Index n, std::mt19937 &rng) {
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i)
        t[i] = oracles::uniform(rng, -kPi, kPi);
    return t;
}

} // namespace

TEST_CASE("kernel self-fidelity is one") {
    std::mt19937 rng(3);
    const FeatureMatrix X = random_scaled(3, 2, rng);
    FeatureMatrix X2 = X;
    const FeatureMapConfig cfg{2, 2, Entanglement::Linear};
    const Eigen::MatrixXd K = quantum_kernel_matrix(X, X2, cfg);
    for (Eigen::Index i = 0; i < 3; ++i)
        CHECK(std::abs(K(i, i) - 1.0) < 1e-12);
}

TEST_CASE("single-qubit kernel has the cos^2 closed form") {
    const FeatureMapConfig cfg{1, 1, Entanglement::Linear};
    FeatureMatrix X(2, 1);
    X << 0.0, kPi / 2.0;
    const Eigen::MatrixXd K = quantum_kernel_matrix(X, cfg);
    CHECK(std::abs(K(0, 1)) < 1e-10); // cos^2(pi/2) = 0

    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        FeatureMatrix P(2, 1);
        P << oracles::uniform(rng, 0.0, 2.0 * kPi),
            oracles::uniform(rng, 0.0, 2.0 * kPi);
        const Eigen::MatrixXd Kp = quantum_kernel_matrix(P, cfg);
        const double expect = std::pow(std::cos(P(0, 0) - P(1, 0)), 2);
        CHECK(std::abs(Kp(0, 1) - expect) < 1e-10);
    }
}

TEST_CASE("kernel Gram matrices are symmetric PSD with unit diagonal") {
    std::mt19937 rng(7);
    for (const int n : {2, 3}) {
        const FeatureMatrix X = random_scaled(6, n, rng);
        const FeatureMapConfig cfg{n, 2, Entanglement::Linear};
        const Eigen::MatrixXd K = quantum_kernel_matrix(X, cfg);
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        for (Eigen::Index i = 0; i < K.rows(); ++i)
            CHECK(std::abs(K(i, i) - 1.0) < 1e-10);
        CHECK(K.minCoeff() >= -1e-10);
        CHECK(K.maxCoeff() <= 1.0 + 1e-10);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("permuting the rows permutes the Gram matrix identically") {
    std::mt19937 rng(11);
    const FeatureMatrix X = random_scaled(5, 2, rng);
    const FeatureMapConfig cfg{2, 2, Entanglement::Linear};
    const Eigen::MatrixXd K = quantum_kernel_matrix(X, cfg);

    const std::vector<Eigen::Index> perm = {3, 0, 4, 1, 2};
    FeatureMatrix Xp(5, 2);
    for (Eigen::Index i = 0; i < 5; ++i)
        Xp.row(i) = X.row(perm[std::size_t(i)]);
    const Eigen::MatrixXd Kp = quantum_kernel_matrix(Xp, cfg);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j)
            CHECK(std::abs(Kp(i, j) -
                           K(perm[std::size_t(i)], perm[std::size_t(j)])) <
                  1e-12);
}

TEST_CASE("a global phase on a state leaves fidelities unchanged") {
    std::mt19937 rng(13);
    const FeatureMapConfig cfg{2, 1, Entanglement::Linear};
    const auto a = featmap::feature_state(random_scaled(1, 2, rng).row(0), cfg);
    const auto b = featmap::feature_state(random_scaled(1, 2, rng).row(0), cfg);

    auto shifted = b.amplitudes();
    const std::complex<double> phase = std::exp(std::complex<double>(0, 1.234));
    for (auto &amp : shifted)
        amp *= phase;
    const auto b_shifted = qsim::StateVector::from_amplitudes(shifted);
    CHECK(std::abs(state_fidelity(a, b) - state_fidelity(a, b_shifted)) < 1e-12);
    CHECK(std::abs(qsim::expectation_parity_z(b) -
                   qsim::expectation_parity_z(b_shifted)) < 1e-12);
}

TEST_CASE("real-amplitudes ansatz with zero angles is trivial on |0...0>") {
    const Eigen::VectorXd theta = Eigen::VectorXd::Zero(3 * 3);
    const auto psi = qsim::run(build_real_amplitudes(3, 2, theta));
    CHECK(std::abs(psi.amplitudes()[0] - 1.0) < 1e-12);
}

TEST_CASE("single-qubit ansatz with theta = [pi, 0] flips the qubit") {
    Eigen::VectorXd theta(2);
    theta << kPi, 0.0;
    const auto psi = qsim::run(build_real_amplitudes(1, 1, theta));
    CHECK(std::abs(std::abs(psi.amplitudes()[1]) - 1.0) < 1e-12);
}

TEST_CASE("ansatz output amplitudes are real for random angles") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd theta = random_theta(3 * 4, rng);
        const auto psi = qsim::run(build_real_amplitudes(3, 3, theta));
        for (const auto &amp : psi.amplitudes())
            CHECK(std::abs(amp.imag()) < 1e-12);
    }
    CHECK_THROWS(build_real_amplitudes(3, 3, Eigen::VectorXd::Zero(5)));
}

TEST_CASE("forward pass matches the dense matrix oracle on two qubits") {
    std::mt19937 rng(19);
    const FeatureMapConfig map{2, 2, Entanglement::Linear};
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd x = random_scaled(1, 2, rng).row(0).transpose();
        const Eigen::VectorXd theta = random_theta(2 * 3, rng);

        const double got = vqc_expectation(x, map, 2, theta);

        const auto u_map =
            oracles::circuit_to_matrix(featmap::build_feature_map(x, map));
        const auto u_ansatz =
            oracles::circuit_to_matrix(build_real_amplitudes(2, 2, theta));
        oracles::CVector psi0 = oracles::CVector::Zero(4);
        psi0[0] = 1.0;
        const oracles::CVector psi = u_ansatz * (u_map * psi0);
        const double expect =
            (psi.adjoint() * oracles::parity_z_matrix(2) * psi)(0, 0).real();
        CHECK(std::abs(got - expect) < 1e-10);
    }
}

TEST_CASE("forward pass is deterministic") {
    std::mt19937 rng(23);
    const FeatureMapConfig map{2, 1, Entanglement::Linear};
    const Eigen::VectorXd x = random_scaled(1, 2, rng).row(0).transpose();
    const Eigen::VectorXd theta = random_theta(2 * 2, rng);
    CHECK(vqc_expectation(x, map, 1, theta) ==
          vqc_expectation(x, map, 1, theta));
}

TEST_CASE("loss is zero at the targets and one at distance one") {
    // e = +1 for |00>, matching label 1 with zero loss.
    const FeatureMapConfig map{1, 1, Entanglement::Linear};
    FeatureMatrix X(1, 1);
    X << 0.7;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(2);
    const double e = vqc_expectation(X.row(0).transpose(), map, 1, theta);
    // loss for target +1 is (e-1)^2; for target -1 it is (e+1)^2
    CHECK(vqc_loss(X, {1}, map, 1, theta) ==
          doctest::Approx((e - 1) * (e - 1)));
    CHECK(vqc_loss(X, {0}, map, 1, theta) ==
          doctest::Approx((e + 1) * (e + 1)));
    CHECK_THROWS(vqc_loss(FeatureMatrix(0, 1), {}, map, 1, theta));
}

TEST_CASE("loss equals an independent recomputation") {
    std::mt19937 rng(29);
    const FeatureMapConfig map{2, 2, Entanglement::Linear};
    const FeatureMatrix X = random_scaled(4, 2, rng);
    const Labels y = {0, 1, 1, 0};
    const Eigen::VectorXd theta = random_theta(2 * 4, rng);
    const double got = vqc_loss(X, y, map, 3, theta);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double e =
            vqc_expectation(X.row(i).transpose(), map, 3, theta);
        const double t = y[std::size_t(i)] ? 1.0 : -1.0;
        expect += (e - t) * (e - t);
    }
    expect /= 4.0;
    CHECK(std::abs(got - expect) < 1e-12);
}

TEST_CASE("parameter-shift gradient matches finite differences") {
    std::mt19937 rng(31);
    for (const int n : {1, 2, 3}) {
        const FeatureMapConfig map{n, 1, Entanglement::Linear};
        const FeatureMatrix X = random_scaled(3, n, rng);
        const Labels y = {1, 0, 1};
        const Eigen::VectorXd theta = random_theta(n * 3, rng);
        const Eigen::VectorXd grad = vqc_gradient(X, y, map, 2, theta);
        REQUIRE(grad.size() == theta.size());

        const double h = 1e-4;
        Eigen::VectorXd fd(theta.size());
        Eigen::VectorXd probe = theta;
        for (Eigen::Index p = 0; p < theta.size(); ++p) {
            probe[p] = theta[p] + h;
            const double up = vqc_loss(X, y, map, 2, probe);
            probe[p] = theta[p] - h;
            const double dn = vqc_loss(X, y, map, 2, probe);
            probe[p] = theta[p];
            fd[p] = (up - dn) / (2.0 * h);
        }
        const double denom = std::max(1.0, fd.cwiseAbs().maxCoeff());
        CHECK((grad - fd).cwiseAbs().maxCoeff() / denom < 1e-6);
    }
}

TEST_CASE("gradient is zero when every sample is saturated at its target") {
    // Single qubit, x = 0: the feature state is H|0>, and one RY(theta)
    // gives e = -sin(theta). At theta = -pi/2 the expectation saturates at
    // +1, matching label 1 exactly, so the squared-loss gradient vanishes.
    const FeatureMapConfig map{1, 1, Entanglement::Linear};
    FeatureMatrix X(1, 1);
    X << 0.0;
    Eigen::VectorXd theta(1);
    theta << -kPi / 2.0;
    CHECK(vqc_expectation(X.row(0).transpose(), map, 0, theta) ==
          doctest::Approx(1.0));
    const Eigen::VectorXd g = vqc_gradient(X, {1}, map, 0, theta);
    CHECK(g.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("adam first step moves by about -lr * sign(g)") {
    Eigen::VectorXd theta(3), g(3);
    theta << 1.0, -2.0, 0.5;
    g << 0.3, -0.7, 2.0;
    AdamState state(3);
    const AdamParams hp;
    const Eigen::VectorXd out = adam_step(theta, g, state, hp);
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double step = out[i] - theta[i];
        const double expect = -hp.lr * (g[i] > 0 ? 1.0 : -1.0);
        CHECK(std::abs(step - expect) < 1e-6);
    }
}

TEST_CASE("adam leaves parameters unchanged for zero gradient") {
    Eigen::VectorXd theta(4);
    theta << 1, 2, 3, 4;
    AdamState state(4);
    const Eigen::VectorXd out =
        adam_step(theta, Eigen::VectorXd::Zero(4), state, {});
    CHECK((out - theta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam trajectory matches an independent reimplementation") {
    std::mt19937 rng(37);
    const AdamParams hp{0.05, 0.9, 0.999, 1e-8};
    Eigen::VectorXd theta = random_theta(4, rng);
    Eigen::VectorXd ref = theta;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
    AdamState state(4);

    for (int t = 1; t <= 10; ++t) {
        const Eigen::VectorXd g = random_theta(4, rng);
        theta = adam_step(theta, g, state, hp);
        // reference: published update equations, element by element
        for (Eigen::Index i = 0; i < 4; ++i) {
            m[i] = hp.beta1 * m[i] + (1 - hp.beta1) * g[i];
            v[i] = hp.beta2 * v[i] + (1 - hp.beta2) * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(hp.beta1, t));
            const double vh = v[i] / (1 - std::pow(hp.beta2, t));
            ref[i] -= hp.lr * mh / (std::sqrt(vh) + hp.eps);
        }
        CHECK((theta - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(adam_step(theta, Eigen::VectorXd::Zero(3), state, hp));
}

TEST_CASE("zero iterations return the seeded initial parameters") {
    std::mt19937 rng(41);
    const FeatureMatrix X = random_scaled(4, 2, rng);
    const Labels y = {0, 1, 0, 1};
    VqcConfig cfg;
    cfg.map = {2, 1, Entanglement::Linear};
    cfg.layers = 1;
    cfg.iterations = 0;
    cfg.seed = 5;
    const VqcModel m = vqc_train(X, y, cfg);
    CHECK(m.loss_history().empty());

    // theta0 must be the seeded uniform[-pi, pi) draw
    std::mt19937 check(5);
    for (Eigen::Index p = 0; p < m.theta().size(); ++p) {
        const double expect = -kPi + 2.0 * kPi * (double(check()) / 4294967296.0);
        CHECK(m.theta()[p] == doctest::Approx(expect));
    }
}

TEST_CASE("training loss history is reproducible and non-increasing") {
    std::mt19937 rng(43);
    const FeatureMatrix X = random_scaled(6, 2, rng);
    const Labels y = {0, 1, 0, 1, 1, 0};
    VqcConfig cfg;
    cfg.map = {2, 1, Entanglement::Linear};
    cfg.layers = 1;
    cfg.iterations = 8;
    cfg.seed = 9;
    const VqcModel a = vqc_train(X, y, cfg);
    const VqcModel b = vqc_train(X, y, cfg);
    CHECK(a.loss_history() == b.loss_history());
    REQUIRE(a.loss_history().size() == 8);
    for (std::size_t i = 1; i < 8; ++i)
        CHECK(a.loss_history()[i] <= a.loss_history()[i - 1]);
}

TEST_CASE("prediction thresholds the expectation with ties to 1") {
    VqcConfig cfg;
    cfg.map = {1, 1, Entanglement::Linear};
    cfg.layers = 0;
    cfg.threshold = 0.0;
    // theta = [0]: state H-like with e = 0 at x = 0 -> tie -> class 1
    VqcModel m(cfg, Eigen::VectorXd::Zero(1));
    Eigen::VectorXd x(1);
    x << 0.0;
    CHECK(std::abs(m.forward(x)) < 1e-12);
    CHECK(m.predict(x) == 1);

    std::mt19937 rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd xs(1);
        xs << oracles::uniform(rng, 0.0, 2.0 * kPi);
        const double e = m.forward(xs);
        CHECK(m.predict(xs) == (e >= cfg.threshold ? 1 : 0));
    }
}

TEST_CASE("vqc model JSON round trip preserves the forward pass") {
    std::mt19937 rng(53);
    VqcConfig cfg;
    cfg.map = {2, 2, Entanglement::Full};
    cfg.layers = 2;
    VqcModel m(cfg, random_theta(2 * 3, rng));
    const VqcModel back = VqcModel::from_json(m.to_json());
    const Eigen::VectorXd x = random_scaled(1, 2, rng).row(0).transpose();
    CHECK(m.forward(x) == doctest::Approx(back.forward(x)).epsilon(1e-15));
}
