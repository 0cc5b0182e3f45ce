#include <gtest/gtest.h>

#include <boost/math/distributions/gamma.hpp>

#include "qcvv/optimize.hpp"
#include "qcvv/random.hpp"
#include "qcvv/stats.hpp"

using namespace qcvv;

TEST(Random, DeriveSeedIsDeterministicAndPathSensitive) {
    EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
    EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
    EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
}

TEST(Random, UniformIndexIsUniform) {
    Rng rng(42);
    std::vector<int> counts(24, 0);
    const int n = 24000;
    for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(24)];
    const double expected = n / 24.0, sd = std::sqrt(expected * (1 - 1 / 24.0));
    for (int c : counts) EXPECT_LT(std::abs(c - expected), 4 * sd);
}

TEST(Random, NormalMoments) {
    Rng rng(7);
    std::vector<double> x(20000);
    for (auto& v : x) v = rng.normal();
    EXPECT_NEAR(mean(x), 0.0, 0.03);
    EXPECT_NEAR(sample_variance(x), 1.0, 0.04);
}

TEST(Random, BinomialMean) {
    Rng rng(9);
    for (std::uint64_t trials : {25ull, 1000ull}) {
        double sum = 0.0;
        for (int i = 0; i < 4000; ++i) sum += static_cast<double>(rng.binomial(trials, 0.3));
        EXPECT_NEAR(sum / 4000 / trials, 0.3, 0.01);
    }
    EXPECT_EQ(rng.binomial(10, 0.0), 0u);
    EXPECT_EQ(rng.binomial(10, 1.0), 10u);
}

TEST(Stats, MomentsAndSkew) {
    const std::vector<double> x = {1, 2, 3, 4, 10};
    EXPECT_DOUBLE_EQ(mean(x), 4.0);
    EXPECT_DOUBLE_EQ(sample_variance(x), 12.5);
    EXPECT_GT(skewness(x), 1.0);
    const std::vector<double> sym = {-2, -1, 0, 1, 2};
    EXPECT_NEAR(skewness(sym), 0.0, 1e-15);
}

TEST(Stats, LinearRegression) {
    const std::vector<double> x = {0, 1, 2, 3, 4};
    const std::vector<double> y = {1, 3, 5, 7, 9};
    const LinearFit f = linear_regression(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
}

TEST(Stats, HistogramAndModalBin) {
    const std::vector<double> x = {0.0, 0.1, 0.1, 0.1, 0.9};
    const Histogram h = histogram(x, 0.0, 1.0, 10);
    EXPECT_EQ(h.counts.size(), 10u);
    EXPECT_EQ(h.modal_bin(), 1u);
    double total = 0.0;
    for (double c : h.counts) total += c;
    EXPECT_EQ(total, 5.0);
}

TEST(Stats, GammaGoodnessOfFitAcceptsTrueLaw) {
    Rng rng(12);
    std::vector<double> x(2000);
    for (auto& v : x) v = -0.01 * std::log(1.0 - rng.uniform());
    const GoodnessOfFit g = gamma_goodness_of_fit(default_histogram(x), 1.0, 0.01, 0);
    EXPECT_GT(g.p_value, 0.01);
    const GoodnessOfFit bad = gamma_goodness_of_fit(default_histogram(x), 1.0, 0.02, 0);
    EXPECT_LT(bad.p_value, 1e-6);
}

TEST(Optimize, NelderMeadRosenbrock) {
    auto f = [](const Eigen::VectorXd& x) { return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2); };
    const auto r = nelder_mead(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(0.1, 0.1));
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
    EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(Optimize, NelderMeadRespectsBounds) {
    auto f = [](const Eigen::VectorXd& x) { return (x[0] + 1) * (x[0] + 1); };
    NelderMeadOptions o;
    o.lower = Eigen::VectorXd::Zero(1);
    const auto r = nelder_mead(f, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5), o);
    EXPECT_NEAR(r.x[0], 0.0, 1e-8);
}

TEST(Optimize, LevenbergMarquardtExponentialFit) {
    std::vector<double> t, y;
    for (int i = 0; i < 20; ++i) {
        t.push_back(i * 0.25);
        y.push_back(2.0 * std::exp(-0.7 * t.back()));
    }
    ResidualFunction f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
        r.resize(20);
        if (J) J->resize(20, 2);
        for (int i = 0; i < 20; ++i) {
            const double e = std::exp(-p[1] * t[i]);
            r[i] = p[0] * e - y[i];
            if (J) {
                (*J)(i, 0) = e;
                (*J)(i, 1) = -p[0] * t[i] * e;
            }
        }
    };
    const auto r = levenberg_marquardt(f, Eigen::Vector2d(1.0, 0.2));
    EXPECT_NEAR(r.x[0], 2.0, 1e-8);
    EXPECT_NEAR(r.x[1], 0.7, 1e-8);
    Eigen::VectorXd res;
    Eigen::MatrixXd analytic;
    f(r.x, res, &analytic);
    EXPECT_LT((numeric_jacobian(f, r.x) - analytic).cwiseAbs().maxCoeff(), 1e-6);
}
