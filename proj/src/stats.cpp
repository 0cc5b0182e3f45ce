#include "qcvv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/gamma.hpp>

namespace qcvv {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double skewness(std::span<const double> x) {
    const double m = mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(x.size());
    m3 /= static_cast<double>(x.size());
    if (m2 == 0.0) return 0.0;
    return m3 / std::pow(m2, 1.5);
}

LinearFit linear_regression(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("regression needs >= 3 paired samples");
    const double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("regression abscissae are all equal");
    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        rss += e * e;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    return fit;
}

std::size_t Histogram::modal_bin() const {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

Histogram histogram(std::span<const double> x, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
    Histogram h;
    h.counts.assign(bins, 0.0);
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    for (double v : x) {
        auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
        b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        h.counts[static_cast<std::size_t>(b)] += 1.0;
    }
    return h;
}

Histogram default_histogram(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("histogram of an empty sample");
    const double hi = *std::max_element(x.begin(), x.end()) * 1.05;
    const auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.size()))));
    return histogram(x, 0.0, hi > 0.0 ? hi : 1.0, bins);
}

GoodnessOfFit gamma_goodness_of_fit(const Histogram& h, double alpha, double beta, int fitted_parameters,
                                    double min_expected) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("gamma parameters must be positive");
    const boost::math::gamma_distribution<double> law(alpha, beta);
    double n = 0.0;
    for (double c : h.counts) n += c;

    GoodnessOfFit g;
    g.expected.resize(h.bins());
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double lo = i == 0 ? 0.0 : boost::math::cdf(law, h.edges[i]);
        const double hi = i + 1 == h.bins() ? 1.0 : boost::math::cdf(law, h.edges[i + 1]);
        g.expected[i] = n * (hi - lo);
    }

    std::vector<double> obs, exp;
    double acc_o = 0.0, acc_e = 0.0;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        acc_o += h.counts[i];
        acc_e += g.expected[i];
        if (acc_e >= min_expected) {
            obs.push_back(acc_o);
            exp.push_back(acc_e);
            acc_o = acc_e = 0.0;
        }
    }
    if (acc_e > 0.0 || acc_o > 0.0) {
        if (exp.empty()) {
            obs.push_back(acc_o);
            exp.push_back(acc_e);
        } else {
            obs.back() += acc_o;
            exp.back() += acc_e;
        }
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (exp[i] > 0.0) g.chi2 += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    g.merged_bins = obs.size();
    g.dof = static_cast<int>(obs.size()) - 1 - fitted_parameters;
    g.chi2_normalized = n > 0.0 ? g.chi2 / n : 0.0;
    g.p_value = g.dof > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(g.dof), g.chi2))
                          : 1.0;
    return g;
}

}  // namespace qcvv
