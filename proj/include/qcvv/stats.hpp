#pragma once

#include <span>
#include <vector>

namespace qcvv {

double mean(std::span<const double> x);
/// Unbiased (n-1) sample variance; 0 for fewer than two samples.
double sample_variance(std::span<const double> x);
/// Fisher-Pearson skewness m3 / m2^{3/2}.
double skewness(std::span<const double> x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

/// Ordinary least-squares line y = intercept + slope * x.
LinearFit linear_regression(std::span<const double> x, std::span<const double> y);

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<double> counts;

    std::size_t bins() const { return counts.size(); }
    std::size_t modal_bin() const;
};

/// Fixed-width histogram over [0, max(x) * 1.05] with ceil(sqrt(n)) bins.
Histogram default_histogram(std::span<const double> x);
Histogram histogram(std::span<const double> x, double lo, double hi, std::size_t bins);

struct GoodnessOfFit {
    double chi2 = 0.0;             // Pearson statistic on counts after merging sparse bins
    double chi2_normalized = 0.0;  // chi2 / n, the same statistic on relative frequencies
    int dof = 0;
    double p_value = 1.0;
    std::size_t merged_bins = 0;
    std::vector<double> expected;  // per original bin; the last bin carries the upper tail
};

/// Pearson chi-square test of a histogram against a Gamma(alpha, beta)
/// (shape, scale) law. Adjacent bins are merged until each expected count is at
/// least `min_expected`. `fitted_parameters` is subtracted from the dof.
GoodnessOfFit gamma_goodness_of_fit(const Histogram& h, double alpha, double beta, int fitted_parameters,
                                    double min_expected = 5.0);

}  // namespace qcvv
