#include <algorithm>
#include <cmath>

#include "criteria.hpp"
#include "qcvv/rb.hpp"
#include "qcvv/walk.hpp"

namespace acceptance {

using namespace qcvv;

namespace {

const CliffordGroup& group() {
    static const CliffordGroup g = CliffordGroup::standard();
    return g;
}

Outcome gamma_replication() {
    const std::size_t J = 100;
    const double sigma = 0.02;
    RBConfig c;
    c.lengths = {J};
    c.sequences_per_length = 200;
    c.noise = {NoiseKind::QuasiDc, sigma, 2024};
    c.realizations = 200;
    c.seed = 2024;
    const RBDataset d = run_rb(group(), c);
    const std::vector<double> inf = d.lengths[0].infidelities();
    const GammaParams g = analytic_gamma_params(J, sigma);
    const GoodnessOfFit gof = gamma_test(inf, 1.0, g.beta);
    const GoodnessOfFit corr = gamma_test(inf, 1.0, correlated_gamma_params(group(), J, sigma).beta);
    const GammaFit fitted = fit_gamma(inf);
    const double skew = skewness(inf);
    const std::size_t mode = default_histogram(inf).modal_bin();
    Outcome o;
    o.pass = gof.p_value > 0.01 && skew > 1.0 && mode == 0;
    o.detail = "chi2 p=" + fmt(gof.p_value) + " (chi2/n=" + fmt(gof.chi2_normalized) + ", dof=" +
               std::to_string(gof.dof) + "), skew=" + fmt(skew) + ", modal bin=" + std::to_string(mode) +
               ", beta=" + fmt(g.beta) + ", mean I=" + fmt(mean(inf)) +
               "; vs correlation-corrected beta p=" + fmt(corr.p_value) + "; fitted beta=" + fmt(fitted.beta) +
               " p=" + fmt(fitted.fit_quality.p_value);
    return o;
}

Outcome correlation_contrast() {
    const std::size_t J = 100;
    const double sigma = 0.02;
    RBConfig c;
    c.lengths = {J};
    c.sequences_per_length = 100;
    c.realizations = 200;
    c.seed = 77;
    c.noise = {NoiseKind::White, sigma, 78};
    const RBDataset white = run_rb(group(), c);
    c.noise.kind = NoiseKind::QuasiDc;
    const RBDataset dc = run_rb(group(), c);

    auto regress = [](const RBDataset& d) {
        std::vector<double> x, y;
        for (const auto& s : d.lengths[0].sequences) {
            x.push_back(s.unit_walk_v2d_sq);
            y.push_back(s.infidelity());
        }
        return linear_regression(x, y);
    };
    const LinearFit fw = regress(white), fd = regress(dc);
    const double tw = fw.slope / fw.slope_stderr, td = fd.slope / fd.slope_stderr;
    Outcome o;
    o.pass = std::abs(tw) < 2.0 && td > 5.0;
    o.detail = "white slope/se=" + fmt(tw) + ", dc slope/se=" + fmt(td);
    return o;
}

Outcome long_walk_rb() {
    const double sigma = 0.02;
    RBConfig c;
    c.lengths = {25, 50, 100, 200};
    c.realizations = 200;
    c.seed = 31;
    std::string detail;
    bool pass = true;
    for (NoiseKind kind : {NoiseKind::QuasiDc, NoiseKind::White}) {
        c.noise = {kind, sigma, 32};
        c.sequences_per_length = 100;
        c.long_walk_multiplier.reset();
        const DecayFit base = fit_decay(decay_points(run_rb(group(), c)));
        c.sequences_per_length = 20;
        c.long_walk_multiplier = 2.0;
        const DecayFit lw = fit_decay(decay_points(run_rb(group(), c)));
        const double ratio = lw.p_rb / base.p_rb;
        const bool ok = kind == NoiseKind::QuasiDc ? (ratio >= 1.5 && ratio <= 6.0) : (ratio >= 0.8 && ratio <= 1.25);
        pass = pass && ok;
        detail += std::string(noise_kind_name(kind)) + " p_LW/p_rb=" + fmt(ratio) + " (p_rb=" + fmt(base.p_rb) +
                  ") ";
    }
    return {pass, detail};
}

Outcome first_order_oracle() {
    const std::size_t J = 50;
    Rng rng(derive_seed(5, {50}));
    std::vector<double> ratios;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 50; ++i) {
        const RBSequence s = generate_rb_sequence(group(), J, rng);
        const WalkRecord w = compute_walk(group(), s.gates, SignedPauli::plus(Axis::Z), StepWeighting::Concurrent);
        for (double delta : {0.001, 0.002, 0.005}) {
            const std::vector<double> d(timed_pulse_count(group(), s.gates), delta);
            const double exact = std::norm(sequence_unitary(group(), s.gates, d).matrix()(1, 0));
            const double r = exact / predicted_dc_infidelity(delta, w);
            ratios.push_back(r);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios[ratios.size() / 2];
    Outcome o;
    o.pass = lo >= 0.8 && hi <= 1.2 && median >= 0.95 && median <= 1.05;
    o.detail = "ratio range [" + fmt(lo) + ", " + fmt(hi) + "], median " + fmt(median);
    return o;
}

}  // namespace

std::vector<Criterion> rb_criteria() {
    return {
        {2, "gamma distribution of dc RB infidelities", 300, gamma_replication},
        {3, "white vs dc correlation with walk length", 600, correlation_contrast},
        {4, "long-walk RB error amplification", 600, long_walk_rb},
        {5, "first-order walk oracle", 60, first_order_oracle},
    };
}

}  // namespace acceptance
