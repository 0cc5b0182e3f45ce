#include <gtest/gtest.h>

#include <chrono>
#include <fstream>

#include "qcvv/gst/design.hpp"
#include "qcvv/gst/diamond.hpp"
#include "qcvv/gst/estimation.hpp"
#include "qcvv/gst/gauge.hpp"
#include "qcvv/gst/gateset.hpp"
#include "qcvv/gst/pipeline.hpp"

using namespace qcvv;
using namespace qcvv::gst;

namespace {

const GSTDesign& design() {
    static const GSTDesign d = standard_design();
    return d;
}

PTM random_rotation_gauge(Rng& rng, double scale) {
    return rotation_gauge(Vec3(rng.normal(), rng.normal(), rng.normal()) * scale);
}

}  // namespace

TEST(Design, StandardCountAndRuntime) {
    const auto start = std::chrono::steady_clock::now();
    const GSTDesign d = standard_design();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(d.sequences.size(), 2737u);
    EXPECT_LT(s, 1.0);
    EXPECT_EQ(d.fiducials.size(), 6u);
    EXPECT_EQ(d.germs.size(), 11u);
}

TEST(Design, UnitGermBlockHasAllFiducialPairs) {
    for (int g = 0; g < 3; ++g) {
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) {
                GateString s = design().fiducials[i];
                s.push_back(g);
                s.insert(s.end(), design().fiducials[j].begin(), design().fiducials[j].end());
                EXPECT_TRUE(design().find(s).has_value());
            }
    }
}

TEST(Design, ContainsLongGermAndIsDeterministic) {
    const GateString germ = design().parse("Gx.Gx.Gy.Gx.Gy.Gy");
    EXPECT_NE(std::find(design().germs.begin(), design().germs.end(), germ), design().germs.end());
    const GSTDesign again = standard_design();
    for (std::size_t s = 0; s < again.sequences.size(); ++s) EXPECT_EQ(again.sequences[s].gates, design().sequences[s].gates);
}

TEST(Design, JsonRoundTrip) {
    const GSTDesign back = design_from_json(to_json(design()));
    EXPECT_EQ(back.sequences.size(), design().sequences.size());
    EXPECT_EQ(design().format(design().parse("Gx.Gi")), "Gx.Gi");
    EXPECT_EQ(design().parse("{}").size(), 0u);
}

TEST(Design, ExtendedGermsFollowTheRule) {
    const auto germs = extended_germ_words();
    ASSERT_EQ(germs.size(), 39u);
    std::set<std::vector<std::string>> unique(germs.begin(), germs.end());
    EXPECT_EQ(unique.size(), 39u);
    const GSTDesign ext = extended_design();
    EXPECT_EQ(ext.labels.size(), 5u);
    EXPECT_GT(ext.sequences.size(), design().sequences.size());
}

TEST(Design, ShippedExtendedGermFileMatchesRule) {
    std::ifstream in(std::string(QCVV_DATA_DIR) + "/extended_germs_v1.json");
    ASSERT_TRUE(in.good());
    const auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j.at("version"), kExtendedDesignVersion);
    const GSTDesign ext = extended_design();
    std::vector<std::string> expected;
    for (const auto& g : ext.germs) expected.push_back(ext.format(g));
    EXPECT_EQ(j.at("germs").get<std::vector<std::string>>(), expected);
}

TEST(ErrorModel, ZeroMagnitudeIsIdeal) {
    const GateSet ideal = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet g = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.0});
    for (std::size_t k = 0; k < 3; ++k) EXPECT_LT((g.gates[k] - ideal.gates[k]).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(ideal.gate("Gi").isIdentity(1e-15));
}

TEST(ErrorModel, DetunedIdleAndOverrotatedDrive) {
    const double delta = 0.03;
    const GateSet d = apply_error_model({"Gi", "Gx"}, {ErrorKind::Detuning, delta});
    EXPECT_LT((d.gate("Gi") - unitary_to_ptm(noisy_pulse_unitary(PhysicalPulse::idle(2), delta))).cwiseAbs().maxCoeff(), 1e-15);
    // idle phase: Rz(pi delta)
    EXPECT_NEAR(d.gate("Gi")(1, 1), std::cos(kPi * delta), 1e-14);
    const GateSet o = apply_error_model({"Gi", "Gx"}, {ErrorKind::Overrotation, 0.1});
    EXPECT_LT((o.gate("Gx") - unitary_to_ptm(Unitary2::rotation(Vec3::UnitX(), 1.1 * kPi / 2))).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE(o.gate("Gi").isIdentity(1e-15));
    EXPECT_THROW(apply_error_model({"Gx"}, {ErrorKind::Detuning, 0.6}), std::invalid_argument);
}

TEST(Gauge, TransformPreservesProbabilities) {
    Rng rng(3);
    const GateSet g = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.04});
    PTM T = random_rotation_gauge(rng, 0.3);
    T.block<3, 1>(1, 0) << 0.01, -0.02, 0.03;
    T(2, 3) += 0.05;
    const GateSet h = apply_gauge(g, T);
    for (std::size_t s = 0; s < design().sequences.size(); s += 7) {
        const auto& gs = design().sequences[s].gates;
        EXPECT_NEAR(g.probability(gs), h.probability(gs), 1e-9);
    }
}

TEST(Simulate, IdealSpamOverlapAndRamsey) {
    const GateSet ideal = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GSTDataset d = simulate_dataset(ideal, design(), kExactShots, 1);
    EXPECT_NEAR(d.frequencies[*design().find(design().parse("Gi"))], 1.0, 1e-14);

    // Gx Gi^n Gx: Ramsey fringe with phase pi * delta per idle, each
    // detuned pi/2 pulse adding 1/pi of an idle to the free evolution
    const double delta = 0.01;
    const GateSet g = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, delta});
    for (int n : {1, 4, 16, 64}) {
        GateString s = {1};
        for (int k = 0; k < n; ++k) s.push_back(0);
        s.push_back(1);
        const double expected = 0.5 * (1 - std::cos(kPi * delta * (n + 2 / kPi)));
        EXPECT_NEAR(g.probability(s), expected, 2e-4) << n;
    }
}

TEST(Simulate, FiniteShotsAreBinomial) {
    const GateSet g = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.02});
    const GSTDataset exact = simulate_dataset(g, design(), kExactShots, 1);
    const GSTDataset sampled = simulate_dataset(g, design(), 1000000, 1);
    for (std::size_t s = 0; s < exact.frequencies.size(); ++s) {
        const double p = exact.frequencies[s];
        EXPECT_LE(std::abs(sampled.frequencies[s] - p), 5 * std::sqrt(p * (1 - p) / 1e6) + 1e-12);
    }
}

TEST(Simulate, JsonRoundTrip) {
    const GateSet g = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.02});
    const GSTDataset d = simulate_dataset(g, design(), 220, 4);
    const GSTDataset back = dataset_from_json(to_json(d, design()), design());
    EXPECT_EQ(back.counts, d.counts);
    EXPECT_EQ(back.frequencies, d.frequencies);
}

TEST(LGST, IdealDataReproducesProbabilities) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GSTDataset d = simulate_dataset(target, design(), kExactShots, 1);
    const LGSTResult r = lgst(d, design(), target);
    EXPECT_LT(r.gram_condition, 1e3);
    for (std::size_t s = 0; s < design().sequences.size(); ++s)
        EXPECT_NEAR(r.estimate.probability(design().sequences[s].gates), d.frequencies[s], 1e-10);
    EXPECT_TRUE(is_trace_preserving(r.estimate));
}

TEST(LGST, DetunedDataReproducesShortSequences) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet truth = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.0444});
    const GSTDataset d = simulate_dataset(truth, design(), kExactShots, 1);
    const LGSTResult r = lgst(d, design(), target);
    for (std::size_t s = 0; s < design().sequences.size(); ++s) {
        if (design().sequences[s].max_length > 1) continue;
        EXPECT_NEAR(r.estimate.probability(design().sequences[s].gates), d.frequencies[s], 1e-8);
    }
}

TEST(LGST, FiniteShotResidualsWithinBinomialBands) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet truth = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.02});
    const GSTDataset d = simulate_dataset(truth, design(), 220, 9);
    const LGSTResult r = lgst(d, design(), target);
    for (std::size_t s = 0; s < design().sequences.size(); ++s) {
        if (design().sequences[s].germ != -1) continue;
        const double p = std::clamp(r.estimate.probability(design().sequences[s].gates), 0.0, 1.0);
        EXPECT_LE(std::abs(d.frequencies[s] - p), 5 * std::sqrt(std::max(p * (1 - p), 0.01) / 220));
    }
}

TEST(LGST, IllConditionedGramIsReported) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    GSTDataset d = simulate_dataset(target, design(), kExactShots, 1);
    std::fill(d.frequencies.begin(), d.frequencies.end(), 0.5);
    EXPECT_THROW(lgst(d, design(), target), IllConditionedGram);
}

TEST(MLE, IdealDataHasZeroObjective) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GSTDataset d = simulate_dataset(target, design(), kExactShots, 1);
    const MLEResult r = mle_refine(lgst(d, design(), target).estimate, d, design());
    EXPECT_LT(r.log.objective, 1e-12);
    EXPECT_EQ(r.log.stages.size(), 9u);
}

TEST(MLE, DetunedDataIsWithinModel) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet truth = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.0444});
    const GSTDataset d = simulate_dataset(truth, design(), 220, 5);
    const MLEResult r = mle_refine(lgst(d, design(), target).estimate, d, design());
    EXPECT_LT(r.log.model_violation, 5.0);
    EXPECT_LT(r.log.objective, chi2_objective(truth, d, design()) + 1.0);
}

TEST(MLE, DriftRaisesModelViolationWithShots) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet plus = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, 0.02});
    const GateSet minus = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, -0.02});
    double previous = -1e300;
    for (std::uint64_t shots : {100u, 1000u, 10000u}) {
        const GSTDataset d = simulate_drift_dataset(plus, minus, design(), shots, 6);
        const MLEResult r = mle_refine(lgst(d, design(), target).estimate, d, design());
        EXPECT_GT(r.log.model_violation, previous);
        previous = r.log.model_violation;
    }
    EXPECT_GT(previous, 5.0);
}

TEST(GaugeOpt, TargetIsFixedPoint) {
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GaugeResult r = gauge_optimize(target, target);
    EXPECT_LT(r.objective_after, 1e-20);
    EXPECT_TRUE(r.transform.isIdentity(1e-9));
}

TEST(GaugeOpt, RecoversConstructedGauge) {
    Rng rng(12);
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    for (int trial = 0; trial < 3; ++trial) {
        const GateSet rotated = apply_gauge(target, random_rotation_gauge(rng, 0.4));
        for (GaugeMode mode : {GaugeMode::Unitary, GaugeMode::TPThenUnitary}) {
            const GaugeResult r = gauge_optimize(rotated, target, {mode, 1.0});
            EXPECT_LT(r.objective_after, 1e-10);
            for (std::size_t k = 0; k < 3; ++k)
                EXPECT_LT((r.gate_set.gates[k] - target.gates[k]).cwiseAbs().maxCoeff(), 1e-6);
        }
    }
}

TEST(GaugeOpt, DetunedDrivesReturnToEquator) {
    const double delta = 0.0444;
    const GateSet target = ideal_gate_set({"Gi", "Gx", "Gy"});
    const GateSet truth = apply_error_model({"Gi", "Gx", "Gy"}, {ErrorKind::Detuning, delta});
    const GaugeResult r = gauge_optimize(truth, target);
    for (const char* label : {"Gx", "Gy"}) {
        auto axis_tilt = [](const PTM& G) {
            const Eigen::Matrix3d R = G.block<3, 3>(1, 1);
            const Vec3 n(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
            return std::abs(n.normalized().z());
        };
        EXPECT_LT(axis_tilt(r.gate_set.gate(label)), 0.5 * axis_tilt(truth.gate(label))) << label;
    }
}

TEST(GaugeOpt, ParseModes) {
    EXPECT_EQ(parse_gauge_mode("none"), GaugeMode::None);
    EXPECT_EQ(parse_gauge_mode("tp-then-unitary"), GaugeMode::TPThenUnitary);
    EXPECT_THROW(parse_gauge_mode("full"), std::invalid_argument);
}

TEST(Diamond, IdenticalChannels) {
    const PTM g = unitary_to_ptm(Unitary2::rotation(Vec3(1, 2, 3), 0.7));
    EXPECT_LT(diamond_distance(g, g).value, 1e-8);
}

TEST(Diamond, ZRotationClosedForm) {
    const double phi = 0.2;
    const Unitary2 rz = Unitary2::rotation(Vec3::UnitZ(), phi);
    const DiamondResult r = diamond_distance(unitary_to_ptm(rz), PTM::Identity());
    EXPECT_NEAR(r.value, kDiamondConvention * 2 * std::sin(phi / 2), 1e-6);
    EXPECT_NEAR(r.value, unitary_diamond_distance(rz, Unitary2()), 1e-6);
    EXPECT_FALSE(r.flagged);
}

TEST(Diamond, OverrotationMatchesUnitaryPair) {
    const double eps = 0.01;
    const Unitary2 a = Unitary2::rotation(Vec3::UnitX(), (1 + eps) * kPi / 2);
    const Unitary2 b = Unitary2::rotation(Vec3::UnitX(), kPi / 2);
    EXPECT_NEAR(diamond_distance(unitary_to_ptm(a), unitary_to_ptm(b)).value, std::sin(eps * kPi / 4), 1e-6);
}

TEST(Diamond, RandomUnitaryPairs) {
    Rng rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        const Unitary2 a = Unitary2::rotation(Vec3(rng.normal(), rng.normal(), rng.normal()), 3 * rng.uniform());
        const Unitary2 b = Unitary2::rotation(Vec3(rng.normal(), rng.normal(), rng.normal()), 3 * rng.uniform());
        const DiamondResult r = diamond_distance(unitary_to_ptm(a), unitary_to_ptm(b));
        EXPECT_NEAR(r.value, unitary_diamond_distance(a, b), 1e-5);
        EXPECT_NEAR(r.cross_check, r.value, 1e-4);
    }
}

TEST(Diamond, DepolarizingChannel) {
    // Known value: half diamond distance of a depolarising channel with
    // Bloch shrink factor f from the identity is 3(1 - f)/4.
    PTM dep = PTM::Identity();
    const double f = 0.9;
    dep(1, 1) = dep(2, 2) = dep(3, 3) = f;
    EXPECT_NEAR(diamond_distance(dep, PTM::Identity()).value, 0.75 * (1 - f), 1e-6);
}

TEST(Diamond, RejectsNonCPInput) {
    PTM bad = PTM::Identity();
    bad(1, 1) = 1.2;
    EXPECT_THROW(diamond_distance(bad, PTM::Identity()), std::invalid_argument);
}

TEST(Choi, RoundTripAndProjection) {
    const PTM g = unitary_to_ptm(Unitary2::rotation(Vec3(0, 1, 0), 1.3));
    EXPECT_LT((ptm_from_choi(choi_from_ptm(g)) - g).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(min_choi_eigenvalue(g), 0.0, 1e-12);
    PTM bad = g;
    bad.block<3, 3>(1, 1) *= 1.01;
    EXPECT_LT(min_choi_eigenvalue(bad), -1e-3);
    const CPTPProjection p = project_to_cptp(bad);
    EXPECT_GT(p.clipped, 0.0);
    EXPECT_GT(min_choi_eigenvalue(p.ptm), -1e-10);
    EXPECT_LT((p.ptm.row(0) - Eigen::RowVector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pipeline, NoErrorGivesZeroDistancesAtFiniteShots) {
    const GSTReport r = run_gst_pipeline({ErrorKind::None, 0.0}, design(), 220, {}, 11);
    for (const auto& g : r.gates) {
        EXPECT_LT(g.dd_calc, 1e-8) << g.gate;
        EXPECT_LT(g.dd_calc_gauge, 1e-6) << g.gate;
        EXPECT_LE(g.dd_est, 2e-3) << g.gate;
    }
}

TEST(Pipeline, GaugeOptimisedEstimatePreservesProbabilities) {
    const GateSet truth = apply_error_model(design().labels, {ErrorKind::Detuning, 0.0444});
    const GSTDataset d = simulate_dataset(truth, design(), kExactShots, 1);
    const GSTAnalysis a = analyze_dataset(d, design(), {});
    const GateSet raw = apply_gauge(a.estimate, a.gauge.transform.inverse());
    for (std::size_t s = 0; s < design().sequences.size(); ++s) {
        const auto& gs = design().sequences[s].gates;
        EXPECT_NEAR(a.estimate.probability(gs), raw.probability(gs), 1e-9);
        EXPECT_NEAR(a.estimate.probability(gs), d.frequencies[s], 1e-9);
    }
}

TEST(Pipeline, DiamondDistanceIsGaugeVariant) {
    const GateSet truth = apply_error_model(design().labels, {ErrorKind::Detuning, 1000.0 / kRabiFrequencyHz});
    const auto rows = calculated_distances(truth, {GaugeMode::TPThenUnitary, 1e-3});
    for (const auto& r : rows)
        if (r.gate != "Gi") EXPECT_GT(r.dd_calc / r.dd_calc_gauge, 5.0) << r.gate;
}

TEST(Pipeline, CsvSchema) {
    const GSTReport r = run_gst_pipeline({ErrorKind::Overrotation, 0.01}, design(), kExactShots, {}, 1);
    EXPECT_EQ(gst_csv_header(), "gate,kind,magnitude,dd_calc,dd_calc_gauge,dd_est\n");
    const std::string rows = gst_csv_rows(r);
    EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 3);
    EXPECT_EQ(rows.rfind("Gi,overrot,0.01,", 0), 0u);
    const auto j = to_json(r);
    EXPECT_EQ(j.at("gates").size(), 3u);
    EXPECT_EQ(j.at("diamond_convention"), kDiamondConvention);
}

TEST(Pipeline, DefaultDetunings) {
    EXPECT_EQ(default_detunings_hz(), (std::vector<double>{75, 500, 1000, 1400}));
    EXPECT_NEAR(1000.0 / kRabiFrequencyHz, 0.0444, 1e-4);
}

TEST(SequenceWalk, IdleGermsDominateGrowth) {
    // max over fiducial pairs of |V_2D|^2 at germ-power lengths 128 and 256
    auto growth = [](const GateString& germ) {
        double v128 = 0, v256 = 0;
        for (const auto& fa : design().fiducials)
            for (const auto& fb : design().fiducials) {
                auto walk = [&](std::size_t L) {
                    GateString s = fa;
                    for (std::size_t r = 0; r < L / germ.size(); ++r) s.insert(s.end(), germ.begin(), germ.end());
                    s.insert(s.end(), fb.begin(), fb.end());
                    return gst_sequence_walk(design(), s).norm_v2d_sq;
                };
                const double b = walk(256);
                if (b > v256) {
                    v256 = b;
                    v128 = walk(128);
                }
            }
        return std::pair{v128, v256};
    };
    const int gi = static_cast<int>(std::find(design().labels.begin(), design().labels.end(), "Gi") - design().labels.begin());
    double idle_free_max = 0, pure_idle = 0;
    for (const auto& germ : design().germs) {
        const auto [a, b] = growth(germ);
        const bool has_idle = std::find(germ.begin(), germ.end(), gi) != germ.end();
        if (!has_idle) {
            idle_free_max = std::max(idle_free_max, b);
            EXPECT_LE(b, a + 2.0) << design().format(germ);  // bounded, no growth with L
        }
        if (germ == GateString{gi}) {
            pure_idle = b;
            EXPECT_NEAR(b / a, 4.0, 0.1);  // quadratic in L
        }
    }
    EXPECT_GT(pure_idle, 1e4 * idle_free_max);
}
