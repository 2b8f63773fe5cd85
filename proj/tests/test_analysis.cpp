#include <gtest/gtest.h>

#include "support.hpp"

using namespace fwtest;

TEST(Predictors, TableValues) {
    EXPECT_NEAR(predict_tau(6.6, 3320.0), 5.99e-7, 0.005e-7);
    EXPECT_NEAR(predict_tau(7.4, 3090.0), 7.75e-7, 0.005e-7);
    EXPECT_EQ(predict_tau(0.0, 1234.0), 0.0);
    EXPECT_NEAR(predict_width(6.6, 3320.0), 1.99e-3, 0.005e-3);
    EXPECT_NEAR(predict_width(7.4, 3090.0), 2.39e-3, 0.005e-3);
    EXPECT_NEAR(predict_width(13.2, 3320.0), 3.98e-3, 0.005e-3);
}

TEST(Predictors, NonpositiveSpeed) {
    EXPECT_EQ(error_kind([] { predict_tau(6.6, 0.0); }), "NonpositiveSpeed");
    EXPECT_EQ(error_kind([] { predict_width(6.6, -1.0); }), "NonpositiveSpeed");
    EXPECT_EQ(error_kind([] { table_report({{"broken", 0.0, 6.6, 1e-6, 1e-3}}); }), "NonpositiveSpeed");
}

TEST(Predictors, LateralSpeedRatio) {
    EXPECT_DOUBLE_EQ(lateral_speed_ratio(1500.0, 3000.0), 0.5);
    EXPECT_TRUE(std::isnan(lateral_speed_ratio(1500.0, 0.0)));
}

TEST(Tables, PresetRows) {
    const TableReport rep = table_report();
    ASSERT_EQ(rep.rows.size(), 2u);
    const TableRow& k8 = rep.rows[0];
    EXPECT_EQ(k8.preset.name, "K8");
    EXPECT_NEAR(k8.tau, 0.6e-6, 0.02 * 0.6e-6);
    EXPECT_NEAR(k8.delta1, 2.0e-3, 0.02 * 2.0e-3);
    EXPECT_DOUBLE_EQ(k8.preset.exp_tau, 0.75e-6);
    EXPECT_DOUBLE_EQ(k8.preset.exp_delta1, 2.49e-3);
    const TableRow& sl = rep.rows[1];
    EXPECT_NEAR(sl.tau, 7.75e-7, 0.005e-7);
    EXPECT_NEAR(sl.delta1, 2.4e-3, 0.02 * 2.4e-3);
    EXPECT_NE(rep.text().find("K8"), std::string::npos);
    EXPECT_NE(rep.csv().find("soda-lime"), std::string::npos);
}

TEST(LineFit, ExactLine) {
    const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
    EXPECT_DOUBLE_EQ(f.slope, 2.0);
    EXPECT_DOUBLE_EQ(f.intercept, 1.0);
    EXPECT_DOUBLE_EQ(f.r2, 1.0);
}

TEST(TrackFront, ManufacturedHeaviside) {
    const Grid g = Grid::line(400, 0.05);
    std::vector<double> t;
    std::vector<Field> gam;
    for (int k = 0; k < 20; ++k) {
        const double tk = 0.5 + 0.4 * k;
        Field f(g.size());
        for (int i = 0; i < g.nx; ++i) f[i] = g.x(i) < 2.0 * tk ? 1.0 : 0.0;
        t.push_back(tk);
        gam.push_back(f);
    }
    const FrontTrack tr = track_front(t, gam, g);
    EXPECT_NEAR(tr.v_f, 2.0, g.dx / 0.4);
    EXPECT_GT(tr.fit_r2, 0.99);
}

TEST(TrackFront, QuiescentRunHasNoFront) {
    ScenarioConfig cfg = line(16);
    cfg.output.snapshot_every = 1;
    const RunResult r = run(cfg);
    EXPECT_EQ(error_kind([&] { track_front(r.snapshots, cfg.grid); }), "NoFrontDetected");
    EXPECT_EQ(error_kind([&] { wave_metrics(r, cfg); }), "NoFrontDetected");
}

TEST(TrackFront, PulledKppSpeed) {
    const ScenarioConfig cfg = kpp_front_scenario();
    const RunResult r = run(cfg);
    const WaveMetrics m = wave_metrics(r, cfg);
    EXPECT_NEAR(m.v_f, 2.0, 0.2);
    EXPECT_GT(m.fit_r2, 0.999);
    EXPECT_NEAR(m.delta1, 1.0 / m.v_f, 1e-15);
    EXPECT_GT(m.tau, 0.0);
    EXPECT_DOUBLE_EQ(m.speed_from_tau, std::sqrt(1.0 / m.tau));
}

TEST(RiseTime, ExponentialApproach) {
    // y = 1 - exp(-t/T): t(p) = -T ln(1 - p)
    const double T = 0.7;
    std::vector<double> t, y;
    for (int k = 0; k <= 20000; ++k) {
        t.push_back(k * 1e-3);
        y.push_back(1.0 - std::exp(-t.back() / T));
    }
    const RiseTime r = measure_rise_time(t, y);
    EXPECT_NEAR(r.plateau, 1.0, 1e-9);
    EXPECT_NEAR(r.tau, T * std::log(9.0), 1e-6);
    EXPECT_NEAR(r.tau_full, T * std::log(99.0), 1e-6);
}

TEST(RiseTime, StepTrace) {
    std::vector<double> t, y;
    for (int k = 0; k < 100; ++k) {
        t.push_back(0.1 * k);
        y.push_back(k < 40 ? 0.0 : 2.0);
    }
    const RiseTime r = measure_rise_time(t, y);
    EXPECT_LE(r.tau, 0.1 + 1e-15);
    EXPECT_GE(r.tau, 0.0);
}

TEST(RiseTime, NoPlateau) {
    std::vector<double> t, y;
    for (int k = 0; k < 100; ++k) {
        t.push_back(k);
        y.push_back(k);
    }
    EXPECT_EQ(error_kind([&] { measure_rise_time(t, y); }), "NoPlateau");
    EXPECT_EQ(error_kind([&] { measure_rise_time(std::vector<double>{0, 1}, std::vector<double>{0, 0}); }),
              "NoPlateau");
}

TEST(RiseTime, GaugeProxy) {
    GaugeTrace g;
    // long enough that the plateau equals 1 to well below the tolerance
    for (int k = 0; k <= 3000; ++k) {
        g.t.push_back(0.01 * k);
        g.proxy.push_back(1.0 - std::exp(-g.t.back()));
    }
    EXPECT_NEAR(measure_rise_time(g).tau, std::log(9.0), 1e-4);
    EXPECT_NEAR(arrival_time(g, 0.5), std::log(2.0), 1e-4);
}

TEST(CliftonStudy, EmptyLambdas) {
    const LimitStudy s = clifton_limit_study(clifton_pulse_scenario(64), {});
    EXPECT_TRUE(s.rows.empty());
    EXPECT_TRUE(std::isnan(s.slope));
}

TEST(CliftonStudy, DissipationScalesWithLambda) {
    ScenarioConfig base = clifton_pulse_scenario(128);
    base.t_end = 1.0;
    const LimitStudy s = clifton_limit_study(base, {1e-2, 1e-3, 1e-4, 0.0});
    ASSERT_EQ(s.rows.size(), 4u);
    EXPECT_NEAR(s.slope, 1.0, 0.1);
    for (std::size_t k = 1; k < 3; ++k) EXPECT_LT(s.rows[k].dissipated, s.rows[k - 1].dissipated);
    const LimitRow& zero = s.rows[3];
    EXPECT_EQ(zero.dissipated, 0.0);
    EXPECT_EQ(zero.entropy, 0.0);
    EXPECT_EQ(zero.entropy_rate, 0.0);
    EXPECT_LT(zero.energy_drift, 1e-6);
    EXPECT_GT(zero.sharpness, 0.0);
}
