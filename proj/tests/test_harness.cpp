#include <cmath>
#include <sstream>

#include "doctest.h"

#include "gfra/analytics.hpp"
#include "gfra/harness.hpp"

using namespace gfra;

namespace {

SystemConfig small_phy(int K, int U, int W) {
    SystemConfig c;
    c.num_preambles = 20;
    c.spreading_factor = 11;
    c.lambda.reset();
    c.fixed_active = K;
    c.forced_singletons = U;
    c.forced_collisions = W;
    c.mode = SimulationMode::Phy;
    c.ebn0_db = 12.0;
    c.trials = 60;
    return c;
}

}  // namespace

TEST_CASE("CountMoments") {
    CountMoments m;
    for (std::uint64_t v : {1, 2, 3, 4}) m.add(v);
    const auto e = m.estimate(2.0);
    CHECK(e.mean == doctest::Approx(5.0));
    CHECK(e.std_error == doctest::Approx(2.0 * std::sqrt((5.0 / 3.0) / 4.0)));
    CountMoments a, b;
    a.add(1), a.add(2), b.add(3), b.add(4);
    a.merge(b);
    CHECK(a.sum == m.sum);
    CHECK(a.sum_sq == m.sum_sq);
    CHECK(CountMoments{}.estimate().mean == 0.0);
}

TEST_CASE("abstract slots are pure functions of the index") {
    SystemConfig c;
    for (std::uint64_t i : {0ULL, 1ULL, 999ULL, 123456789ULL}) {
        const auto a = simulate_abstract_slot(c, i);
        const auto b = simulate_abstract_slot(c, i);
        CHECK(a.active == b.active);
        CHECK(a.singletons == b.singletons);
        CHECK(a.success_cd == b.success_cd);
    }
}

TEST_CASE("abstract results do not depend on the worker count") {
    SystemConfig c;
    c.trials = 5000;
    c.workers = 1;
    const auto one = run_abstract(c);
    c.workers = 3;
    const auto three = run_abstract(c);
    CHECK(one.throughput_td.mean == three.throughput_td.mean);
    CHECK(one.throughput_cd.mean == three.throughput_cd.mean);
    CHECK(one.throughput_cd.std_error == three.throughput_cd.std_error);
    CHECK(one.efficiency_cd.mean == three.efficiency_cd.mean);
    CHECK(one.overload_fraction == three.overload_fraction);
}

TEST_CASE("different seeds give different streams") {
    SystemConfig c;
    c.trials = 2000;
    const auto a = run_abstract(c);
    c.seed = 2;
    const auto b = run_abstract(c);
    CHECK(a.throughput_td.mean != b.throughput_td.mean);
}

TEST_CASE("N = L makes both approaches identical slot by slot") {
    SystemConfig c;
    c.num_preambles = 12;
    c.spreading_factor = 12;
    c.lambda = 15.0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const auto t = simulate_abstract_slot(c, i);
        REQUIRE(t.success_cd == t.success_td);
    }
    c.trials = 4000;
    const auto r = run_abstract(c);
    CHECK(r.throughput_cd.mean == r.throughput_td.mean);
    CHECK(r.efficiency_cd.mean == doctest::Approx(r.efficiency_td.mean).epsilon(1e-14));
    CHECK(r.overload_fraction == 0.0);
}

TEST_CASE("abstract slot tallies respect the invariants") {
    SystemConfig c;
    c.lambda = 30.0;
    c.spreading_factor = 7;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const auto t = simulate_abstract_slot(c, i);
        CHECK(t.distinct == t.singletons + t.collided_preambles);
        CHECK(t.singletons + 2 * t.collided_preambles <= t.active);
        CHECK(t.success_cd <= t.success_td);
        CHECK(t.success_td == t.singletons);
        CHECK((t.success_cd == 0 || t.distinct <= 7));
    }
}

TEST_CASE("abstract Monte Carlo agrees with the TDMA closed form") {
    SystemConfig c;
    c.trials = 200000;
    const auto r = run_abstract(c);
    CHECK(std::abs(r.throughput_td.mean - kappa_td(10.0, 20)) < 4.0 * r.throughput_td.std_error);
    CHECK(std::abs(r.active.mean - 10.0) < 4.0 * r.active.std_error);
    CHECK(r.efficiency_td.mean == doctest::Approx(r.throughput_td.mean * 200.0 / 4020.0));
}

TEST_CASE("fixed K abstract runs use the conditional throughput") {
    SystemConfig c;
    c.lambda.reset();
    c.fixed_active = 10;
    c.trials = 100000;
    const auto r = run_abstract(c);
    CHECK(r.active.mean == 10.0);
    CHECK(std::abs(r.throughput_td.mean - kappa_td_cond(10, 20)) < 4.0 * r.throughput_td.std_error);
}

TEST_CASE("zero intensity gives zero throughput") {
    SystemConfig c;
    c.lambda = 0.0;
    c.trials = 1000;
    const auto r = run_abstract(c);
    CHECK(r.throughput_td.mean == 0.0);
    CHECK(r.throughput_cd.mean == 0.0);
    CHECK(r.efficiency_cd.mean == 0.0);
}

TEST_CASE("invalid configurations are rejected") {
    SystemConfig c;
    c.trials = 0;
    CHECK_THROWS_AS(run_abstract(c), std::invalid_argument);
    c.trials = 10;
    c.spreading_factor = 21;
    CHECK_THROWS_AS(run_abstract(c), std::invalid_argument);
    auto p = small_phy(10, 6, 2);
    p.spreading_factor = 10;
    CHECK_THROWS(run_phy(p));
}

TEST_CASE("PHY runs are deterministic across worker counts") {
    auto c = small_phy(10, 6, 2);
    c.trials = 40;
    c.workers = 1;
    const auto a = run_phy(c);
    c.workers = 2;
    const auto b = run_phy(c);
    CHECK(a.clean.bit_errors == b.clean.bit_errors);
    CHECK(a.collided.bit_errors == b.collided.bit_errors);
    CHECK(a.clean.packet_errors == b.clean.packet_errors);
}

TEST_CASE("PHY tallies follow the forced composition") {
    const auto c = small_phy(10, 6, 2);
    const auto r = run_phy(c);
    CHECK(r.slots == c.trials);
    CHECK(r.clean.packets == 6 * c.trials);
    CHECK(r.collided.packets == 4 * c.trials);
    CHECK(r.clean.bits == 6 * c.trials * 255);
    CHECK(r.overload_slots == 0);
    CHECK(r.collided.per().mean > 0.9);
}

TEST_CASE("a lone device at high SNR decodes without errors") {
    auto c = small_phy(1, 1, 0);
    c.ebn0_db = 30.0;
    c.trials = 200;
    for (Detector d : {Detector::Mmse, Detector::MmseLr}) {
        c.detector = d;
        const auto r = run_phy(c);
        CHECK(r.clean.bit_errors == 0);
        CHECK(r.clean.packet_errors == 0);
        CHECK(r.collided.packets == 0);
    }
}

TEST_CASE("overloaded slots lose every packet") {
    auto c = small_phy(14, 12, 1);
    const auto r = run_phy(c);
    CHECK(r.overload_slots == r.slots);
    CHECK(r.clean.packet_errors == r.clean.packets);
    CHECK(r.clean.bits == 0);
}

TEST_CASE("Poisson PHY runs and detected-preamble mode") {
    SystemConfig c;
    c.spreading_factor = 11;
    c.lambda = 8.0;
    c.mode = SimulationMode::Phy;
    c.ebn0_db = 15.0;
    c.snr_db = 15.0;
    c.trials = 100;
    const auto ideal = run_phy(c);
    CHECK(ideal.missed_preambles == 0);
    CHECK(ideal.false_alarms == 0);
    const auto real = run_phy(c, PhyOptions{false, 3.0});
    CHECK(real.slots == 100);
    CHECK(real.clean.packets + real.collided.packets == ideal.clean.packets + ideal.collided.packets);
    // At 15 dB with tau = 3 N0 misses are rare and false alarms occur at rate e^-3 per idle preamble.
    CHECK(real.missed_preambles < 10);
    CHECK(real.false_alarms > 0);
}

TEST_CASE("CSV writer layout") {
    CurveSet cs;
    cs.scenario = "s";
    cs.name = "n";
    cs.x_name = "x";
    cs.x = {1.0, 2.5};
    cs.series.push_back({"a", {0.1, std::nan("")}, Provenance::MonteCarlo, "stderr_a", {0.01, 0.0}});
    cs.series.push_back({"b", {1e-12, 3.0}, Provenance::Analytic, "", {}});
    std::ostringstream out;
    write_csv(out, cs);
    CHECK(out.str() == "x,a,b,stderr_a\n1,0.1,1e-12,0.01\n2.5,nan,3,0\n");

    cs.series[1].values.pop_back();
    CHECK_THROWS_AS(cs.check(), std::logic_error);
    cs.series[1].values.push_back(3.0);
    cs.series[0].stderrs[0] = -1.0;
    CHECK_THROWS_AS(cs.check(), std::logic_error);
}

TEST_CASE("every preset has a valid base configuration") {
    for (const auto& id : scenario_ids()) {
        CAPTURE(id);
        CHECK_NOTHROW(validate(scenario_config(id)));
    }
    CHECK_THROWS_AS(scenario_config("fig99"), std::invalid_argument);
    CHECK_THROWS_AS(run_scenario("fig99"), std::invalid_argument);
}

TEST_CASE("abstract sweeps emit throughput, efficiency and analytic sets") {
    SystemConfig c;
    c.trials = 2000;
    const auto sets = abstract_sweep("t", c, "N", {5, 10, 20},
                                     [](SystemConfig& s, double x) { s.spreading_factor = static_cast<int>(x); });
    REQUIRE(sets.size() == 3);
    CHECK(sets[0].name == "t_throughput");
    CHECK(sets[1].name == "t_efficiency");
    CHECK(sets[2].name == "t_analytic");
    for (const auto& s : sets) CHECK_NOTHROW(s.check());
    const auto& analytic = sets[2];
    CHECK(analytic.series[0].name == "kappa_td");
    CHECK(analytic.series[1].values[1] == doctest::Approx(kappa_cd(10.0, 20, 10)));
}

TEST_CASE("detection curve set has the documented columns") {
    SystemConfig c;
    c.trials = 500;
    const auto cs = detection_curve_set("d", "d_nc", c, {2.0}, false);
    std::ostringstream out;
    write_csv(out, cs);
    CHECK(out.str().rfind("tau,p_md_analytic,p_fa_analytic,p_md_mc,p_fa_mc,stderr_md,stderr_fa\n", 0) == 0);
}

TEST_CASE("version string") {
    CHECK(version_string().rfind("gfra ", 0) == 0);
}
