#include <cmath>
#include <stdexcept>

#include "gfra/analytics.hpp"
#include "gfra/harness.hpp"

namespace gfra {

namespace {

std::vector<double> range(double first, double last, double step) {
    std::vector<double> out;
    for (double v = first; v <= last + 1e-9; v += step) out.push_back(v);
    return out;
}

Series mc_series(std::string name, std::string stderr_name) {
    Series s;
    s.name = std::move(name);
    s.stderr_name = std::move(stderr_name);
    return s;
}

Series analytic_series(std::string name) {
    Series s;
    s.name = std::move(name);
    s.provenance = Provenance::Analytic;
    return s;
}

}  // namespace

std::vector<CurveSet> abstract_sweep(const std::string& preset, const SystemConfig& base, const std::string& x_name,
                                     const std::vector<double>& xs, const SweepSetter& set) {
    CurveSet thr{preset, preset + "_throughput", x_name, xs, {}};
    CurveSet eff{preset, preset + "_efficiency", x_name, xs, {}};
    CurveSet ana{preset, preset + "_analytic", x_name, xs, {}};

    Series k_td_a = analytic_series("kappa_td_analytic"), k_cd_a = analytic_series("kappa_cd_analytic");
    Series k_td = mc_series("kappa_td_mc", "stderr_kappa_td"), k_cd = mc_series("kappa_cd_mc", "stderr_kappa_cd");
    Series e_td_a = analytic_series("eta_td_analytic"), e_cd_a = analytic_series("eta_cd_analytic");
    Series e_td = mc_series("eta_td_mc", "stderr_eta_td"), e_cd = mc_series("eta_cd_mc", "stderr_eta_cd");
    Series phi_a = analytic_series("phi_analytic"), phi_mc = mc_series("phi_mc", "");
    Series a_ktd = analytic_series("kappa_td"), a_kcd = analytic_series("kappa_cd");
    Series a_etd = analytic_series("eta_td"), a_ecd = analytic_series("eta_cd"), a_phi = analytic_series("phi");

    for (double x : xs) {
        SystemConfig c = base;
        set(c, x);
        validate(c);
        const int L = c.num_preambles;
        const int N = c.spreading_factor;
        const double D = c.block_length;
        const auto mc = run_abstract(c);

        double ktd = 0.0;
        double kcd = 0.0;
        if (c.lambda) {
            ktd = kappa_td(*c.lambda, L);
            kcd = kappa_cd(*c.lambda, L, N, c.rounding);
        } else {
            // Fixed K: conditional throughput with the binomial overload approximation.
            const int K = *c.fixed_active;
            ktd = kappa_td_cond(K, L);
            kcd = ktd * (1.0 - overload_probability(K, L, N));
        }
        const double T = slot_length(L, D);
        const double etd = D * ktd / T;
        const double ecd = cdma_block_length(L, N, D) * kcd / T;
        const double phi = etd > 0.0 ? ecd / etd
                                     : (c.lambda ? gain_ratio(*c.lambda, L, N, c.rounding) : std::nan(""));

        k_td_a.values.push_back(ktd);
        k_cd_a.values.push_back(kcd);
        k_td.values.push_back(mc.throughput_td.mean);
        k_td.stderrs.push_back(mc.throughput_td.std_error);
        k_cd.values.push_back(mc.throughput_cd.mean);
        k_cd.stderrs.push_back(mc.throughput_cd.std_error);

        e_td_a.values.push_back(etd);
        e_cd_a.values.push_back(ecd);
        e_td.values.push_back(mc.efficiency_td.mean);
        e_td.stderrs.push_back(mc.efficiency_td.std_error);
        e_cd.values.push_back(mc.efficiency_cd.mean);
        e_cd.stderrs.push_back(mc.efficiency_cd.std_error);
        phi_a.values.push_back(phi);
        phi_mc.values.push_back(mc.efficiency_td.mean > 0.0 ? mc.efficiency_cd.mean / mc.efficiency_td.mean
                                                            : std::nan(""));

        a_ktd.values.push_back(ktd);
        a_kcd.values.push_back(kcd);
        a_etd.values.push_back(etd);
        a_ecd.values.push_back(ecd);
        a_phi.values.push_back(phi);
    }
    thr.series = {k_td_a, k_cd_a, k_td, k_cd};
    eff.series = {e_td_a, e_cd_a, e_td, e_cd, phi_a, phi_mc};
    ana.series = {a_ktd, a_kcd, a_etd, a_ecd, a_phi};
    return {thr, eff, ana};
}

CurveSet phy_sweep(const std::string& preset, const std::string& name, const SystemConfig& base,
                   const std::string& x_name, const std::vector<double>& xs, const SweepSetter& set) {
    CurveSet out{preset, name, x_name, xs, {}};
    Series ber_clean = mc_series("ber_uncoded_clean", "stderr_ber_clean");
    Series ber_coll = mc_series("ber_uncoded_collided", "stderr_ber_collided");
    Series per_clean = mc_series("per_clean", "stderr_per_clean");
    Series per_coll = mc_series("per_collided", "stderr_per_collided");
    Series trials = mc_series("trials", "");
    for (double x : xs) {
        SystemConfig c = base;
        set(c, x);
        const auto r = run_phy(c);
        const auto push = [](Series& s, const Estimate& e) {
            s.values.push_back(e.mean);
            s.stderrs.push_back(std::isnan(e.std_error) ? 0.0 : e.std_error);
        };
        push(ber_clean, r.clean.ber());
        push(ber_coll, r.collided.ber());
        push(per_clean, r.clean.per());
        push(per_coll, r.collided.per());
        trials.values.push_back(static_cast<double>(r.slots));
    }
    out.series = {ber_clean, ber_coll, per_clean, per_coll, trials};
    return out;
}

CurveSet detection_curve_set(const std::string& preset, const std::string& name, const SystemConfig& c,
                             const std::vector<double>& taus, bool coherent) {
    const auto points = simulate_detection_curves(c.snr_db, taus, c.trials, c.seed, coherent, c.workers);
    CurveSet out{preset, name, "tau", taus, {}};
    Series md_a = analytic_series("p_md_analytic"), fa_a = analytic_series("p_fa_analytic");
    Series md = mc_series("p_md_mc", "stderr_md"), fa = mc_series("p_fa_mc", "stderr_fa");
    for (const auto& p : points) {
        md_a.values.push_back(p.md_analytic);
        fa_a.values.push_back(p.fa_analytic);
        md.values.push_back(p.md_mc.mean);
        md.stderrs.push_back(p.md_mc.std_error);
        fa.values.push_back(p.fa_mc.mean);
        fa.stderrs.push_back(p.fa_mc.std_error);
    }
    out.series = {md_a, fa_a, md, fa};
    return out;
}

const std::vector<std::string>& scenario_ids() {
    static const std::vector<std::string> ids{"fig3-detect",  "fig4-ber",          "fig5-ber-per",
                                              "fig6-sweepN",  "fig7-sweepN-large", "fig8-sweep-lambda",
                                              "fig9-sweepL",  "fig10-sweepD"};
    return ids;
}

SystemConfig scenario_config(const std::string& preset) {
    SystemConfig c;
    c.trials = 100000;
    c.mode = SimulationMode::Abstract;
    if (preset == "fig3-detect") {
        c.snr_db = 10.0;
    } else if (preset == "fig4-ber") {
        c = SystemConfig{};
        c.mode = SimulationMode::Phy;
        c.num_preambles = 20;
        c.spreading_factor = 11;
        c.lambda.reset();
        c.fixed_active = 10;
        c.trials = 10000;
    } else if (preset == "fig5-ber-per") {
        c.mode = SimulationMode::Phy;
        c.num_preambles = 20;
        c.spreading_factor = 11;
        c.lambda.reset();
        c.fixed_active = 10;
        c.forced_singletons = 8;
        c.forced_collisions = 1;
        c.ebn0_db = 20.0;
        c.trials = 10000;
    } else if (preset == "fig6-sweepN") {
        c.num_preambles = 20;
        c.spreading_factor = 20;
        c.lambda = 10.0;
        c.block_length = 200;
    } else if (preset == "fig7-sweepN-large") {
        c.num_preambles = 100;
        c.spreading_factor = 100;
        c.lambda = 50.0;
        c.block_length = 2000;
    } else if (preset == "fig8-sweep-lambda") {
        c.num_preambles = 20;
        c.spreading_factor = 10;
        c.lambda = 10.0;
        c.block_length = 200;
    } else if (preset == "fig9-sweepL") {
        c.num_preambles = 20;
        c.spreading_factor = 20;
        c.lambda = 15.0;
        c.block_length = 200;
    } else if (preset == "fig10-sweepD") {
        c.num_preambles = 20;
        c.spreading_factor = 10;
        c.lambda = 10.0;
        c.block_length = 200;
    } else {
        throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    return c;
}

ScenarioResult run_scenario(const std::string& preset, const ConfigOverride& override) {
    SystemConfig base = scenario_config(preset);
    if (override) override(base);

    ScenarioResult result{preset, base, {}};
    auto& curves = result.curves;
    if (preset == "fig3-detect") {
        const auto taus = range(1.0, 20.0, 1.0);
        curves.push_back(detection_curve_set(preset, preset + "_noncoherent", base, taus, false));
        curves.push_back(detection_curve_set(preset, preset + "_coherent", base, taus, true));
    } else if (preset == "fig4-ber") {
        const auto grid = range(0.0, 20.0, 2.0);
        const auto set_ebn0 = [](SystemConfig& c, double x) { c.ebn0_db = x; };
        // K = 10 with Q = 8 (two collided pairs) and Q = 9 (one pair).
        SystemConfig q8 = base;
        q8.forced_singletons = 6;
        q8.forced_collisions = 2;
        SystemConfig q9 = base;
        q9.forced_singletons = 8;
        q9.forced_collisions = 1;
        curves.push_back(phy_sweep(preset, preset + "_q8", q8, "ebn0_db", grid, set_ebn0));
        curves.push_back(phy_sweep(preset, preset + "_q9", q9, "ebn0_db", grid, set_ebn0));
    } else if (preset == "fig5-ber-per") {
        const auto set_k = [](SystemConfig& c, double x) {
            const int K = static_cast<int>(x);
            c.lambda.reset();
            c.fixed_active = K;
            c.forced_singletons = K - 2;
            c.forced_collisions = 1;
        };
        curves.push_back(phy_sweep(preset, preset, base, "K", range(3.0, 14.0, 1.0), set_k));
    } else if (preset == "fig6-sweepN") {
        curves = abstract_sweep(preset, base, "N", range(5.0, 20.0, 1.0),
                                [](SystemConfig& c, double x) { c.spreading_factor = static_cast<int>(x); });
    } else if (preset == "fig7-sweepN-large") {
        curves = abstract_sweep(preset, base, "N", range(20.0, 100.0, 5.0),
                                [](SystemConfig& c, double x) { c.spreading_factor = static_cast<int>(x); });
    } else if (preset == "fig8-sweep-lambda") {
        curves = abstract_sweep(preset, base, "lambda", range(1.0, 20.0, 1.0),
                                [](SystemConfig& c, double x) {
                                    c.lambda = x;
                                    c.fixed_active.reset();
                                });
    } else if (preset == "fig9-sweepL") {
        curves = abstract_sweep(preset, base, "L", range(20.0, 100.0, 10.0), [](SystemConfig& c, double x) {
            c.num_preambles = static_cast<int>(x);
            c.block_length = 10 * c.num_preambles;
        });
    } else if (preset == "fig10-sweepD") {
        const std::vector<double> ds{10, 20, 50, 100, 200, 500, 1000, 2000, 5000};
        curves = abstract_sweep(preset, base, "D", ds,
                                [](SystemConfig& c, double x) { c.block_length = static_cast<int>(x); });
    }
    for (const auto& c : curves) c.check();
    return result;
}

}  // namespace gfra
