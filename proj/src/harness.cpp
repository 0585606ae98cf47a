#include "gfra/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "gfra/analytics.hpp"
#include "gfra/cdma_phy.hpp"
#include "gfra/parallel.hpp"
#include "gfra/preamble_detection.hpp"
#include "gfra/sequences.hpp"

#ifndef GFRA_VERSION
#define GFRA_VERSION "0.1.0"
#endif

namespace gfra {

namespace {

Estimate binomial(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

int draw_active(const SystemConfig& config, RandomSource& rng) {
    return config.fixed_active ? *config.fixed_active : draw_num_active(*config.lambda, rng);
}

}  // namespace

Estimate CountMoments::estimate(double factor) const {
    if (n == 0) return {};
    const double dn = static_cast<double>(n);
    const double mean = static_cast<double>(sum) / dn;
    double var = 0.0;
    if (n > 1) {
        var = (static_cast<double>(sum_sq) - dn * mean * mean) / (dn - 1.0);
        var = std::max(var, 0.0);
    }
    return {factor * mean, factor * std::sqrt(var / dn)};
}

Estimate ErrorTally::ber() const { return binomial(bit_errors, bits); }
Estimate ErrorTally::per() const { return binomial(packet_errors, packets); }

// ---------------------------------------------------------------------------

SlotTally simulate_abstract_slot(const SystemConfig& config, std::uint64_t index) {
    auto rng = trial_rng(config.seed, Stream::Abstract, index);
    const int K = draw_active(config, rng);
    const auto assignment = assign_preambles(K, config.num_preambles, rng);
    const auto outcome = collision_stats(assignment, config.num_preambles);
    check_invariants(outcome);

    SlotTally t;
    t.active = K;
    t.singletons = outcome.singletons;
    t.collided_preambles = outcome.collided_preambles;
    t.distinct = outcome.distinct();
    t.success_td = outcome.singletons;
    t.success_cd = t.distinct <= config.spreading_factor ? outcome.singletons : 0;
    if (t.success_cd > t.singletons || t.success_td > t.singletons) {
        throw InvariantViolation("slot invariant: successes exceed U");
    }
    return t;
}

namespace {

struct AbstractAccumulator {
    CountMoments td;
    CountMoments cd;
    CountMoments active;
    std::uint64_t overloaded = 0;

    void merge(const AbstractAccumulator& o) {
        td.merge(o.td);
        cd.merge(o.cd);
        active.merge(o.active);
        overloaded += o.overloaded;
    }
};

}  // namespace

AbstractResult run_abstract(const SystemConfig& config) {
    validate(config);
    const auto acc = parallel_trials(config.trials, config.workers, AbstractAccumulator{},
                                     [&](std::uint64_t i, AbstractAccumulator& a) {
                                         const auto t = simulate_abstract_slot(config, i);
                                         a.td.add(static_cast<std::uint64_t>(t.success_td));
                                         a.cd.add(static_cast<std::uint64_t>(t.success_cd));
                                         a.active.add(static_cast<std::uint64_t>(t.active));
                                         if (t.distinct > config.spreading_factor) ++a.overloaded;
                                     });

    const int L = config.num_preambles;
    const double D = config.block_length;
    const double T = slot_length(L, D);
    const double d_bar = cdma_block_length(L, config.spreading_factor, D);

    AbstractResult r;
    r.trials = config.trials;
    r.throughput_td = acc.td.estimate();
    r.throughput_cd = acc.cd.estimate();
    r.efficiency_td = acc.td.estimate(D / T);
    r.efficiency_cd = acc.cd.estimate(d_bar / T);
    r.active = acc.active.estimate();
    r.overload_fraction = static_cast<double>(acc.overloaded) / static_cast<double>(config.trials);
    return r;
}

// ---------------------------------------------------------------------------

namespace {

struct PhyAccumulator {
    PhyResult r;

    void merge(const PhyAccumulator& o) {
        r.slots += o.r.slots;
        r.overload_slots += o.r.overload_slots;
        r.fallback_slots += o.r.fallback_slots;
        r.missed_preambles += o.r.missed_preambles;
        r.false_alarms += o.r.false_alarms;
        r.clean.merge(o.r.clean);
        r.collided.merge(o.r.collided);
    }
};

void count_lost_packets(const SlotOutcome& outcome, PhyResult& r) {
    for (int k = 0; k < outcome.num_active; ++k) {
        ErrorTally& tally = outcome.collided[k] ? r.collided : r.clean;
        ++tally.packets;
        ++tally.packet_errors;
    }
}

}  // namespace

PhyResult run_phy(const SystemConfig& config, const PhyOptions& options) {
    validate(config);
    const int L = config.num_preambles;
    const int N = config.spreading_factor;
    const auto family = gen_alltop_family(N);
    const auto preambles = gen_preambles(L);
    const double rx_power = 1.0;
    const double noise = noise_level_from_ebn0_db(config.ebn0_db, rx_power);
    const double preamble_noise = rx_power / std::pow(10.0, config.snr_db / 10.0);
    const PacketCodeModel code;
    const bool forced = config.forced_singletons >= 0;

    const auto acc = parallel_trials(config.trials, config.workers, PhyAccumulator{}, [&](std::uint64_t i,
                                                                                          PhyAccumulator& a) {
        auto rng = trial_rng(config.seed, Stream::Phy, i);
        const int K = draw_active(config, rng);
        const auto assignment =
            forced ? assign_with_composition(K, L, config.forced_singletons, config.forced_collisions, rng)
                   : assign_preambles(K, L, rng);
        auto outcome = collision_stats(assignment, L);
        check_invariants(outcome);
        ++a.r.slots;

        const auto spreading = select_spreading(family, L, rng);
        const auto phases = draw_phases(K, config.phase_compensation, rng);
        const auto frames = random_frames(K, 2 * kPacketSymbols, rng);
        const CMatrix received = build_received(outcome, frames, spreading, phases, rx_power, noise, rng);

        // The BS view: which preambles it decodes and the channel phase per column.
        std::vector<int> columns;
        CMatrix codebook;
        if (options.ideal_detection) {
            columns = outcome.transmitted;
            codebook = effective_codebook(outcome, spreading, phases);
        } else {
            const CVector y = preamble_received(outcome, preambles, phases, rx_power, preamble_noise, rng);
            const auto z = correlate(y, preambles, preamble_noise, rx_power);
            const auto report = detect_noncoherent(z, options.tau_over_n0 * preamble_noise, outcome.transmitted);
            a.r.missed_preambles += static_cast<std::uint64_t>(report.missed);
            a.r.false_alarms += static_cast<std::uint64_t>(report.false_alarms);
            columns = report.detected;
            codebook.resize(N, static_cast<Eigen::Index>(columns.size()));
            for (std::size_t q = 0; q < columns.size(); ++q) {
                const cplx est = z.z(columns[q] - 1);
                codebook.col(static_cast<Eigen::Index>(q)) = spreading.sequence(columns[q]) * (est / std::abs(est));
            }
        }

        const int Q = static_cast<int>(columns.size());
        if (Q > N || Q == 0) {
            if (Q > N) ++a.r.overload_slots;
            count_lost_packets(outcome, a.r);
            return;
        }

        std::vector<bool> superposed(columns.size());
        for (std::size_t q = 0; q < columns.size(); ++q) superposed[q] = outcome.occupancy[columns[q] - 1] != 1;
        const auto detection = config.detector == Detector::MmseLr
                                   ? mmse_lr_detect(received, codebook, rx_power, noise, superposed)
                                   : mmse_detect(received, codebook, rx_power, noise);
        if (detection.fell_back) ++a.r.fallback_slots;

        int successes = 0;
        for (int k = 0; k < K; ++k) {
            ErrorTally& tally = outcome.collided[k] ? a.r.collided : a.r.clean;
            ++tally.packets;
            const auto it = std::lower_bound(columns.begin(), columns.end(), outcome.assignment[k]);
            if (it == columns.end() || *it != outcome.assignment[k]) {
                ++tally.packet_errors;  // preamble missed: nothing to decode
                continue;
            }
            const auto q = static_cast<Eigen::Index>(it - columns.begin());
            const Bits decided = qpsk_demodulate(detection.hard.row(q).transpose());
            int errors = 0;
            for (int b = 0; b < code.length; ++b) errors += decided[b] != frames.bits[k][b];
            tally.bits += static_cast<std::uint64_t>(code.length);
            tally.bit_errors += static_cast<std::uint64_t>(errors);
            const bool ok = packet_success(errors, code);
            if (!ok) ++tally.packet_errors;
            outcome.decodable[k] = ok && !outcome.collided[k];
            successes += outcome.decodable[k] ? 1 : 0;
        }
        if (successes > outcome.singletons) throw InvariantViolation("slot invariant: successes exceed U");
    });
    return acc.r;
}

// ---------------------------------------------------------------------------

namespace {

struct DetectionAccumulator {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> missed;
    std::vector<std::uint64_t> false_alarms;

    void merge(const DetectionAccumulator& o) {
        trials += o.trials;
        for (std::size_t i = 0; i < missed.size(); ++i) {
            missed[i] += o.missed[i];
            false_alarms[i] += o.false_alarms[i];
        }
    }
};

}  // namespace

std::vector<DetectionCurvePoint> simulate_detection_curves(double snr_db, const std::vector<double>& taus,
                                                           std::uint64_t trials, std::uint64_t seed,
                                                           bool coherent, unsigned workers) {
    if (taus.empty()) throw std::invalid_argument("detection curves: empty threshold grid");
    for (double t : taus) {
        if (!(t > 0.0)) throw std::invalid_argument("detection curves: thresholds must be positive");
    }
    if (trials == 0) throw std::invalid_argument("detection curves: trials must be positive");

    const double rx_power = 1.0;
    const double snr = std::pow(10.0, snr_db / 10.0);
    const double noise = rx_power / snr;
    const auto preambles = gen_preambles(2);
    const std::vector<int> truth{1};
    const auto outcome = collision_stats(truth, 2);

    DetectionAccumulator proto;
    proto.missed.assign(taus.size(), 0);
    proto.false_alarms.assign(taus.size(), 0);
    const auto acc = parallel_trials(trials, workers, proto, [&](std::uint64_t i, DetectionAccumulator& a) {
        auto rng = trial_rng(seed, Stream::Detection, i);
        const auto phases = draw_phases(1, coherent, rng);
        const CVector y = preamble_received(outcome, preambles, phases, rx_power, noise, rng);
        const auto z = correlate(y, preambles, noise, rx_power);
        ++a.trials;
        for (std::size_t j = 0; j < taus.size(); ++j) {
            const double tau = taus[j] * noise;
            const auto report = coherent ? detect_coherent(z, tau, truth) : detect_noncoherent(z, tau, truth);
            a.missed[j] += static_cast<std::uint64_t>(report.missed);
            a.false_alarms[j] += static_cast<std::uint64_t>(report.false_alarms);
        }
    });

    std::vector<DetectionCurvePoint> points;
    points.reserve(taus.size());
    for (std::size_t j = 0; j < taus.size(); ++j) {
        DetectionCurvePoint p;
        p.tau_over_n0 = taus[j];
        const auto analytic = coherent ? analytic_coherent_md_fa(snr, taus[j] * noise / std::sqrt(rx_power))
                                       : analytic_noncoherent_md_fa(snr, taus[j]);
        p.md_analytic = analytic.missed_detection;
        p.fa_analytic = analytic.false_alarm;
        p.md_mc = binomial(acc.missed[j], acc.trials);
        p.fa_mc = binomial(acc.false_alarms[j], acc.trials);
        points.push_back(p);
    }
    return points;
}

// ---------------------------------------------------------------------------

void CurveSet::check() const {
    for (const auto& s : series) {
        if (s.values.size() != x.size()) throw std::logic_error("curve set: series '" + s.name + "' has wrong length");
        if (!s.stderr_name.empty()) {
            if (s.stderrs.size() != x.size()) {
                throw std::logic_error("curve set: stderr of '" + s.name + "' has wrong length");
            }
            for (double e : s.stderrs) {
                if (e < 0.0) throw std::logic_error("curve set: negative stderr in '" + s.name + "'");
            }
        }
    }
}

namespace {

void put_number(std::ostream& out, double v) {
    if (std::isnan(v)) {
        out << "nan";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out << buf;
}

}  // namespace

void write_csv(std::ostream& out, const CurveSet& curves) {
    curves.check();
    out << curves.x_name;
    for (const auto& s : curves.series) out << ',' << s.name;
    for (const auto& s : curves.series) {
        if (!s.stderr_name.empty()) out << ',' << s.stderr_name;
    }
    out << '\n';
    for (std::size_t i = 0; i < curves.x.size(); ++i) {
        put_number(out, curves.x[i]);
        for (const auto& s : curves.series) {
            out << ',';
            put_number(out, s.values[i]);
        }
        for (const auto& s : curves.series) {
            if (s.stderr_name.empty()) continue;
            out << ',';
            put_number(out, s.stderrs[i]);
        }
        out << '\n';
    }
}

std::string version_string() { return std::string("gfra ") + GFRA_VERSION; }

}  // namespace gfra
