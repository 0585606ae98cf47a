#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfra/access_model.hpp"
#include "gfra/system_config.hpp"

namespace gfra {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Integer tally with exact sums, so merged results are independent of order.
struct CountMoments {
    std::uint64_t n = 0;
    std::uint64_t sum = 0;
    std::uint64_t sum_sq = 0;

    void add(std::uint64_t v) noexcept {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const CountMoments& o) noexcept {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    /// Sample mean and the standard error of the mean, scaled by `factor`.
    Estimate estimate(double factor = 1.0) const;
};

// ---------------------------------------------------------------------------
// Abstract (system-level) engine

/// One slot as seen by the throughput analysis.
struct SlotTally {
    int active = 0;
    int singletons = 0;
    int collided_preambles = 0;
    int distinct = 0;
    int success_td = 0;  // U
    int success_cd = 0;  // U if Q <= N, else 0
};

/// Slot `index` of the abstract engine; a pure function of (config, index).
SlotTally simulate_abstract_slot(const SystemConfig& config, std::uint64_t index);

struct AbstractResult {
    std::uint64_t trials = 0;
    Estimate throughput_td;
    Estimate throughput_cd;
    Estimate efficiency_td;
    Estimate efficiency_cd;
    Estimate active;
    double overload_fraction = 0.0;  // fraction of slots with Q > N
};

/// Throws std::invalid_argument for an invalid config (including trials = 0)
/// and InvariantViolation if a slot breaks Q = U + W, U + 2W <= K or success <= U.
AbstractResult run_abstract(const SystemConfig& config);

// ---------------------------------------------------------------------------
// PHY-level engine

/// Bits per device per slot: one 255-bit codeword carried by 128 QPSK symbols.
inline constexpr int kPacketSymbols = 128;

struct ErrorTally {
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t packets = 0;
    std::uint64_t packet_errors = 0;

    void merge(const ErrorTally& o) noexcept {
        bits += o.bits;
        bit_errors += o.bit_errors;
        packets += o.packets;
        packet_errors += o.packet_errors;
    }
    Estimate ber() const;
    Estimate per() const;
};

struct PhyResult {
    std::uint64_t slots = 0;
    std::uint64_t overload_slots = 0;
    std::uint64_t fallback_slots = 0;
    std::uint64_t missed_preambles = 0;
    std::uint64_t false_alarms = 0;
    ErrorTally clean;
    ErrorTally collided;
};

struct PhyOptions {
    /// When false, the BS runs the noncoherent correlator test with threshold
    /// `tau_over_n0` (at config.snr_db) instead of knowing A exactly.
    bool ideal_detection = true;
    double tau_over_n0 = 3.0;
};

/// Full data-phase pipeline per slot. Slots with Q > N count every packet as
/// lost without running the detector.
PhyResult run_phy(const SystemConfig& config, const PhyOptions& options = {});

// ---------------------------------------------------------------------------
// Preamble-detection curves

struct DetectionCurvePoint {
    double tau_over_n0 = 0.0;
    double md_analytic = 0.0;
    double fa_analytic = 0.0;
    Estimate md_mc;
    Estimate fa_mc;
};

/// Monte Carlo and closed-form MD/FA for one transmitted and one idle
/// preamble per trial. In coherent mode the threshold on Re(z) is
/// tau_over_n0 * N0 and devices pre-compensate their phase.
std::vector<DetectionCurvePoint> simulate_detection_curves(double snr_db, const std::vector<double>& taus,
                                                           std::uint64_t trials, std::uint64_t seed,
                                                           bool coherent, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Curves and scenarios

enum class Provenance { Analytic, MonteCarlo };

struct Series {
    std::string name;
    std::vector<double> values;
    Provenance provenance = Provenance::MonteCarlo;
    std::string stderr_name;      // empty when there is no error column
    std::vector<double> stderrs;
};

/// One CSV file: an x column, every series' values, then the stderr columns.
struct CurveSet {
    std::string scenario;
    std::string name;  // file stem
    std::string x_name;
    std::vector<double> x;
    std::vector<Series> series;

    /// Throws std::logic_error when series lengths disagree with x or a stderr is negative.
    void check() const;
};

void write_csv(std::ostream& out, const CurveSet& curves);

using SweepSetter = std::function<void(SystemConfig&, double)>;

/// Abstract-engine sweep: `<scenario>_throughput`, `<scenario>_efficiency`
/// (MC next to analytic) and `<scenario>_analytic` curve sets. With a fixed K
/// the analytic columns use the conditional forms.
std::vector<CurveSet> abstract_sweep(const std::string& scenario, const SystemConfig& base,
                                     const std::string& x_name, const std::vector<double>& xs,
                                     const SweepSetter& set);

/// PHY-engine sweep producing the BER/PER schema.
CurveSet phy_sweep(const std::string& scenario, const std::string& name, const SystemConfig& base,
                   const std::string& x_name, const std::vector<double>& xs, const SweepSetter& set);

/// MD/FA curves over thresholds given in units of N0, at config.snr_db.
CurveSet detection_curve_set(const std::string& scenario, const std::string& name, const SystemConfig& config,
                             const std::vector<double>& taus, bool coherent);

const std::vector<std::string>& scenario_ids();

struct ScenarioResult {
    std::string preset;
    SystemConfig config;  // base configuration after overrides
    std::vector<CurveSet> curves;
};

using ConfigOverride = std::function<void(SystemConfig&)>;

/// Runs a figure preset. `override` is applied to the preset's base config
/// before the sweep assigns the swept parameter. Throws std::invalid_argument
/// for an unknown preset.
ScenarioResult run_scenario(const std::string& preset, const ConfigOverride& override = {});

/// Base configuration of a preset, before overrides.
SystemConfig scenario_config(const std::string& preset);

std::string version_string();

}  // namespace gfra
