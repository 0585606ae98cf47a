#pragma once

#include <span>
#include <vector>

#include "gfra/access_model.hpp"
#include "gfra/linalg.hpp"
#include "gfra/rng.hpp"
#include "gfra/sequences.hpp"

namespace gfra {

/// Correlator bank output z_l = <p_l, y>, l = 1..L.
struct CorrelatorOutput {
    CVector z;
    double noise_level = 0.0;  // N0
    double rx_power = 1.0;     // P_rx
};

struct DetectionReport {
    std::vector<int> detected;    // estimated A, ascending, 1-based
    std::vector<bool> decisions;  // entry l-1
    int missed = 0;
    int false_alarms = 0;
};

struct ErrorProbabilities {
    double missed_detection = 0.0;
    double false_alarm = 0.0;
};

/// Received preamble-phase vector y = sum_k p_{l(k)} sqrt(P_rx) e^{j theta_k} + n,
/// n ~ CN(0, N0 I).
CVector preamble_received(const SlotOutcome& outcome, const PreambleSet& preambles,
                          std::span<const double> phases, double rx_power, double noise_level,
                          RandomSource& rng);

CorrelatorOutput correlate(const CVector& received, const PreambleSet& preambles,
                           double noise_level, double rx_power = 1.0);

/// Declares preamble l present iff Re(z_l) >= tau. `truth` is the transmitted
/// set A used for the MD/FA tallies. Throws for tau <= 0.
DetectionReport detect_coherent(const CorrelatorOutput& out, double tau, std::span<const int> truth);

/// Declares preamble l present iff |z_l|^2 >= tau. Throws for tau <= 0.
DetectionReport detect_noncoherent(const CorrelatorOutput& out, double tau, std::span<const int> truth);

/// Coherent test. `snr` = P_rx / N0 (linear), `tau_norm` = tau / sqrt(P_rx).
ErrorProbabilities analytic_coherent_md_fa(double snr, double tau_norm);

/// Noncoherent test. `snr` = P_rx / N0 (linear), `tau_over_n0` = tau / N0.
ErrorProbabilities analytic_noncoherent_md_fa(double snr, double tau_over_n0);

}  // namespace gfra
