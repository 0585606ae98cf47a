#include "gfra/preamble_detection.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "gfra/special_functions.hpp"

namespace gfra {

namespace {

template <class Decide>
DetectionReport decide(const CorrelatorOutput& out, std::span<const int> truth, Decide&& present) {
    const int L = static_cast<int>(out.z.size());
    std::vector<bool> transmitted(L, false);
    for (int l : truth) {
        if (l < 1 || l > L) throw std::invalid_argument("detect: ground-truth preamble out of range");
        transmitted[l - 1] = true;
    }
    DetectionReport report;
    report.decisions.resize(L);
    for (int l = 1; l <= L; ++l) {
        const bool hit = present(out.z(l - 1));
        report.decisions[l - 1] = hit;
        if (hit) report.detected.push_back(l);
        if (transmitted[l - 1] && !hit) ++report.missed;
        if (!transmitted[l - 1] && hit) ++report.false_alarms;
    }
    return report;
}

}  // namespace

CVector preamble_received(const SlotOutcome& outcome, const PreambleSet& preambles,
                          std::span<const double> phases, double rx_power, double noise_level,
                          RandomSource& rng) {
    if (outcome.num_preambles != preambles.size()) {
        throw std::invalid_argument("preamble_received: preamble count mismatch");
    }
    if (phases.size() != outcome.assignment.size()) {
        throw std::invalid_argument("preamble_received: one phase per active device required");
    }
    const double amplitude = std::sqrt(rx_power);
    CVector y = CVector::Zero(preambles.length());
    for (std::size_t k = 0; k < outcome.assignment.size(); ++k) {
        y += preambles.preamble(outcome.assignment[k]) * std::polar(amplitude, phases[k]);
    }
    if (noise_level > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_level / 2.0));
        for (auto& v : y) v += cplx(gauss(rng), gauss(rng));
    }
    return y;
}

CorrelatorOutput correlate(const CVector& received, const PreambleSet& preambles, double noise_level,
                           double rx_power) {
    if (received.size() != preambles.length()) {
        throw std::invalid_argument("correlate: received vector length does not match the preambles");
    }
    return {preambles.vectors.adjoint() * received, noise_level, rx_power};
}

DetectionReport detect_coherent(const CorrelatorOutput& out, double tau, std::span<const int> truth) {
    if (!(tau > 0.0)) throw std::invalid_argument("detect_coherent: threshold must be positive");
    return decide(out, truth, [tau](cplx z) { return z.real() >= tau; });
}

DetectionReport detect_noncoherent(const CorrelatorOutput& out, double tau, std::span<const int> truth) {
    if (!(tau > 0.0)) throw std::invalid_argument("detect_noncoherent: threshold must be positive");
    return decide(out, truth, [tau](cplx z) { return std::norm(z) >= tau; });
}

ErrorProbabilities analytic_coherent_md_fa(double snr, double tau_norm) {
    if (!(snr > 0.0)) throw std::invalid_argument("analytic_coherent_md_fa: snr must be positive");
    // sqrt(2/N0) (sqrt(P) - tau) = sqrt(2 snr) (1 - tau / sqrt(P))
    const double scale = std::sqrt(2.0 * snr);
    return {qfunc(scale * (1.0 - tau_norm)), qfunc(scale * tau_norm)};
}

ErrorProbabilities analytic_noncoherent_md_fa(double snr, double tau_over_n0) {
    if (!(snr > 0.0)) throw std::invalid_argument("analytic_noncoherent_md_fa: snr must be positive");
    if (tau_over_n0 < 0.0) throw std::invalid_argument("analytic_noncoherent_md_fa: threshold must be nonnegative");
    // 2|z|^2/N0 is chi^2_2 under H0 and noncentral chi^2_2(2 P/N0) under H1.
    const double md = marcum_p1(std::sqrt(2.0 * snr), std::sqrt(2.0 * tau_over_n0));
    return {md, std::exp(-tau_over_n0)};
}

}  // namespace gfra
