#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gfra/access_model.hpp"
#include "gfra/linalg.hpp"
#include "gfra/rng.hpp"
#include "gfra/sequences.hpp"

namespace gfra {

using Bits = std::vector<std::uint8_t>;

/// Hard-decision bounded-distance model of a binary BCH code.
struct PacketCodeModel {
    int length = 255;      // n
    int message_bits = 191;  // k
    int correctable = 8;   // t
};

/// Gray-mapped QPSK: (b0, b1) -> sqrt(P_rx) ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
/// Throws std::invalid_argument for an odd number of bits.
CVector qpsk_modulate(std::span<const std::uint8_t> bits, double rx_power = 1.0);

/// Sign decisions; inverse of qpsk_modulate for noiseless input.
Bits qpsk_demodulate(const Eigen::Ref<const CVector>& symbols);

/// Nearest unit-energy QPSK point for each entry.
CVector qpsk_quantize(const Eigen::Ref<const CVector>& symbols);

/// Per-device unit-energy data symbols s_k(t): row k, column t.
struct DataFrame {
    CMatrix symbols;
    std::vector<Bits> bits;

    int devices() const noexcept { return static_cast<int>(symbols.rows()); }
    int length() const noexcept { return static_cast<int>(symbols.cols()); }
};

/// Random bits for every device and their QPSK symbols (T = bits / 2 symbols).
DataFrame random_frames(int num_active, int bits_per_device, RandomSource& rng);

/// r(t) = sum_k c_{l(k)} e^{j theta_k} sqrt(P_rx) s_k(t) + n(t), n(t) ~ CN(0, N0 I).
/// Result is N x T.
CMatrix build_received(const SlotOutcome& outcome, const DataFrame& frames,
                       const SpreadingSet& spreading, std::span<const double> phases,
                       double rx_power, double noise_level, RandomSource& rng);

/// The BS-side matrix C-bar (N x Q). Column q is c_{lbar(q)} rotated by the
/// phase of the channel estimate sum_{k in K_l} e^{j theta_k}; with phase
/// compensation every theta_k is zero and the columns are the raw sequences.
CMatrix effective_codebook(const SlotOutcome& outcome, const SpreadingSet& spreading,
                           std::span<const double> phases);

struct DetectionOutput {
    CMatrix soft;    // Q x T filter outputs, normalized to unit symbol energy
    CMatrix hard;    // Q x T QPSK decisions
    bool fell_back = false;  // MMSE-LR could not reduce and used plain MMSE
};

DetectionOutput mmse_detect(const CMatrix& received, const CMatrix& codebook, double rx_power,
                            double noise_level);

/// Thrown by clll_reduce for a (numerically) rank-deficient basis.
class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LatticeReduction {
    CMatrix reduced;    // B T
    CMatrix transform;  // T, unimodular over the Gaussian integers
};

/// Complex LLL reduction of the columns of B.
LatticeReduction clll_reduce(const CMatrix& basis, double delta = 0.75);

/// prod ||b_i|| / sqrt(det(B^H B)); 1 for an orthogonal basis.
double orthogonality_defect(const CMatrix& basis);

/// Lattice-reduction-aided MMSE. Falls back to mmse_detect when the
/// extended basis cannot be reduced. Columns flagged in off_lattice carry
/// symbols outside the QPSK lattice (superposed packets); they are projected
/// out before reduction and get the plain MMSE estimate.
DetectionOutput mmse_lr_detect(const CMatrix& received, const CMatrix& codebook, double rx_power,
                               double noise_level, const std::vector<bool>& off_lattice = {});

/// True iff the codeword's bit errors are within the correction capability.
bool packet_success(int bit_errors, const PacketCodeModel& model = {});

/// N0 for a QPSK link with E_b = P_rx / 2.
double noise_level_from_ebn0_db(double ebn0_db, double rx_power = 1.0);

}  // namespace gfra
