#include "gfra/cdma_phy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace gfra {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

cplx round_gaussian(cplx z) { return {std::round(z.real()), std::round(z.imag())}; }

void require_same_rows(const CMatrix& received, const CMatrix& codebook, const char* who) {
    if (received.rows() != codebook.rows()) {
        throw std::invalid_argument(std::string(who) + ": received rows must match the spreading length");
    }
}

}  // namespace

CVector qpsk_modulate(std::span<const std::uint8_t> bits, double rx_power) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_modulate: bit count must be even");
    const double a = std::sqrt(rx_power) * kInvSqrt2;
    CVector out(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double re = bits[2 * i] ? -a : a;
        const double im = bits[2 * i + 1] ? -a : a;
        out(i) = cplx(re, im);
    }
    return out;
}

Bits qpsk_demodulate(const Eigen::Ref<const CVector>& symbols) {
    Bits bits(static_cast<std::size_t>(2 * symbols.size()));
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        bits[2 * i] = symbols(i).real() < 0.0 ? 1 : 0;
        bits[2 * i + 1] = symbols(i).imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

CVector qpsk_quantize(const Eigen::Ref<const CVector>& symbols) {
    CVector out(symbols.size());
    for (Eigen::Index i = 0; i < symbols.size(); ++i) {
        out(i) = cplx(symbols(i).real() < 0.0 ? -kInvSqrt2 : kInvSqrt2,
                      symbols(i).imag() < 0.0 ? -kInvSqrt2 : kInvSqrt2);
    }
    return out;
}

DataFrame random_frames(int num_active, int bits_per_device, RandomSource& rng) {
    if (bits_per_device % 2 != 0 || bits_per_device < 0) {
        throw std::invalid_argument("random_frames: bits per device must be even");
    }
    DataFrame frame{CMatrix(num_active, bits_per_device / 2), {}};
    frame.bits.reserve(num_active);
    for (int k = 0; k < num_active; ++k) {
        Bits bits(bits_per_device);
        std::uint64_t word = 0;
        for (int i = 0; i < bits_per_device; ++i) {
            if (i % 64 == 0) word = rng();
            bits[i] = static_cast<std::uint8_t>(word & 1U);
            word >>= 1;
        }
        frame.symbols.row(k) = qpsk_modulate(bits).transpose();
        frame.bits.push_back(std::move(bits));
    }
    return frame;
}

CMatrix build_received(const SlotOutcome& outcome, const DataFrame& frames, const SpreadingSet& spreading,
                       std::span<const double> phases, double rx_power, double noise_level,
                       RandomSource& rng) {
    const int K = outcome.num_active;
    if (frames.devices() != K || static_cast<int>(phases.size()) != K) {
        throw std::invalid_argument("build_received: one frame and one phase per active device required");
    }
    if (spreading.size() != outcome.num_preambles) {
        throw std::invalid_argument("build_received: one spreading sequence per preamble required");
    }
    const double amplitude = std::sqrt(rx_power);
    CMatrix signatures(spreading.length(), K);
    for (int k = 0; k < K; ++k) {
        signatures.col(k) = spreading.sequence(outcome.assignment[k]) * std::polar(amplitude, phases[k]);
    }
    CMatrix r = K > 0 ? CMatrix(signatures * frames.symbols)
                      : CMatrix(CMatrix::Zero(spreading.length(), frames.length()));
    if (noise_level > 0.0) {
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_level / 2.0));
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, j) += cplx(gauss(rng), gauss(rng));
        }
    }
    return r;
}

CMatrix effective_codebook(const SlotOutcome& outcome, const SpreadingSet& spreading,
                           std::span<const double> phases) {
    const int Q = outcome.distinct();
    std::vector<cplx> estimate(outcome.num_preambles + 1, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < outcome.assignment.size(); ++k) {
        estimate[outcome.assignment[k]] += std::polar(1.0, phases[k]);
    }
    CMatrix codebook(spreading.length(), Q);
    for (int q = 0; q < Q; ++q) {
        const int l = outcome.transmitted[q];
        const double mag = std::abs(estimate[l]);
        const cplx rotation = mag > 1e-12 ? estimate[l] / mag : cplx(1.0, 0.0);
        codebook.col(q) = spreading.sequence(l) * rotation;
    }
    return codebook;
}

DetectionOutput mmse_detect(const CMatrix& received, const CMatrix& codebook, double rx_power,
                            double noise_level) {
    require_same_rows(received, codebook, "mmse_detect");
    const Eigen::Index Q = codebook.cols();
    if (Q < 1) throw std::invalid_argument("mmse_detect: no signals to detect");
    CMatrix gram = codebook.adjoint() * codebook;
    gram.diagonal().array() += noise_level / rx_power;
    const CMatrix matched = codebook.adjoint() * received / std::sqrt(rx_power);

    DetectionOutput out;
    out.soft = gram.ldlt().solve(matched);
    out.hard.resize(Q, received.cols());
    for (Eigen::Index t = 0; t < received.cols(); ++t) out.hard.col(t) = qpsk_quantize(out.soft.col(t));
    return out;
}

LatticeReduction clll_reduce(const CMatrix& basis, double delta) {
    using Eigen::Index;
    const Index n = basis.cols();
    if (n == 0) return {basis, CMatrix(0, 0)};
    if (basis.rows() < n) throw RankDeficientError("clll_reduce: more columns than rows");

    Eigen::HouseholderQR<CMatrix> qr(basis);
    CMatrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const double scale = std::max(basis.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < n; ++i) {
        if (std::abs(R(i, i)) <= 1e-10 * scale) throw RankDeficientError("clll_reduce: basis is rank deficient");
    }

    CMatrix T = CMatrix::Identity(n, n);
    auto size_reduce = [&](Index l, Index k) {
        const cplx mu = round_gaussian(R(l, k) / R(l, l));
        if (mu == cplx(0.0, 0.0)) return;
        R.col(k).head(l + 1) -= mu * R.col(l).head(l + 1);
        T.col(k) -= mu * T.col(l);
    };

    long iterations = 0;
    Index k = 1;
    while (k < n) {
        if (++iterations > 10'000'000) throw std::runtime_error("clll_reduce: no convergence");
        size_reduce(k - 1, k);
        if (delta * std::norm(R(k - 1, k - 1)) > std::norm(R(k, k)) + std::norm(R(k - 1, k))) {
            R.col(k - 1).swap(R.col(k));
            T.col(k - 1).swap(T.col(k));
            // Unitary 2x2 rotation of rows k-1, k to restore the triangular form.
            const cplx a = R(k - 1, k - 1);
            const cplx b = R(k, k - 1);
            const double rho = std::hypot(std::abs(a), std::abs(b));
            const cplx g11 = std::conj(a) / rho, g12 = std::conj(b) / rho;
            const cplx g21 = -b / rho, g22 = a / rho;
            for (Index j = k - 1; j < n; ++j) {
                const cplx top = R(k - 1, j);
                const cplx bottom = R(k, j);
                R(k - 1, j) = g11 * top + g12 * bottom;
                R(k, j) = g21 * top + g22 * bottom;
            }
            R(k, k - 1) = 0.0;
            k = std::max<Index>(k - 1, 1);
        } else {
            for (Index l = k - 2; l >= 0; --l) size_reduce(l, k);
            ++k;
        }
    }
    return {basis * T, T};
}

double orthogonality_defect(const CMatrix& basis) {
    double log_norms = 0.0;
    for (Eigen::Index i = 0; i < basis.cols(); ++i) log_norms += std::log(basis.col(i).norm());
    Eigen::HouseholderQR<CMatrix> qr(basis);
    double log_volume = 0.0;
    for (Eigen::Index i = 0; i < basis.cols(); ++i) log_volume += std::log(std::abs(qr.matrixQR()(i, i)));
    return std::exp(log_norms - log_volume);
}

namespace {

DetectionOutput lattice_detect(const CMatrix& received, const CMatrix& codebook, double rx_power,
                               double noise_level) {
    const Eigen::Index N = codebook.rows();
    const Eigen::Index Q = codebook.cols();
    if (Q < 1) throw std::invalid_argument("mmse_lr_detect: no signals to detect");

    // Extended system [C; sigma I] w = [r; 0] whose least-squares solution is the MMSE estimate.
    CMatrix extended(N + Q, Q);
    extended.topRows(N) = codebook;
    extended.bottomRows(Q) = CMatrix::Identity(Q, Q) * std::sqrt(noise_level / rx_power);

    LatticeReduction lr;
    try {
        lr = clll_reduce(extended);
    } catch (const RankDeficientError&) {
        auto out = mmse_detect(received, codebook, rx_power, noise_level);
        out.fell_back = true;
        return out;
    }

    CMatrix inverse = lr.transform.inverse();
    inverse = inverse.unaryExpr([](cplx z) { return round_gaussian(z); });

    const CMatrix& reduced = lr.reduced;
    const CMatrix gram = reduced.adjoint() * reduced;
    const CMatrix filtered =
        gram.ldlt().solve(reduced.topRows(N).adjoint() * received) / std::sqrt(rx_power);

    // QPSK points are (2u + d) / sqrt(2) with u in {0,1} + j{0,1} and d = -(1 + j).
    const CVector offset = CVector::Constant(Q, cplx(-1.0, -1.0));
    const CVector reduced_offset = inverse * offset;

    DetectionOutput out;
    out.soft = lr.transform * filtered;
    out.hard.resize(Q, received.cols());
    CVector u_reduced(Q);
    for (Eigen::Index t = 0; t < received.cols(); ++t) {
        const CVector scaled = (std::numbers::sqrt2 * filtered.col(t) - reduced_offset) / 2.0;
        for (Eigen::Index q = 0; q < Q; ++q) u_reduced(q) = round_gaussian(scaled(q));
        const CVector symbols = (2.0 * (lr.transform * u_reduced) + offset) * kInvSqrt2;
        out.hard.col(t) = qpsk_quantize(symbols);
    }
    return out;
}

}  // namespace

DetectionOutput mmse_lr_detect(const CMatrix& received, const CMatrix& codebook, double rx_power,
                               double noise_level, const std::vector<bool>& off_lattice) {
    require_same_rows(received, codebook, "mmse_lr_detect");
    const Eigen::Index Q = codebook.cols();
    if (!off_lattice.empty() && off_lattice.size() != static_cast<std::size_t>(Q)) {
        throw std::invalid_argument("mmse_lr_detect: off-lattice mask does not match the codebook");
    }
    std::vector<Eigen::Index> keep, drop;
    for (Eigen::Index q = 0; q < Q; ++q) {
        (!off_lattice.empty() && off_lattice[q] ? drop : keep).push_back(q);
    }
    if (drop.empty()) return lattice_detect(received, codebook, rx_power, noise_level);
    if (keep.empty()) return mmse_detect(received, codebook, rx_power, noise_level);

    // Null the off-lattice columns, then reduce over the constellation-valued ones.
    CMatrix nulled(codebook.rows(), static_cast<Eigen::Index>(drop.size()));
    for (std::size_t i = 0; i < drop.size(); ++i) nulled.col(static_cast<Eigen::Index>(i)) = codebook.col(drop[i]);
    const Eigen::HouseholderQR<CMatrix> qr(nulled);
    const CMatrix basis = qr.householderQ() * CMatrix::Identity(nulled.rows(), nulled.cols());
    const auto project = [&](const CMatrix& m) -> CMatrix { return m - basis * (basis.adjoint() * m); };

    CMatrix kept(codebook.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) kept.col(static_cast<Eigen::Index>(i)) = codebook.col(keep[i]);

    auto out = mmse_detect(received, codebook, rx_power, noise_level);
    const auto inner = lattice_detect(project(received), project(kept), rx_power, noise_level);
    out.fell_back = inner.fell_back;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        out.soft.row(keep[i]) = inner.soft.row(row);
        out.hard.row(keep[i]) = inner.hard.row(row);
    }
    return out;
}

bool packet_success(int bit_errors, const PacketCodeModel& model) {
    if (bit_errors < 0 || bit_errors > model.length) {
        throw std::invalid_argument("packet_success: bit error count out of range");
    }
    return bit_errors <= model.correctable;
}

double noise_level_from_ebn0_db(double ebn0_db, double rx_power) {
    return rx_power / (2.0 * std::pow(10.0, ebn0_db / 10.0));
}

}  // namespace gfra
