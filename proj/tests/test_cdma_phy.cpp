#include <cmath>
#include <random>

#include "doctest.h"

#include "gfra/cdma_phy.hpp"
#include "gfra/special_functions.hpp"

using namespace gfra;

namespace {

CMatrix random_complex(int rows, int cols, RandomSource& rng) {
    std::normal_distribution<double> g;
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
}

bool is_gaussian_integer_matrix(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx v = m(i);
        if (std::abs(v.real() - std::round(v.real())) > 1e-9) return false;
        if (std::abs(v.imag() - std::round(v.imag())) > 1e-9) return false;
    }
    return true;
}

SpreadingSet orthogonal_pair() {
    const auto family = gen_alltop_family(7);
    SpreadingSet s;
    s.vectors.resize(7, 2);
    s.vectors.col(0) = family.sequence(0, 0);
    s.vectors.col(1) = family.sequence(0, 3);
    s.source_indices = {0, 3};
    return s;
}

}  // namespace

TEST_CASE("QPSK mapping") {
    const double r = 1.0 / std::sqrt(2.0);
    const Bits b00{0, 0}, b11{1, 1}, b01{0, 1}, b10{1, 0};
    CHECK(std::abs(qpsk_modulate(b00)(0) - cplx(r, r)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b11)(0) - cplx(-r, -r)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b01)(0) - cplx(r, -r)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b10)(0) - cplx(-r, r)) < 1e-15);
    CHECK(std::abs(qpsk_modulate(b00, 4.0)(0)) == doctest::Approx(2.0));
    const Bits odd{0, 1, 1};
    CHECK_THROWS_AS(qpsk_modulate(odd), std::invalid_argument);

    const Bits all{0, 0, 0, 1, 1, 0, 1, 1};
    CHECK(qpsk_demodulate(qpsk_modulate(all, 3.0)) == all);
    const CVector q = qpsk_quantize(qpsk_modulate(all, 9.0) * 0.1);
    CHECK(qpsk_demodulate(q) == all);
    for (Eigen::Index i = 0; i < q.size(); ++i) CHECK(std::abs(q(i)) == doctest::Approx(1.0));
}

TEST_CASE("noiseless single device is the spread symbol stream") {
    auto rng = trial_rng(1, Stream::Phy, 0);
    const auto family = gen_alltop_family(11);
    const auto spreading = select_spreading(family, 20, rng);
    const auto outcome = collision_stats(std::vector<int>{7}, 20);
    const auto frames = random_frames(1, 64, rng);
    const std::vector<double> phases{0.0};
    const double P = 2.0;
    const CMatrix r = build_received(outcome, frames, spreading, phases, P, 0.0, rng);
    const CMatrix expected = spreading.sequence(7) * (std::sqrt(P) * frames.symbols.row(0));
    CHECK((r - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthogonal signatures separate exactly without noise") {
    auto rng = trial_rng(2, Stream::Phy, 0);
    const auto spreading = orthogonal_pair();
    const auto outcome = collision_stats(std::vector<int>{1, 2}, 2);
    const auto frames = random_frames(2, 32, rng);
    const std::vector<double> phases{0.0, 0.0};
    const CMatrix r = build_received(outcome, frames, spreading, phases, 1.0, 0.0, rng);
    const CMatrix recovered = spreading.vectors.adjoint() * r;
    CHECK((recovered - frames.symbols).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("received energy is K P + N N0") {
    const auto family = gen_alltop_family(11);
    const double P = 1.0, n0 = 0.3;
    const int K = 6, slots = 3000, T = 16;
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t count = 0;
    for (int i = 0; i < slots; ++i) {
        auto rng = trial_rng(3, Stream::Phy, static_cast<std::uint64_t>(i));
        const auto spreading = select_spreading(family, 20, rng);
        const auto outcome = collision_stats(assign_preambles(K, 20, rng), 20);
        const auto frames = random_frames(K, 2 * T, rng);
        const auto phases = draw_phases(K, false, rng);
        const CMatrix r = build_received(outcome, frames, spreading, phases, P, n0, rng);
        for (int t = 0; t < T; ++t) {
            const double e = r.col(t).squaredNorm();
            sum += e;
            sum_sq += e * e;
            ++count;
        }
    }
    const double mean = sum / count;
    const double se = std::sqrt((sum_sq / count - mean * mean) / count);
    // Columns of one slot share a codebook, so allow a wider band than 3 se.
    CHECK(std::abs(mean - (K * P + 11 * n0)) < 6.0 * se);
}

TEST_CASE("effective codebook") {
    auto rng = trial_rng(4, Stream::Phy, 0);
    const auto spreading = select_spreading(gen_alltop_family(7), 10, rng);
    const auto outcome = collision_stats(std::vector<int>{3, 9, 3}, 10);
    const std::vector<double> zero{0.0, 0.0, 0.0};
    const CMatrix plain = effective_codebook(outcome, spreading, zero);
    CHECK(plain.cols() == 2);
    CHECK((plain.col(0) - spreading.sequence(3)).norm() < 1e-15);
    CHECK((plain.col(1) - spreading.sequence(9)).norm() < 1e-15);

    const std::vector<double> phases{0.3, 1.1, 0.9};
    const CMatrix rotated = effective_codebook(outcome, spreading, phases);
    CHECK((rotated.col(1) - spreading.sequence(9) * std::polar(1.0, 1.1)).norm() < 1e-12);
    const cplx sum = std::polar(1.0, 0.3) + std::polar(1.0, 0.9);
    CHECK((rotated.col(0) - spreading.sequence(3) * (sum / std::abs(sum))).norm() < 1e-12);
}

TEST_CASE("single-user MMSE matches the QPSK bit error rate") {
    const auto family = gen_alltop_family(11);
    for (double ebn0_db : {0.0, 4.0, 7.0}) {
        CAPTURE(ebn0_db);
        const double n0 = noise_level_from_ebn0_db(ebn0_db);
        std::uint64_t errors = 0, bits = 0;
        for (int i = 0; i < 400; ++i) {
            auto rng = trial_rng(5, Stream::Phy, static_cast<std::uint64_t>(i));
            const auto spreading = select_spreading(family, 20, rng);
            const auto outcome = collision_stats(std::vector<int>{5}, 20);
            const auto frames = random_frames(1, 512, rng);
            const auto phases = draw_phases(1, false, rng);
            const CMatrix r = build_received(outcome, frames, spreading, phases, 1.0, n0, rng);
            const auto det = mmse_detect(r, effective_codebook(outcome, spreading, phases), 1.0, n0);
            const Bits decided = qpsk_demodulate(det.hard.row(0).transpose());
            for (std::size_t b = 0; b < decided.size(); ++b) errors += decided[b] != frames.bits[0][b];
            bits += decided.size();
        }
        const double p = qfunc(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0)));
        const double ber = static_cast<double>(errors) / bits;
        CHECK(std::abs(ber - p) < 4.0 * std::sqrt(p * (1 - p) / bits));
    }
}

TEST_CASE("noise level from Eb/N0") {
    CHECK(noise_level_from_ebn0_db(10.0) == doctest::Approx(0.05));
    CHECK(noise_level_from_ebn0_db(0.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("complex LLL on random bases") {
    auto rng = trial_rng(6, Stream::Phy, 0);
    const double delta = 0.75;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 7;
        const int m = n + trial % 3;
        const CMatrix B = random_complex(m, n, rng) * std::exp(0.5 * (trial % 5 - 2));
        const auto lr = clll_reduce(B, delta);
        REQUIRE(is_gaussian_integer_matrix(lr.transform));
        CHECK(std::abs(std::abs(lr.transform.determinant()) - 1.0) < 1e-9);
        CHECK((B * lr.transform - lr.reduced).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, B.cwiseAbs().maxCoeff()));

        const Eigen::HouseholderQR<CMatrix> qr(lr.reduced);
        const CMatrix R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        for (int j = 1; j < n; ++j) {
            for (int i = 0; i < j; ++i) {
                const cplx mu = R(i, j) / R(i, i);
                CHECK(std::abs(mu.real()) <= 0.5 + 1e-9);
                CHECK(std::abs(mu.imag()) <= 0.5 + 1e-9);
            }
            const double lhs = delta * std::norm(R(j - 1, j - 1));
            const double rhs = std::norm(R(j, j)) + std::norm(R(j - 1, j));
            CHECK(lhs <= rhs * (1 + 1e-9));
        }
        CHECK((lr.reduced * lr.transform.inverse() - B).cwiseAbs().maxCoeff() <
              1e-9 * std::max(1.0, B.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("LLL lowers the defect of ill-conditioned two-column bases") {
    auto rng = trial_rng(10, Stream::Phy, 0);
    std::uniform_int_distribution<int> mult(-40, 40);
    for (int trial = 0; trial < 200; ++trial) {
        CMatrix B = random_complex(4, 2, rng);
        B.col(1) = B.col(0) * cplx(mult(rng), mult(rng)) + 0.05 * random_complex(4, 1, rng);
        const double before = orthogonality_defect(B);
        const double after = orthogonality_defect(clll_reduce(B).reduced);
        if (before > 1.5) CHECK(after < before);
    }
}

TEST_CASE("LLL reduces a skewed basis") {
    CMatrix B(2, 2);
    B << 1.0, 100.0, 0.0, 1.0;
    const auto lr = clll_reduce(B);
    CHECK(orthogonality_defect(B) > 50.0);
    CHECK(orthogonality_defect(lr.reduced) < 1.5);
    CHECK(orthogonality_defect(CMatrix::Identity(3, 3)) == doctest::Approx(1.0));
}

TEST_CASE("LLL rejects rank-deficient bases") {
    CMatrix B(3, 2);
    B << 1.0, 2.0, 1.0, 2.0, 1.0, 2.0;
    CHECK_THROWS_AS(clll_reduce(B), RankDeficientError);
}

TEST_CASE("MMSE-LR equals MMSE for orthogonal signatures") {
    const auto spreading = orthogonal_pair();
    const auto outcome = collision_stats(std::vector<int>{1, 2}, 2);
    const std::vector<double> phases{0.0, 0.0};
    for (int i = 0; i < 50; ++i) {
        auto rng = trial_rng(7, Stream::Phy, static_cast<std::uint64_t>(i));
        const auto frames = random_frames(2, 64, rng);
        const CMatrix r = build_received(outcome, frames, spreading, phases, 1.0, 0.4, rng);
        const auto a = mmse_detect(r, spreading.vectors, 1.0, 0.4);
        const auto b = mmse_lr_detect(r, spreading.vectors, 1.0, 0.4);
        CHECK_FALSE(b.fell_back);
        CHECK((a.hard - b.hard).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("MMSE-LR recovers every symbol at high SNR") {
    const auto family = gen_alltop_family(11);
    for (int i = 0; i < 50; ++i) {
        auto rng = trial_rng(8, Stream::Phy, static_cast<std::uint64_t>(i));
        const auto spreading = select_spreading(family, 20, rng);
        const auto outcome = collision_stats(assign_with_composition(9, 20, 9, 0, rng), 20);
        const auto frames = random_frames(9, 64, rng);
        const auto phases = draw_phases(9, false, rng);
        const CMatrix r = build_received(outcome, frames, spreading, phases, 1.0, 1e-6, rng);
        const auto det = mmse_lr_detect(r, effective_codebook(outcome, spreading, phases), 1.0, 1e-6);
        for (int k = 0; k < 9; ++k) {
            const int q = outcome.column_of(outcome.assignment[k]);
            CHECK(qpsk_demodulate(det.hard.row(q).transpose()) == frames.bits[k]);
        }
    }
}

TEST_CASE("superposed columns are nulled before reduction") {
    const auto family = gen_alltop_family(11);
    int errors = 0;
    for (int i = 0; i < 50; ++i) {
        auto rng = trial_rng(9, Stream::Phy, static_cast<std::uint64_t>(i));
        const auto spreading = select_spreading(family, 20, rng);
        const auto outcome = collision_stats(assign_with_composition(10, 20, 6, 2, rng), 20);
        const auto frames = random_frames(10, 256, rng);
        const auto phases = draw_phases(10, false, rng);
        const double n0 = 1e-4;
        const CMatrix r = build_received(outcome, frames, spreading, phases, 1.0, n0, rng);
        std::vector<bool> superposed;
        for (int l : outcome.transmitted) superposed.push_back(outcome.occupancy[l - 1] > 1);
        const auto det = mmse_lr_detect(r, effective_codebook(outcome, spreading, phases), 1.0, n0, superposed);
        for (int k = 0; k < 10; ++k) {
            if (outcome.collided[k]) continue;
            const int q = outcome.column_of(outcome.assignment[k]);
            errors += qpsk_demodulate(det.hard.row(q).transpose()) != frames.bits[k];
        }
    }
    CHECK(errors == 0);

    const CMatrix c = CMatrix::Identity(4, 2);
    CHECK_THROWS_AS(mmse_lr_detect(CMatrix::Zero(4, 3), c, 1.0, 0.1, std::vector<bool>{true}),
                    std::invalid_argument);
    const auto all = mmse_lr_detect(CMatrix::Zero(4, 3), c, 1.0, 0.1, std::vector<bool>{true, true});
    CHECK(all.hard.rows() == 2);
}

TEST_CASE("MMSE-LR falls back on a rank-deficient system") {
    CMatrix c(3, 2);
    c.col(0) << 1.0, 0.0, 0.0;
    c.col(1) = c.col(0);
    const CMatrix r = CMatrix::Ones(3, 4);
    const auto det = mmse_lr_detect(r, c, 1.0, 0.0);
    CHECK(det.fell_back);
    CHECK(det.hard.rows() == 2);
    CHECK(det.hard.cols() == 4);
}

TEST_CASE("bounded-distance packet model") {
    const PacketCodeModel code;
    CHECK(code.length == 255);
    CHECK(code.message_bits == 191);
    CHECK(code.correctable == 8);
    for (int e = 0; e <= 8; ++e) CHECK(packet_success(e));
    for (int e = 9; e <= 255; ++e) CHECK_FALSE(packet_success(e));
    CHECK_THROWS(packet_success(-1));
    CHECK_THROWS(packet_success(256));
}
