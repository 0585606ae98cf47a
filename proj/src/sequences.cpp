#include "gfra/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gfra {

bool is_prime(int n) noexcept {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

PreambleSet gen_preambles(int num_preambles) {
    if (num_preambles < 1) {
        throw std::invalid_argument("gen_preambles: the number of preambles must be at least 1");
    }
    const int L = num_preambles;
    const double scale = 1.0 / std::sqrt(static_cast<double>(L));
    PreambleSet set{CMatrix(L, L)};
    for (int col = 0; col < L; ++col) {
        for (int row = 0; row < L; ++row) {
            // Reduce the exponent first so the phase argument stays small.
            const long long e = (static_cast<long long>(row) * col) % L;
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(e) / L;
            set.vectors(row, col) = std::polar(scale, phase);
        }
    }
    return set;
}

AlltopFamily gen_alltop_family(int prime) {
    if (prime < 5 || !is_prime(prime)) {
        throw std::invalid_argument("gen_alltop_family: length must be a prime >= 5 (got " +
                                    std::to_string(prime) + ")");
    }
    const long long N = prime;
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    AlltopFamily family{prime, CMatrix(N, N * N)};
    for (long long k = 0; k < N; ++k) {
        for (long long m = 0; m < N; ++m) {
            for (long long n = 0; n < N; ++n) {
                const long long shifted = (n + k) % N;
                const long long e = (shifted * shifted % N * shifted + m * n) % N;
                const double phase = 2.0 * std::numbers::pi * static_cast<double>(e) / N;
                family.sequences(n, k * N + m) = std::polar(scale, phase);
            }
        }
    }
    return family;
}

SpreadingSet select_spreading(const AlltopFamily& family, int num_sequences, RandomSource& rng) {
    const int pool = family.size();
    if (num_sequences < 1 || num_sequences > pool) {
        throw std::invalid_argument("select_spreading: cannot select " + std::to_string(num_sequences) +
                                    " sequences from a family of " + std::to_string(pool));
    }
    std::vector<int> indices(pool);
    std::iota(indices.begin(), indices.end(), 0);
    // Partial Fisher-Yates: the first num_sequences entries become the sample.
    for (int i = 0; i < num_sequences; ++i) {
        std::uniform_int_distribution<int> pick(i, pool - 1);
        std::swap(indices[i], indices[pick(rng)]);
    }
    indices.resize(num_sequences);

    SpreadingSet set{CMatrix(family.prime, num_sequences), indices};
    for (int l = 0; l < num_sequences; ++l) {
        set.vectors.col(l) = family.sequences.col(indices[l]);
    }
    return set;
}

double coherence(const CMatrix& columns) {
    if (columns.cols() == 0) {
        throw std::invalid_argument("coherence: empty set");
    }
    const CMatrix gram = columns.adjoint() * columns;
    double worst = 0.0;
    for (Eigen::Index j = 1; j < gram.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            worst = std::max(worst, std::abs(gram(i, j)));
        }
    }
    return worst;
}

void write_sequences_csv(std::ostream& out, const CMatrix& columns) {
    const auto old_precision = out.precision(17);
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        for (Eigen::Index r = 0; r < columns.rows(); ++r) {
            if (r > 0) out << ',';
            out << columns(r, c).real() << ',' << columns(r, c).imag();
        }
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace gfra
