#pragma once

#include <iosfwd>
#include <vector>

#include "gfra/linalg.hpp"
#include "gfra/rng.hpp"

namespace gfra {

/// L orthonormal preambles of length L, stored as columns (column l-1 is p_l).
struct PreambleSet {
    CMatrix vectors;

    int size() const noexcept { return static_cast<int>(vectors.cols()); }
    int length() const noexcept { return static_cast<int>(vectors.rows()); }
    auto preamble(int l) const { return vectors.col(l - 1); }
};

/// The N^2 Alltop sequences of prime length N. Column k*N + m holds s_{k,m}.
struct AlltopFamily {
    int prime = 0;
    CMatrix sequences;

    int size() const noexcept { return static_cast<int>(sequences.cols()); }
    auto sequence(int k, int m) const { return sequences.col(k * prime + m); }
};

/// L spreading sequences of length N drawn from an Alltop family. Column
/// l-1 is the sequence c_l tied to preamble l.
struct SpreadingSet {
    CMatrix vectors;
    std::vector<int> source_indices;

    int size() const noexcept { return static_cast<int>(vectors.cols()); }
    int length() const noexcept { return static_cast<int>(vectors.rows()); }
    auto sequence(int l) const { return vectors.col(l - 1); }
};

bool is_prime(int n) noexcept;

/// Normalized DFT columns. Throws std::invalid_argument for L < 1.
PreambleSet gen_preambles(int num_preambles);

/// s_{k,m}(n) = exp(j 2 pi ((n+k)^3 + m n) / N) / sqrt(N).
/// Throws std::invalid_argument unless N is a prime >= 5.
AlltopFamily gen_alltop_family(int prime);

/// Draws L distinct family members uniformly without replacement.
SpreadingSet select_spreading(const AlltopFamily& family, int num_sequences, RandomSource& rng);

/// Largest |<v_i, v_j>| over distinct column pairs; 0 for a single column.
double coherence(const CMatrix& columns);
inline double coherence(const PreambleSet& set) { return coherence(set.vectors); }
inline double coherence(const SpreadingSet& set) { return coherence(set.vectors); }

/// One row per sequence, real and imaginary parts interleaved.
void write_sequences_csv(std::ostream& out, const CMatrix& columns);

}  // namespace gfra
