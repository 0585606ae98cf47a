#pragma once

#include "gfra/system_config.hpp"

namespace gfra {

// Closed-form throughput and spectral efficiency for the two data-phase
// channelizations. L = number of preambles, N = spreading factor,
// D = data symbols per TDMA block, lambda = mean number of active devices.

/// Pr(a given preamble is chosen by exactly one of K devices).
double alpha(int num_active, int num_preambles);
/// Pr(a given preamble is chosen by two or more of K devices).
double beta(int num_active, int num_preambles);

/// Expected collision-free devices per slot under Poisson activity: lambda * exp(-lambda / L).
double kappa_td(double lambda, int num_preambles);
/// Same, conditioned on K active devices: K (1 - 1/L)^(K-1).
double kappa_td_cond(int num_active, int num_preambles);

/// Slot length shared by both approaches: L + L D.
double slot_length(int num_preambles, double block_length);
/// Data symbols per CDMA packet that fill the same slot: L D / N.
double cdma_block_length(int num_preambles, int spreading_factor, double block_length);

double eta_td(double lambda, int num_preambles, double block_length);
/// D -> infinity limit of eta_td, (lambda / L) exp(-lambda / L) <= 1/e.
double eta_td_limit(double lambda, int num_preambles);

/// nu_bar = L - (N+1)(1 - 1/L)^N - L (1 - 1/L)^(N+1), i.e. L * beta at K = N + 1.
double nu_bar(int num_preambles, int spreading_factor);
double q_bar(int num_preambles, int spreading_factor);

/// The Poisson-cdf factor Gamma(N + Qbar, lambda_bar) / (N + Qbar - 1)!.
double cdf_term(double lambda, int num_preambles, int spreading_factor,
                CdfRounding rounding = CdfRounding::Round);

double kappa_cd(double lambda, int num_preambles, int spreading_factor,
                CdfRounding rounding = CdfRounding::Round);
double eta_cd(double lambda, int num_preambles, int spreading_factor, double block_length,
              CdfRounding rounding = CdfRounding::Round);
/// D -> infinity limit of eta_cd, kappa_cd / N.
double eta_cd_limit(double lambda, int num_preambles, int spreading_factor,
                    CdfRounding rounding = CdfRounding::Round);
/// eta_cd / eta_td = (L / N) * cdf_term.
double gain_ratio(double lambda, int num_preambles, int spreading_factor,
                  CdfRounding rounding = CdfRounding::Round);

/// Pr(Q > N | K) with independent W_l: sum_{l=0}^{K-N-1} Binom(L, beta)(l). Zero for K <= N.
double overload_probability(int num_active, int num_preambles, int spreading_factor);
/// Poisson approximation of the same: Gamma(K - N, L beta) / (K - N - 1)!.
double overload_probability_poisson(int num_active, int num_preambles, int spreading_factor);

}  // namespace gfra
