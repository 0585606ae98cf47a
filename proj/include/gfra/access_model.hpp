#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfra/rng.hpp"
#include "gfra/system_config.hpp"

namespace gfra {

/// Raised when a simulated slot breaks a structural invariant.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Collision statistics of one slot. Preamble indices are 1-based.
struct SlotOutcome {
    int num_active = 0;                 // K
    int num_preambles = 0;              // L
    std::vector<int> assignment;        // l(k) per device
    std::vector<int> occupancy;         // |K_l|, entry l-1
    std::vector<int> transmitted;       // A, ascending
    int singletons = 0;                 // U
    int collided_preambles = 0;         // W
    std::vector<bool> collided;         // per device
    std::vector<bool> decodable;        // per device, filled by the harness

    int distinct() const noexcept { return singletons + collided_preambles; }  // Q
    int collided_devices() const noexcept { return num_active - singletons; }

    /// Position q (0-based) of preamble l in A, or -1 when l was not transmitted.
    int column_of(int preamble) const;
};

/// Q = U + W, U + 2W <= K, Q <= min(L, K); throws InvariantViolation otherwise.
void check_invariants(const SlotOutcome& outcome);

/// K ~ Poisson(lambda). Throws std::invalid_argument for negative lambda.
int draw_num_active(double lambda, RandomSource& rng);

/// K i.i.d. uniform choices over {1..L}.
std::vector<int> assign_preambles(int num_active, int num_preambles, RandomSource& rng);

SlotOutcome collision_stats(std::span<const int> assignment, int num_preambles);

/// Rejection-samples assignments until exactly `singletons` preambles carry
/// one device and `collisions` carry two or more.
std::vector<int> assign_with_composition(int num_active, int num_preambles, int singletons,
                                         int collisions, RandomSource& rng,
                                         int max_attempts = 1'000'000);

struct PowerControl {
    bool admitted = false;
    double transmit_power = 0.0;  // P_k = P_rx / |h_k|^2 when admitted
};

/// Channel inversion toward a common receive power. Devices needing more than
/// P_max (including a zero channel gain) are suppressed.
PowerControl apply_power_control(double channel_gain, double rx_power, double max_power);

/// Per-device phases theta_k, uniform on [0, 2 pi), or all zero when the
/// devices pre-compensate their channel phase.
std::vector<double> draw_phases(int num_active, bool phase_compensation, RandomSource& rng);

void to_json(nlohmann::json& j, const SlotOutcome& outcome);

}  // namespace gfra
