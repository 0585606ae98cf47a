#include "gfra/access_model.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

namespace gfra {

int SlotOutcome::column_of(int preamble) const {
    const auto it = std::lower_bound(transmitted.begin(), transmitted.end(), preamble);
    if (it == transmitted.end() || *it != preamble) return -1;
    return static_cast<int>(it - transmitted.begin());
}

void check_invariants(const SlotOutcome& o) {
    const int Q = o.distinct();
    if (Q != static_cast<int>(o.transmitted.size())) {
        throw InvariantViolation("slot invariant: Q != |A|");
    }
    if (o.singletons + 2 * o.collided_preambles > o.num_active) {
        throw InvariantViolation("slot invariant: U + 2W > K");
    }
    if (Q > std::min(o.num_preambles, o.num_active)) {
        throw InvariantViolation("slot invariant: Q > min(L, K)");
    }
}

int draw_num_active(double lambda, RandomSource& rng) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("draw_num_active: lambda must be nonnegative");
    if (lambda == 0.0) return 0;
    std::poisson_distribution<int> dist(lambda);
    return dist(rng);
}

std::vector<int> assign_preambles(int num_active, int num_preambles, RandomSource& rng) {
    if (num_active < 0 || num_preambles < 1) {
        throw std::invalid_argument("assign_preambles: need K >= 0 and L >= 1");
    }
    std::uniform_int_distribution<int> pick(1, num_preambles);
    std::vector<int> out(num_active);
    for (auto& l : out) l = pick(rng);
    return out;
}

SlotOutcome collision_stats(std::span<const int> assignment, int num_preambles) {
    SlotOutcome o;
    o.num_active = static_cast<int>(assignment.size());
    o.num_preambles = num_preambles;
    o.assignment.assign(assignment.begin(), assignment.end());
    o.occupancy.assign(num_preambles, 0);
    for (int l : assignment) {
        if (l < 1 || l > num_preambles) {
            throw std::invalid_argument("collision_stats: preamble index out of range");
        }
        ++o.occupancy[l - 1];
    }
    for (int l = 1; l <= num_preambles; ++l) {
        const int count = o.occupancy[l - 1];
        if (count == 0) continue;
        o.transmitted.push_back(l);
        if (count == 1) ++o.singletons;
        else ++o.collided_preambles;
    }
    o.collided.resize(assignment.size());
    for (std::size_t k = 0; k < assignment.size(); ++k) {
        o.collided[k] = o.occupancy[assignment[k] - 1] >= 2;
    }
    o.decodable.assign(assignment.size(), false);
    return o;
}

std::vector<int> assign_with_composition(int num_active, int num_preambles, int singletons,
                                         int collisions, RandomSource& rng, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        auto assignment = assign_preambles(num_active, num_preambles, rng);
        const auto o = collision_stats(assignment, num_preambles);
        if (o.singletons == singletons && o.collided_preambles == collisions) return assignment;
    }
    throw std::runtime_error("assign_with_composition: no matching assignment after " +
                             std::to_string(max_attempts) + " attempts");
}

PowerControl apply_power_control(double channel_gain, double rx_power, double max_power) {
    if (!(rx_power > 0.0) || !(max_power > 0.0)) {
        throw std::invalid_argument("apply_power_control: P_rx and P_max must be positive");
    }
    if (!(channel_gain > 0.0)) return {};
    const double p = rx_power / channel_gain;
    if (p > max_power) return {};
    return {true, p};
}

std::vector<double> draw_phases(int num_active, bool phase_compensation, RandomSource& rng) {
    std::vector<double> phases(num_active, 0.0);
    if (phase_compensation) return phases;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (auto& p : phases) p = angle(rng);
    return phases;
}

void to_json(nlohmann::json& j, const SlotOutcome& o) {
    std::vector<int> collided(o.collided.begin(), o.collided.end());
    std::vector<int> decodable(o.decodable.begin(), o.decodable.end());
    j = nlohmann::json{
        {"K", o.num_active},
        {"L", o.num_preambles},
        {"assignment", o.assignment},
        {"A", o.transmitted},
        {"U", o.singletons},
        {"W", o.collided_preambles},
        {"Q", o.distinct()},
        {"collided", collided},
        {"decodable", decodable},
    };
}

}  // namespace gfra
