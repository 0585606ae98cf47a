#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace gfra {

enum class Detector { Mmse, MmseLr };
enum class SimulationMode { Abstract, Phy };

/// How the non-integer N + Qbar index enters the Poisson cdf of the CDMA
/// throughput approximation.
enum class CdfRounding { Round, Floor, Continuous };

/// All scenario parameters. Activity is either Poisson with mean `lambda`
/// or a fixed device count `fixed_active`; exactly one is set.
struct SystemConfig {
    int num_preambles = 20;      // L
    int spreading_factor = 10;   // N
    int block_length = 200;      // D, data symbols per TDMA block
    std::optional<double> lambda = 10.0;
    std::optional<int> fixed_active;  // K
    double snr_db = 10.0;        // P_rx / N0 during the preamble phase
    double ebn0_db = 10.0;       // E_b / N0 during the data phase
    bool phase_compensation = false;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    Detector detector = Detector::MmseLr;
    SimulationMode mode = SimulationMode::Abstract;
    CdfRounding rounding = CdfRounding::Round;

    // Constrained slot composition for the PHY runs (singleton preambles and
    // collided preambles); negative means unconstrained.
    int forced_singletons = -1;
    int forced_collisions = -1;

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const SystemConfig& config);

std::string to_string(Detector d);
std::string to_string(SimulationMode m);
std::string to_string(CdfRounding r);
Detector parse_detector(const std::string& text);
SimulationMode parse_mode(const std::string& text);
CdfRounding parse_rounding(const std::string& text);

/// Key-value text format: one `key = value` per line, `#` starts a comment.
/// Unknown keys are rejected. Keys absent from the text keep the values
/// already present in `base`.
SystemConfig parse_config(std::istream& in, SystemConfig base = {});
SystemConfig parse_config_text(const std::string& text, SystemConfig base = {});
std::string emit_config(const SystemConfig& config);

void to_json(nlohmann::json& j, const SystemConfig& config);

}  // namespace gfra
