#include "gfra/system_config.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace gfra {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("config: invalid value '" + value + "' for key '" + key + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    // from_chars for double is not available in every libstdc++ we target.
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty()) {
        throw std::invalid_argument("config: invalid value '" + value + "' for key '" + key + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config: invalid boolean '" + value + "' for key '" + key + "'");
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void validate(const SystemConfig& c) {
    if (c.num_preambles < 1) throw std::invalid_argument("L must be at least 1");
    if (c.spreading_factor < 1) throw std::invalid_argument("N must be at least 1");
    if (c.spreading_factor > c.num_preambles) {
        throw std::invalid_argument("N > L is not allowed: the model requires N <= L "
                                    "(N = L is already equivalent to TDMA)");
    }
    if (c.block_length < 1) throw std::invalid_argument("D must be at least 1");
    if (c.lambda.has_value() == c.fixed_active.has_value()) {
        throw std::invalid_argument("exactly one of lambda or K must be set");
    }
    if (c.lambda && !(*c.lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (c.fixed_active && *c.fixed_active < 0) throw std::invalid_argument("K must be nonnegative");
    if (c.trials == 0) throw std::invalid_argument("trials must be positive");
    if ((c.forced_singletons >= 0) != (c.forced_collisions >= 0)) {
        throw std::invalid_argument("forced_singletons and forced_collisions must be set together");
    }
    if (c.forced_singletons >= 0) {
        if (!c.fixed_active) throw std::invalid_argument("a forced composition requires a fixed K");
        const int K = *c.fixed_active;
        const int U = c.forced_singletons;
        const int W = c.forced_collisions;
        if (U + 2 * W > K || (W == 0 && U != K) || U + W > c.num_preambles) {
            throw std::invalid_argument("forced composition is infeasible for the given K and L");
        }
    }
}

std::string to_string(Detector d) { return d == Detector::Mmse ? "mmse" : "mmse-lr"; }
std::string to_string(SimulationMode m) { return m == SimulationMode::Abstract ? "abstract" : "phy"; }
std::string to_string(CdfRounding r) {
    switch (r) {
        case CdfRounding::Round: return "round";
        case CdfRounding::Floor: return "floor";
        case CdfRounding::Continuous: return "continuous";
    }
    return "round";
}

Detector parse_detector(const std::string& text) {
    if (text == "mmse") return Detector::Mmse;
    if (text == "mmse-lr") return Detector::MmseLr;
    throw std::invalid_argument("unknown detector '" + text + "' (expected mmse or mmse-lr)");
}

SimulationMode parse_mode(const std::string& text) {
    if (text == "abstract") return SimulationMode::Abstract;
    if (text == "phy") return SimulationMode::Phy;
    throw std::invalid_argument("unknown mode '" + text + "' (expected abstract or phy)");
}

CdfRounding parse_rounding(const std::string& text) {
    if (text == "round") return CdfRounding::Round;
    if (text == "floor") return CdfRounding::Floor;
    if (text == "continuous") return CdfRounding::Continuous;
    throw std::invalid_argument("unknown rounding '" + text + "' (expected round, floor or continuous)");
}

SystemConfig parse_config(std::istream& in, SystemConfig c) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "L") c.num_preambles = parse_number<int>(key, value);
        else if (key == "N") c.spreading_factor = parse_number<int>(key, value);
        else if (key == "D") c.block_length = parse_number<int>(key, value);
        else if (key == "lambda") {
            c.lambda = parse_real(key, value);
            c.fixed_active.reset();
        } else if (key == "K") {
            c.fixed_active = parse_number<int>(key, value);
            c.lambda.reset();
        } else if (key == "snr_db") c.snr_db = parse_real(key, value);
        else if (key == "ebn0_db") c.ebn0_db = parse_real(key, value);
        else if (key == "phase_compensation") c.phase_compensation = parse_bool(key, value);
        else if (key == "trials") c.trials = parse_number<std::uint64_t>(key, value);
        else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "workers") c.workers = parse_number<unsigned>(key, value);
        else if (key == "detector") c.detector = parse_detector(value);
        else if (key == "mode") c.mode = parse_mode(value);
        else if (key == "rounding") c.rounding = parse_rounding(value);
        else if (key == "forced_singletons") c.forced_singletons = parse_number<int>(key, value);
        else if (key == "forced_collisions") c.forced_collisions = parse_number<int>(key, value);
        else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    return c;
}

SystemConfig parse_config_text(const std::string& text, SystemConfig base) {
    std::istringstream in(text);
    return parse_config(in, std::move(base));
}

std::string emit_config(const SystemConfig& c) {
    std::ostringstream out;
    out << "L = " << c.num_preambles << '\n';
    out << "N = " << c.spreading_factor << '\n';
    out << "D = " << c.block_length << '\n';
    if (c.lambda) out << "lambda = " << format_real(*c.lambda) << '\n';
    if (c.fixed_active) out << "K = " << *c.fixed_active << '\n';
    out << "snr_db = " << format_real(c.snr_db) << '\n';
    out << "ebn0_db = " << format_real(c.ebn0_db) << '\n';
    out << "phase_compensation = " << (c.phase_compensation ? "true" : "false") << '\n';
    out << "trials = " << c.trials << '\n';
    out << "seed = " << c.seed << '\n';
    out << "workers = " << c.workers << '\n';
    out << "detector = " << to_string(c.detector) << '\n';
    out << "mode = " << to_string(c.mode) << '\n';
    out << "rounding = " << to_string(c.rounding) << '\n';
    out << "forced_singletons = " << c.forced_singletons << '\n';
    out << "forced_collisions = " << c.forced_collisions << '\n';
    return out.str();
}

void to_json(nlohmann::json& j, const SystemConfig& c) {
    j = nlohmann::json{
        {"L", c.num_preambles},
        {"N", c.spreading_factor},
        {"D", c.block_length},
        {"snr_db", c.snr_db},
        {"ebn0_db", c.ebn0_db},
        {"phase_compensation", c.phase_compensation},
        {"trials", c.trials},
        {"seed", c.seed},
        {"workers", c.workers},
        {"detector", to_string(c.detector)},
        {"mode", to_string(c.mode)},
        {"rounding", to_string(c.rounding)},
        {"forced_singletons", c.forced_singletons},
        {"forced_collisions", c.forced_collisions},
    };
    if (c.lambda) j["lambda"] = *c.lambda;
    if (c.fixed_active) j["K"] = *c.fixed_active;
    j["config_text"] = emit_config(c);
}

}  // namespace gfra
