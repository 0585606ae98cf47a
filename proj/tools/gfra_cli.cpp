// Command-line front end: detection curves, BER/PER sweeps, throughput runs
// and figure presets. Writes CSV files plus a JSON run manifest.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gfra/access_model.hpp"
#include "gfra/harness.hpp"
#include "gfra/sequences.hpp"
#include "gfra/system_config.hpp"

namespace fs = std::filesystem;
using gfra::SystemConfig;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitInvariant = 3;

/// Flag values; each is applied only when given on the command line.
struct Flags {
    std::optional<int> L, N, D, K;
    std::optional<double> lambda, snr_db, ebn0_db;
    std::optional<std::uint64_t> trials, seed;
    std::optional<unsigned> workers;
    std::optional<std::string> detector, mode, rounding;
    std::optional<int> singletons, collisions;
    bool phase_compensation = false;
    std::string config_file;
    std::string out_dir = ".";

    void apply(SystemConfig& c) const {
        if (L) c.num_preambles = *L;
        if (N) c.spreading_factor = *N;
        if (D) c.block_length = *D;
        if (lambda) {
            c.lambda = *lambda;
            c.fixed_active.reset();
        }
        if (K) {
            c.fixed_active = *K;
            c.lambda.reset();
        }
        if (snr_db) c.snr_db = *snr_db;
        if (ebn0_db) c.ebn0_db = *ebn0_db;
        if (trials) c.trials = *trials;
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (detector) c.detector = gfra::parse_detector(*detector);
        if (mode) c.mode = gfra::parse_mode(*mode);
        if (rounding) c.rounding = gfra::parse_rounding(*rounding);
        if (singletons) c.forced_singletons = *singletons;
        if (collisions) c.forced_collisions = *collisions;
        if (phase_compensation) c.phase_compensation = true;
    }

    /// defaults < config file < flags
    SystemConfig resolve(SystemConfig defaults) const {
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            if (!in) throw std::invalid_argument("cannot open config file '" + config_file + "'");
            defaults = gfra::parse_config(in, defaults);
        }
        apply(defaults);
        return defaults;
    }
};

void add_config_flags(CLI::App& app, Flags& f) {
    app.add_option("--L", f.L, "number of preambles");
    app.add_option("--N", f.N, "spreading factor");
    app.add_option("--D", f.D, "data symbols per TDMA block");
    app.add_option("--lambda", f.lambda, "mean number of active devices (Poisson)");
    app.add_option("--K", f.K, "fixed number of active devices");
    app.add_option("--snr-db", f.snr_db, "preamble-phase P_rx/N0 in dB");
    app.add_option("--ebn0-db", f.ebn0_db, "data-phase Eb/N0 in dB");
    app.add_option("--trials", f.trials, "Monte Carlo trials (slots)");
    app.add_option("--seed", f.seed, "master seed");
    app.add_option("--workers", f.workers, "worker threads (0 = all cores)");
    app.add_option("--detector", f.detector, "mmse or mmse-lr");
    app.add_option("--mode", f.mode, "abstract or phy");
    app.add_option("--rounding", f.rounding, "round, floor or continuous");
    app.add_option("--singletons", f.singletons, "force this many singleton preambles (PHY)");
    app.add_option("--collisions", f.collisions, "force this many collided preambles (PHY)");
    app.add_flag("--phase-compensation", f.phase_compensation, "devices pre-compensate their channel phase");
    app.add_option("--config", f.config_file, "key = value configuration file");
    app.add_option("--out", f.out_dir, "output directory");
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Run {
public:
    Run(std::string command, std::string out_dir)
        : command_(std::move(command)), out_dir_(std::move(out_dir)),
          started_(std::chrono::steady_clock::now()), started_at_(timestamp_utc()) {
        fs::create_directories(out_dir_);
    }

    void write(const gfra::CurveSet& curves) {
        const fs::path path = fs::path(out_dir_) / (curves.name + ".csv");
        std::ofstream out(path, std::ios::binary);
        gfra::write_csv(out, curves);
        if (!out) throw std::runtime_error("failed to write " + path.string());
        outputs_.push_back(path.string());
    }

    void finish(const SystemConfig& config, const nlohmann::json& extra = {}) {
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        nlohmann::json manifest{
            {"version", gfra::version_string()},
            {"command", command_},
            {"config", config},
            {"seed", config.seed},
            {"outputs", outputs_},
            {"started_at", started_at_},
            {"wall_clock_seconds", seconds},
        };
        for (const auto& [key, value] : extra.items()) manifest[key] = value;
        const fs::path path = fs::path(out_dir_) / (command_ + "_manifest.json");
        std::ofstream out(path);
        out << manifest.dump(2) << '\n';
        for (const auto& o : outputs_) std::cout << o << '\n';
        std::cout << path.string() << '\n';
    }

private:
    std::string command_;
    std::string out_dir_;
    std::chrono::steady_clock::time_point started_;
    std::string started_at_;
    std::vector<std::string> outputs_;
};

std::vector<double> parse_grid(const std::string& spec) {
    // start:step:stop
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
    if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
        throw std::invalid_argument("grid must be start:step:stop with step > 0 and stop >= start");
    }
    std::vector<double> grid;
    for (double v = parts[0]; v <= parts[2] + 1e-9; v += parts[1]) grid.push_back(v);
    return grid;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("threshold grid is empty");
    if (!(lo > 0.0)) throw std::invalid_argument("thresholds must be positive");
    if (hi < lo) throw std::invalid_argument("tau-max must not be below tau-min");
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) grid.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grant-free random access simulator: CDMA vs TDMA data phase"};
    app.require_subcommand(1);
    app.fallthrough();

    Flags flags;
    add_config_flags(app, flags);

    auto* detect = app.add_subcommand("detect-curves", "missed-detection / false-alarm curves");
    double tau_min = 1.0;
    double tau_max = 20.0;
    int tau_points = 20;
    bool coherent = false;
    detect->add_option("--tau-min", tau_min, "smallest threshold, in units of N0");
    detect->add_option("--tau-max", tau_max, "largest threshold, in units of N0");
    detect->add_option("--tau-points", tau_points, "number of thresholds");
    detect->add_flag("--coherent", coherent, "use the phase-compensated Re(z) test");

    auto* ber = app.add_subcommand("ber", "PHY-level BER / PER");
    std::string ebn0_grid;
    ber->add_option("--ebn0-grid", ebn0_grid, "Eb/N0 sweep as start:step:stop (dB)");

    auto* throughput = app.add_subcommand("throughput", "abstract throughput and spectral efficiency");

    auto* figure = app.add_subcommand("figure", "run a figure preset");
    std::string preset;
    app.add_option("--preset", preset, "figure preset id");

    auto* sequences = app.add_subcommand("sequences", "export preamble and spreading sequences");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*detect) {
            SystemConfig defaults;
            defaults.snr_db = 10.0;
            defaults.trials = 100000;
            const SystemConfig config = flags.resolve(defaults);
            gfra::validate(config);
            const auto taus = linear_grid(tau_min, tau_max, tau_points);
            Run run("detect-curves", flags.out_dir);
            run.write(gfra::detection_curve_set("detect-curves", coherent ? "detect_coherent" : "detect_noncoherent",
                                                config, taus, coherent));
            run.finish(config, {{"test", coherent ? "coherent" : "noncoherent"}, {"taus", taus}});
        } else if (*ber) {
            SystemConfig defaults = gfra::scenario_config("fig4-ber");
            defaults.forced_singletons = -1;
            defaults.forced_collisions = -1;
            const SystemConfig config = flags.resolve(defaults);
            gfra::validate(config);
            const std::vector<double> grid = ebn0_grid.empty() ? std::vector<double>{config.ebn0_db}
                                                               : parse_grid(ebn0_grid);
            Run run("ber", flags.out_dir);
            run.write(gfra::phy_sweep("ber", "ber", config, "ebn0_db", grid,
                                      [](SystemConfig& c, double x) { c.ebn0_db = x; }));
            run.finish(config, {{"ebn0_grid", grid}});
        } else if (*throughput) {
            const SystemConfig config = flags.resolve(SystemConfig{});
            gfra::validate(config);
            Run run("throughput", flags.out_dir);
            const bool poisson = config.lambda.has_value();
            const double x = poisson ? *config.lambda : *config.fixed_active;
            auto curves = gfra::abstract_sweep("throughput", config, poisson ? "lambda" : "K", {x},
                                               [](SystemConfig&, double) {});
            for (const auto& c : curves) run.write(c);
            run.finish(config);
        } else if (*figure) {
            if (preset.empty()) throw std::invalid_argument("figure requires --preset");
            gfra::scenario_config(preset);  // rejects unknown ids before any work
            Run run("figure-" + preset, flags.out_dir);
            const auto result =
                gfra::run_scenario(preset, [&](SystemConfig& c) { c = flags.resolve(c); });
            for (const auto& c : result.curves) run.write(c);
            run.finish(result.config, {{"preset", preset}});
        } else if (*sequences) {
            SystemConfig defaults;
            defaults.spreading_factor = 11;
            const SystemConfig config = flags.resolve(defaults);
            gfra::validate(config);
            const auto family = gfra::gen_alltop_family(config.spreading_factor);
            auto rng = gfra::trial_rng(config.seed, gfra::Stream::Sequences, 0);
            const auto spreading = gfra::select_spreading(family, config.num_preambles, rng);
            const auto preambles = gfra::gen_preambles(config.num_preambles);
            fs::create_directories(flags.out_dir);
            std::ofstream p(fs::path(flags.out_dir) / "preambles.csv");
            gfra::write_sequences_csv(p, preambles.vectors);
            std::ofstream s(fs::path(flags.out_dir) / "spreading.csv");
            gfra::write_sequences_csv(s, spreading.vectors);
            std::cout << "coherence(preambles) = " << gfra::coherence(preambles) << '\n'
                      << "coherence(spreading) = " << gfra::coherence(spreading) << '\n';
        }
    } catch (const gfra::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return 0;
}
