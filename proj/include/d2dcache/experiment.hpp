#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "d2dcache/errors.hpp"
#include "d2dcache/workload.hpp"

namespace d2dcache {

enum class IntensitySource { true_profile, estimated, both };
enum class TransmissionSetting { none, unicast, broadcast };
enum class TopologyMode { disk, ring, cluster };

/// One experiment run: scenario parameters, sweep axis and seeds. Every leaf
/// can be set from a config file or a --set override; see field_names().
struct ScenarioConfig {
    std::string scenario = "custom";

    int n_users = 25;
    int n_files = 100;
    int cache_mu = 30;
    int update_budget = -1;  // xi per user and cycle; -1 = unconstrained

    PopularityMode popularity_mode = PopularityMode::independent;
    double zipf_beta = 0.25;
    double min_intensity = 2.0;   // per-period mean of the least popular file
    double period_frames = 1000.0;  // behavior period L (frame duration is 1)
    double bump_width_frac = 0.1;
    double peak_multiplier = 5.0;

    int sample_periods = 10;  // N_T observed by the estimator
    IntensitySource intensity_source = IntensitySource::true_profile;

    int cycles = 1;
    int cycles_per_period = 100;

    TopologyMode topology_mode = TopologyMode::disk;
    double cell_radius_km = 1.5;
    double bs_power_db = 16.9;   // 10*log10 of P/(B sigma^2)
    double user_power_db = 13.0;
    double file_size_bits = 96.13;
    int mc_samples = 4000;  // Monte-Carlo draws per link

    TransmissionSetting transmission_mode = TransmissionSetting::none;
    int sim_slots = 400;
    int requests_per_slot = 1;  // per user

    int est_pairs = 3;  // <user,file> pairs scored per estimation-error point
    std::string est_curve_param = "none";  // none | sample_periods | min_intensity
    std::vector<double> est_curve_values;

    std::vector<std::string> policies = {"proposed", "naive"};

    std::string sweep_param = "none";  // config field, or "none" / "cycle"
    std::vector<double> sweep_values;

    std::uint64_t master_seed = 1;
    int replicates = 10;
    int threads = 1;
};

/// Leaf access by name. Setters parse the string form; unknown keys or
/// malformed values raise config_error.
std::vector<std::string> config_field_names();
void set_config_field(ScenarioConfig& config, const std::string& key, const std::string& value);
std::string get_config_field(const ScenarioConfig& config, const std::string& key);

/// `key = value` per line, '#' comments. Round-trips with serialize_config.
std::map<std::string, std::string> parse_config_text(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path, const ScenarioConfig& defaults);
std::string serialize_config(const ScenarioConfig& config);

/// Full validation; throws config_error listing every violated constraint.
void validate_config(const ScenarioConfig& config);

struct ResultRow {
    double sweep_value = 0.0;
    std::string policy;
    std::string metric;
    double value = 0.0;
    std::uint64_t seed = 0;
    int replicate = 0;  // -1 marks aggregate rows (mean / std over replicates)
};

struct ResultTable {
    std::string scenario;
    std::string sweep_param;
    std::vector<ResultRow> rows;
};

/// Header `scenario,sweep_param,sweep_value,policy,metric,value,seed,replicate`,
/// LF endings, round-trip float precision, rows sorted by
/// (sweep_value, policy, replicate, metric).
std::string csv_string(const ResultTable& table);
void emit_csv(const ResultTable& table, const std::string& path);
ResultTable parse_csv_file(const std::string& path);

struct ScenarioDescriptor {
    std::string name;
    std::string description;
    ScenarioConfig config;
};

/// The nine bundled experiment presets.
const std::vector<ScenarioDescriptor>& registered_scenarios();
const ScenarioDescriptor* find_scenario(const std::string& name);

/// Runs every sweep point and replicate, deterministically for a fixed master
/// seed and independent of the thread count.
ResultTable run_scenario(const ScenarioConfig& config);

/// CLI entry point (subcommands: list, run, validate). Returns the process
/// exit code: 0 success, 2 configuration error, 3 runtime error.
int cli_main(int argc, const char* const* argv);

}  // namespace d2dcache
