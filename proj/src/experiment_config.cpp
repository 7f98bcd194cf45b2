#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "d2dcache/experiment.hpp"

namespace d2dcache {

namespace {

std::string format_double_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("invalid numeric value for '" + key + "': " + value);
    }
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw config_error("expected an integer for '" + key + "'");
    return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw config_error("invalid unsigned value for '" + key + "': " + value);
    return v;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(key, item));
    return out;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += format_double_short(values[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += values[i];
    }
    return out;
}

template <typename E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<PopularityMode> kPopularityNames[] = {
    {PopularityMode::independent, "independent"},
    {PopularityMode::identical, "identical"},
    {PopularityMode::scripted, "scripted"},
};
constexpr EnumName<IntensitySource> kIntensityNames[] = {
    {IntensitySource::true_profile, "true"},
    {IntensitySource::estimated, "estimated"},
    {IntensitySource::both, "both"},
};
constexpr EnumName<TransmissionSetting> kTransmissionNames[] = {
    {TransmissionSetting::none, "none"},
    {TransmissionSetting::unicast, "unicast"},
    {TransmissionSetting::broadcast, "broadcast"},
};
constexpr EnumName<TopologyMode> kTopologyNames[] = {
    {TopologyMode::disk, "disk"},
    {TopologyMode::ring, "ring"},
    {TopologyMode::cluster, "cluster"},
};

template <typename E, std::size_t N>
std::string enum_to_string(const EnumName<E> (&table)[N], E value) {
    for (const auto& entry : table)
        if (entry.value == value) return entry.name;
    return "?";
}

template <typename E, std::size_t N>
E enum_from_string(const EnumName<E> (&table)[N], const std::string& key,
                   const std::string& value) {
    for (const auto& entry : table)
        if (value == entry.name) return entry.value;
    std::string allowed;
    for (const auto& entry : table) {
        if (!allowed.empty()) allowed += "|";
        allowed += entry.name;
    }
    throw config_error("invalid value for '" + key + "': " + value + " (expected " + allowed + ")");
}

struct FieldDef {
    const char* name;
    std::function<std::string(const ScenarioConfig&)> get;
    std::function<void(ScenarioConfig&, const std::string&)> set;
};

const std::vector<FieldDef>& field_table() {
    static const std::vector<FieldDef> fields = {
        {"scenario", [](const ScenarioConfig& c) { return c.scenario; },
         [](ScenarioConfig& c, const std::string& v) { c.scenario = v; }},
        {"n_users", [](const ScenarioConfig& c) { return std::to_string(c.n_users); },
         [](ScenarioConfig& c, const std::string& v) { c.n_users = parse_int("n_users", v); }},
        {"n_files", [](const ScenarioConfig& c) { return std::to_string(c.n_files); },
         [](ScenarioConfig& c, const std::string& v) { c.n_files = parse_int("n_files", v); }},
        {"cache_mu", [](const ScenarioConfig& c) { return std::to_string(c.cache_mu); },
         [](ScenarioConfig& c, const std::string& v) { c.cache_mu = parse_int("cache_mu", v); }},
        {"update_budget", [](const ScenarioConfig& c) { return std::to_string(c.update_budget); },
         [](ScenarioConfig& c, const std::string& v) {
             c.update_budget = parse_int("update_budget", v);
         }},
        {"popularity_mode",
         [](const ScenarioConfig& c) { return enum_to_string(kPopularityNames, c.popularity_mode); },
         [](ScenarioConfig& c, const std::string& v) {
             c.popularity_mode = enum_from_string(kPopularityNames, "popularity_mode", v);
         }},
        {"zipf_beta", [](const ScenarioConfig& c) { return format_double_short(c.zipf_beta); },
         [](ScenarioConfig& c, const std::string& v) { c.zipf_beta = parse_double("zipf_beta", v); }},
        {"min_intensity",
         [](const ScenarioConfig& c) { return format_double_short(c.min_intensity); },
         [](ScenarioConfig& c, const std::string& v) {
             c.min_intensity = parse_double("min_intensity", v);
         }},
        {"period_frames",
         [](const ScenarioConfig& c) { return format_double_short(c.period_frames); },
         [](ScenarioConfig& c, const std::string& v) {
             c.period_frames = parse_double("period_frames", v);
         }},
        {"bump_width_frac",
         [](const ScenarioConfig& c) { return format_double_short(c.bump_width_frac); },
         [](ScenarioConfig& c, const std::string& v) {
             c.bump_width_frac = parse_double("bump_width_frac", v);
         }},
        {"peak_multiplier",
         [](const ScenarioConfig& c) { return format_double_short(c.peak_multiplier); },
         [](ScenarioConfig& c, const std::string& v) {
             c.peak_multiplier = parse_double("peak_multiplier", v);
         }},
        {"sample_periods", [](const ScenarioConfig& c) { return std::to_string(c.sample_periods); },
         [](ScenarioConfig& c, const std::string& v) {
             c.sample_periods = parse_int("sample_periods", v);
         }},
        {"intensity_source",
         [](const ScenarioConfig& c) { return enum_to_string(kIntensityNames, c.intensity_source); },
         [](ScenarioConfig& c, const std::string& v) {
             c.intensity_source = enum_from_string(kIntensityNames, "intensity_source", v);
         }},
        {"cycles", [](const ScenarioConfig& c) { return std::to_string(c.cycles); },
         [](ScenarioConfig& c, const std::string& v) { c.cycles = parse_int("cycles", v); }},
        {"cycles_per_period",
         [](const ScenarioConfig& c) { return std::to_string(c.cycles_per_period); },
         [](ScenarioConfig& c, const std::string& v) {
             c.cycles_per_period = parse_int("cycles_per_period", v);
         }},
        {"topology_mode",
         [](const ScenarioConfig& c) { return enum_to_string(kTopologyNames, c.topology_mode); },
         [](ScenarioConfig& c, const std::string& v) {
             c.topology_mode = enum_from_string(kTopologyNames, "topology_mode", v);
         }},
        {"cell_radius_km",
         [](const ScenarioConfig& c) { return format_double_short(c.cell_radius_km); },
         [](ScenarioConfig& c, const std::string& v) {
             c.cell_radius_km = parse_double("cell_radius_km", v);
         }},
        {"bs_power_db", [](const ScenarioConfig& c) { return format_double_short(c.bs_power_db); },
         [](ScenarioConfig& c, const std::string& v) {
             c.bs_power_db = parse_double("bs_power_db", v);
         }},
        {"user_power_db",
         [](const ScenarioConfig& c) { return format_double_short(c.user_power_db); },
         [](ScenarioConfig& c, const std::string& v) {
             c.user_power_db = parse_double("user_power_db", v);
         }},
        {"file_size_bits",
         [](const ScenarioConfig& c) { return format_double_short(c.file_size_bits); },
         [](ScenarioConfig& c, const std::string& v) {
             c.file_size_bits = parse_double("file_size_bits", v);
         }},
        {"mc_samples", [](const ScenarioConfig& c) { return std::to_string(c.mc_samples); },
         [](ScenarioConfig& c, const std::string& v) { c.mc_samples = parse_int("mc_samples", v); }},
        {"transmission_mode",
         [](const ScenarioConfig& c) {
             return enum_to_string(kTransmissionNames, c.transmission_mode);
         },
         [](ScenarioConfig& c, const std::string& v) {
             c.transmission_mode = enum_from_string(kTransmissionNames, "transmission_mode", v);
         }},
        {"sim_slots", [](const ScenarioConfig& c) { return std::to_string(c.sim_slots); },
         [](ScenarioConfig& c, const std::string& v) { c.sim_slots = parse_int("sim_slots", v); }},
        {"requests_per_slot",
         [](const ScenarioConfig& c) { return std::to_string(c.requests_per_slot); },
         [](ScenarioConfig& c, const std::string& v) {
             c.requests_per_slot = parse_int("requests_per_slot", v);
         }},
        {"est_pairs", [](const ScenarioConfig& c) { return std::to_string(c.est_pairs); },
         [](ScenarioConfig& c, const std::string& v) { c.est_pairs = parse_int("est_pairs", v); }},
        {"est_curve_param", [](const ScenarioConfig& c) { return c.est_curve_param; },
         [](ScenarioConfig& c, const std::string& v) { c.est_curve_param = v; }},
        {"est_curve_values",
         [](const ScenarioConfig& c) { return join_doubles(c.est_curve_values); },
         [](ScenarioConfig& c, const std::string& v) {
             c.est_curve_values = parse_double_list("est_curve_values", v);
         }},
        {"policies", [](const ScenarioConfig& c) { return join_strings(c.policies); },
         [](ScenarioConfig& c, const std::string& v) { c.policies = split_list(v); }},
        {"sweep_param", [](const ScenarioConfig& c) { return c.sweep_param; },
         [](ScenarioConfig& c, const std::string& v) { c.sweep_param = v; }},
        {"sweep_values", [](const ScenarioConfig& c) { return join_doubles(c.sweep_values); },
         [](ScenarioConfig& c, const std::string& v) {
             c.sweep_values = parse_double_list("sweep_values", v);
         }},
        {"master_seed", [](const ScenarioConfig& c) { return std::to_string(c.master_seed); },
         [](ScenarioConfig& c, const std::string& v) { c.master_seed = parse_u64("master_seed", v); }},
        {"replicates", [](const ScenarioConfig& c) { return std::to_string(c.replicates); },
         [](ScenarioConfig& c, const std::string& v) { c.replicates = parse_int("replicates", v); }},
        {"threads", [](const ScenarioConfig& c) { return std::to_string(c.threads); },
         [](ScenarioConfig& c, const std::string& v) { c.threads = parse_int("threads", v); }},
    };
    return fields;
}

const FieldDef* find_field(const std::string& key) {
    for (const auto& f : field_table())
        if (key == f.name) return &f;
    return nullptr;
}

}  // namespace

std::vector<std::string> config_field_names() {
    std::vector<std::string> names;
    for (const auto& f : field_table()) names.push_back(f.name);
    return names;
}

void set_config_field(ScenarioConfig& config, const std::string& key, const std::string& value) {
    const FieldDef* field = find_field(key);
    if (!field) throw config_error("unknown configuration key: " + key);
    field->set(config, value);
}

std::string get_config_field(const ScenarioConfig& config, const std::string& key) {
    const FieldDef* field = find_field(key);
    if (!field) throw config_error("unknown configuration key: " + key);
    return field->get(config);
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t\r");
            if (x == std::string::npos) return std::string();
            const auto y = s.find_last_not_of(" \t\r");
            return s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("config line " + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

ScenarioConfig parse_config_file(const std::string& path, const ScenarioConfig& defaults) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ScenarioConfig config = defaults;
    for (const auto& [key, value] : parse_config_text(buffer.str()))
        set_config_field(config, key, value);
    return config;
}

std::string serialize_config(const ScenarioConfig& config) {
    std::string out;
    for (const auto& f : field_table()) {
        out += f.name;
        out += " = ";
        out += f.get(config);
        out += "\n";
    }
    return out;
}

void validate_config(const ScenarioConfig& config) {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) problems.push_back(message);
    };
    require(config.n_users >= 1, "n_users must be >= 1");
    require(config.n_files >= 1, "n_files must be >= 1");
    require(config.cache_mu >= 0 && config.cache_mu <= config.n_files,
            "cache_mu must satisfy 0 <= mu <= n_files");
    require(config.update_budget >= -1, "update_budget must be >= -1");
    require(config.zipf_beta >= 0.0, "zipf_beta must be >= 0");
    require(config.min_intensity > 0.0, "min_intensity must be positive");
    require(config.period_frames > 0.0, "period_frames must be positive");
    require(config.bump_width_frac > 0.0 && config.bump_width_frac <= 0.5,
            "bump_width_frac must lie in (0, 0.5]");
    require(config.peak_multiplier >= 1.0, "peak_multiplier must be >= 1");
    require(config.sample_periods >= 1, "sample_periods must be >= 1");
    require(config.cycles >= 1, "cycles must be >= 1");
    require(config.cycles_per_period >= 1, "cycles_per_period must be >= 1");
    require(config.cell_radius_km > 0.0, "cell_radius_km must be positive");
    require(config.file_size_bits > 0.0, "file_size_bits must be positive");
    require(config.mc_samples >= 1, "mc_samples must be >= 1");
    require(config.sim_slots >= 1, "sim_slots must be >= 1");
    require(config.requests_per_slot >= 1, "requests_per_slot must be >= 1");
    require(config.est_pairs >= 1, "est_pairs must be >= 1");
    require(config.replicates >= 1, "replicates must be >= 1");
    require(config.threads >= 1, "threads must be >= 1");

    if (config.popularity_mode == PopularityMode::scripted)
        require(config.n_users == 3 && config.n_files == 21,
                "scripted popularity requires n_users = 3 and n_files = 21");

    const bool est_scenario = config.est_curve_param != "none";
    if (est_scenario) {
        const bool known_param = config.est_curve_param == "sample_periods" ||
                                 config.est_curve_param == "min_intensity";
        require(known_param, "est_curve_param must be none, sample_periods or min_intensity");
        require(!config.est_curve_values.empty(),
                "est_curve_values must be non-empty for estimation scenarios");
        for (double v : config.est_curve_values) {
            require(v > 0.0, "est_curve_values entries must be positive");
            if (known_param && v > 0.0) {
                ScenarioConfig probe = config;
                try {
                    set_config_field(probe, config.est_curve_param, format_double_short(v));
                } catch (const config_error& e) {
                    problems.push_back("est curve value " + format_double_short(v) + ": " +
                                       e.what());
                }
            }
        }
    } else {
        require(!config.policies.empty(), "policies must not be empty");
    }
    for (const auto& p : config.policies)
        require(p == "proposed" || p == "naive" || p == "probabilistic" || p == "exhaustive",
                "unknown policy: " + p);

    if (config.sweep_param != "none" && config.sweep_param != "cycle") {
        require(find_field(config.sweep_param) != nullptr,
                "sweep_param is not a configuration field: " + config.sweep_param);
        require(!config.sweep_values.empty(), "sweep_values must be non-empty for a sweep");
        if (find_field(config.sweep_param) != nullptr && !config.sweep_values.empty()) {
            for (double v : config.sweep_values) {
                ScenarioConfig probe = config;
                probe.sweep_param = "none";
                probe.sweep_values.clear();
                try {
                    set_config_field(probe, config.sweep_param, format_double_short(v));
                    validate_config(probe);
                } catch (const config_error& e) {
                    problems.push_back("sweep value " + format_double_short(v) + ": " + e.what());
                }
            }
        }
    }

    if (!problems.empty()) {
        std::string message = "invalid configuration:";
        for (const auto& p : problems) message += "\n  - " + p;
        throw config_error(message);
    }
}

const std::vector<ScenarioDescriptor>& registered_scenarios() {
    static const std::vector<ScenarioDescriptor> scenarios = [] {
        std::vector<ScenarioDescriptor> list;

        {
            ScenarioDescriptor d;
            d.name = "est-error-vs-minintensity";
            d.description = "intensity estimation error vs. the per-period mean of the least "
                            "popular file, one curve per observation-period count";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 25;
            c.n_files = 100;
            c.cache_mu = 30;
            c.policies = {};
            c.est_curve_param = "sample_periods";
            c.est_curve_values = {1, 10, 100};
            c.sweep_param = "min_intensity";
            c.sweep_values = {40, 100, 400};
            c.est_pairs = 3;
            c.replicates = 5;
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "est-error-vs-NT";
            d.description = "intensity estimation error vs. the number of observed behavior "
                            "periods, one curve per minimum-intensity level";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 7;
            c.n_files = 15;
            c.cache_mu = 4;
            c.policies = {};
            c.est_curve_param = "min_intensity";
            c.est_curve_values = {40, 100, 400};
            c.sweep_param = "sample_periods";
            c.sweep_values = {1, 2, 5, 10, 20, 50, 100};
            c.est_pairs = 3;
            c.replicates = 3;
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "table-cache-states";
            d.description = "scripted 3-user run tracking per-cycle cache contents of the "
                            "greedy and naive policies";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 3;
            c.n_files = 21;
            c.cache_mu = 3;
            c.popularity_mode = PopularityMode::scripted;
            c.topology_mode = TopologyMode::cluster;
            c.intensity_source = IntensitySource::true_profile;
            c.cycles = 100;
            c.cycles_per_period = 100;
            c.min_intensity = 2.0;
            c.mc_samples = 10000;
            c.replicates = 1;
            c.sweep_param = "cycle";
            c.policies = {"proposed", "naive"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "fig-delay-vs-mu";
            d.description = "average delay vs. cache size, greedy and naive policies under "
                            "true and estimated intensities";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 25;
            c.n_files = 100;
            c.zipf_beta = 0.5;
            c.min_intensity = 10.0;
            c.intensity_source = IntensitySource::both;
            c.sweep_param = "cache_mu";
            c.sweep_values = {5, 10, 20, 30, 40, 50, 75, 100};
            c.policies = {"proposed", "naive"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "fig-delay-vs-N";
            d.description = "average delay vs. user count on a fixed-radius ring, true and "
                            "estimated intensities";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_files = 100;
            c.cache_mu = 25;
            c.zipf_beta = 0.5;
            c.min_intensity = 10.0;
            c.intensity_source = IntensitySource::both;
            c.topology_mode = TopologyMode::ring;
            c.sweep_param = "n_users";
            c.sweep_values = {1, 2, 5, 10, 15, 20, 25};
            c.policies = {"proposed", "naive"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "table-broadcast";
            d.description = "realized average delay of the transmission phase with and "
                            "without broadcast grouping";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 25;
            c.n_files = 100;
            c.cache_mu = 30;
            c.zipf_beta = 0.25;
            c.intensity_source = IntensitySource::estimated;
            c.transmission_mode = TransmissionSetting::broadcast;
            c.sim_slots = 600;
            c.replicates = 5;
            c.policies = {"proposed", "naive"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "fig-delay-vs-beta";
            d.description = "average delay vs. Zipf exponent with known popularity";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 25;
            c.n_files = 100;
            c.cache_mu = 30;
            c.peak_multiplier = 1.0;  // stationary request mix: popularity is known
            c.cell_radius_km = 1.8;
            c.bs_power_db = 23.0;
            c.user_power_db = 20.0;
            c.file_size_bits = 11.29;
            c.sweep_param = "zipf_beta";
            c.sweep_values = {0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
            c.policies = {"proposed", "naive", "probabilistic"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "fig-delay-vs-mu-zipf";
            d.description = "average delay vs. cache size with known Zipf popularity";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_users = 25;
            c.n_files = 100;
            c.zipf_beta = 0.1;
            c.peak_multiplier = 1.0;
            c.cell_radius_km = 1.8;
            c.bs_power_db = 23.0;
            c.user_power_db = 20.0;
            c.file_size_bits = 11.29;
            c.sweep_param = "cache_mu";
            c.sweep_values = {5, 10, 20, 30, 40, 50, 75, 100};
            c.policies = {"proposed", "naive", "probabilistic"};
            list.push_back(std::move(d));
        }
        {
            ScenarioDescriptor d;
            d.name = "fig-delay-vs-N-zipf";
            d.description = "average delay vs. user count with known Zipf popularity on a "
                            "fixed-radius ring";
            ScenarioConfig& c = d.config;
            c.scenario = d.name;
            c.n_files = 100;
            c.cache_mu = 30;
            c.zipf_beta = 0.1;
            c.peak_multiplier = 1.0;
            c.cell_radius_km = 1.8;
            c.bs_power_db = 23.0;
            c.user_power_db = 20.0;
            c.file_size_bits = 11.29;
            c.topology_mode = TopologyMode::ring;
            c.sweep_param = "n_users";
            c.sweep_values = {2, 5, 10, 15, 20, 25};
            c.policies = {"proposed", "naive", "probabilistic"};
            list.push_back(std::move(d));
        }
        return list;
    }();
    return scenarios;
}

const ScenarioDescriptor* find_scenario(const std::string& name) {
    for (const auto& d : registered_scenarios())
        if (d.name == name) return &d;
    return nullptr;
}

}  // namespace d2dcache
