#include "dpcpower/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dpcpower/errors.hpp"
#include "dpcpower/report.hpp"

namespace dpcpower {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Where a key's value came from, for error messages.
class Origins {
public:
    explicit Origins(std::string source) : source_(std::move(source)) {}

    void from_line(const std::string& key, int line) {
        where_[key] = source_ + ":" + std::to_string(line);
    }
    void from_flag(const std::string& key, const std::string& flag) { where_[key] = "flag " + flag; }

    std::string describe(const std::string& key) const {
        auto it = where_.find(key);
        return "'" + key + "' (" + (it == where_.end() ? std::string("default") : it->second) + ")";
    }

private:
    std::string source_;
    std::map<std::string, std::string> where_;
};

[[noreturn]] void fail(const std::string& where, const std::string& key, const std::string& what) {
    throw ConfigError(where + ": key '" + key + "': " + what);
}

template <class T>
T parse_integer(std::string_view text, const std::string& where, const std::string& key) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        fail(where, key, "expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view text, const std::string& where, const std::string& key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty() || !std::isfinite(value)) {
        fail(where, key, "expected a real number, got '" + std::string(text) + "'");
    }
    return value;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view text, const std::string& where,
                                            const std::string& key) {
    std::vector<Algorithm> out;
    std::string_view rest = trim(text);
    if (rest.empty() || lower(rest) == "none") {
        return out;
    }
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        auto algorithm = parse_algorithm(item);
        if (!algorithm) {
            fail(where, key, "unknown algorithm '" + std::string(item) + "'");
        }
        if (std::find(out.begin(), out.end(), *algorithm) == out.end()) {
            out.push_back(*algorithm);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    return out;
}

PowerMethodChoice parse_power_method(std::string_view text, const std::string& where,
                                     const std::string& key) {
    const std::string v = lower(trim(text));
    if (v == "exact") {
        return PowerMethodChoice::exact;
    }
    if (v == "approx") {
        return PowerMethodChoice::approx;
    }
    if (v == "both") {
        return PowerMethodChoice::both;
    }
    fail(where, key, "expected exact, approx or both, got '" + std::string(text) + "'");
}

std::vector<int> parse_values(std::string_view text, const std::string& where,
                              const std::string& key) {
    std::vector<int> out;
    std::string_view rest = trim(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = trim(rest.substr(0, comma));
        const auto dots = item.find("..");
        if (dots != std::string_view::npos) {
            const int lo = parse_integer<int>(trim(item.substr(0, dots)), where, key);
            const int hi = parse_integer<int>(trim(item.substr(dots + 2)), where, key);
            if (hi < lo) {
                fail(where, key, "empty range '" + std::string(item) + "'");
            }
            for (int v = lo; v <= hi; ++v) {
                out.push_back(v);
            }
        } else {
            out.push_back(parse_integer<int>(item, where, key));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::vector<Algorithm> all_algorithms() {
    return {Algorithm::nus, Algorithm::sus, Algorithm::aus, Algorithm::rus, Algorithm::exhaustive};
}

} // namespace

ExperimentConfig parse_config_text(std::string_view text, std::string_view source,
                                   const ConfigOverrides& overrides, const ParseOptions& options) {
    ExperimentConfig config;
    config.algorithms = all_algorithms();
    Origins origins{std::string(source)};
    std::int64_t trials = static_cast<std::int64_t>(config.trials);

    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string where = std::string(source) + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(where + ": malformed section header '" + std::string(line) + "'");
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "sweep") {
                throw ConfigError(where + ": unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + ": expected key=value, got '" + std::string(line) + "'");
        }
        std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key == "K_s") {
            key = "Ks";
        }
        const std::string qualified = section.empty() ? key : section + "." + key;
        if (auto it = seen.find(qualified); it != seen.end()) {
            fail(where, qualified, "duplicate (first set on line " + std::to_string(it->second) + ")");
        }
        seen[qualified] = line_no;
        origins.from_line(qualified, line_no);

        if (section == "sweep") {
            if (key == "axis") {
                const std::string v = lower(value);
                if (v == "m") {
                    config.sweep_axis = SweepAxis::M;
                } else if (v == "k") {
                    config.sweep_axis = SweepAxis::K;
                } else if (v == "none") {
                    config.sweep_axis = SweepAxis::none;
                } else {
                    fail(where, qualified, "expected M, K or none, got '" + std::string(value) + "'");
                }
            } else if (key == "values") {
                config.sweep_values = parse_values(value, where, qualified);
            } else {
                fail(where, qualified, "unknown key");
            }
            continue;
        }
        if (key == "M") {
            config.M = parse_integer<int>(value, where, key);
        } else if (key == "K") {
            config.K = parse_integer<int>(value, where, key);
        } else if (key == "Ks") {
            config.Ks = parse_integer<int>(value, where, key);
        } else if (key == "gamma_db") {
            config.gamma_db = parse_real(value, where, key);
        } else if (key == "sigma_sq") {
            config.sigma_sq = parse_real(value, where, key);
        } else if (key == "algorithms") {
            config.algorithms = parse_algorithm_list(value, where, key);
        } else if (key == "power_method") {
            config.power_method = parse_power_method(value, where, key);
        } else if (key == "trials") {
            trials = parse_integer<std::int64_t>(value, where, key);
        } else if (key == "seed" || key == "master_seed") {
            config.master_seed = parse_integer<std::uint64_t>(value, where, key);
        } else if (key == "exhaustive_budget") {
            config.exhaustive_budget = parse_integer<std::uint64_t>(value, where, key);
        } else {
            fail(where, key, "unknown key");
        }
    }

    if (overrides.M) {
        config.M = *overrides.M;
        origins.from_flag("M", "--M");
    }
    if (overrides.K) {
        config.K = *overrides.K;
        origins.from_flag("K", "--K");
    }
    if (overrides.Ks) {
        config.Ks = *overrides.Ks;
        origins.from_flag("Ks", "--Ks");
    }
    if (overrides.gamma_db) {
        config.gamma_db = *overrides.gamma_db;
        origins.from_flag("gamma_db", "--gamma-db");
    }
    if (overrides.sigma_sq) {
        config.sigma_sq = *overrides.sigma_sq;
        origins.from_flag("sigma_sq", "--sigma-sq");
    }
    if (overrides.algorithms) {
        config.algorithms = parse_algorithm_list(*overrides.algorithms, "flag --algorithms", "algorithms");
    }
    if (overrides.power_method) {
        config.power_method =
            parse_power_method(*overrides.power_method, "flag --power-method", "power_method");
    }
    if (overrides.trials) {
        trials = *overrides.trials;
        origins.from_flag("trials", "--trials");
    }
    if (overrides.seed) {
        config.master_seed = *overrides.seed;
    }

    // A fixed M or K is ignored along its own sweep axis.
    if (config.sweep_axis == SweepAxis::M && overrides.M) {
        config.sweep_axis = SweepAxis::none;
        config.sweep_values.clear();
    }
    if (config.sweep_axis == SweepAxis::K && overrides.K) {
        config.sweep_axis = SweepAxis::none;
        config.sweep_values.clear();
    }

    if (trials < 1) {
        throw ConfigError("key " + origins.describe("trials") + ": must be >= 1, got " +
                          std::to_string(trials));
    }
    config.trials = static_cast<std::uint64_t>(trials);
    if (!(config.sigma_sq > 0.0)) {
        throw ConfigError("key " + origins.describe("sigma_sq") + ": must be positive");
    }
    config.gamma_linear = db_to_linear(config.gamma_db);
    if (!std::isfinite(config.gamma_linear) || !(config.gamma_linear > 0.0)) {
        throw ConfigError("key " + origins.describe("gamma_db") + ": out of range");
    }
    if (config.sweep_axis != SweepAxis::none && config.sweep_values.empty()) {
        throw ConfigError("key " + origins.describe("sweep.values") + ": required when sweep.axis is " +
                          std::string(to_string(config.sweep_axis)));
    }

    const auto axis_key = [&](const char* key) {
        const bool swept = (config.sweep_axis == SweepAxis::M && std::string_view(key) == "M") ||
                           (config.sweep_axis == SweepAxis::K && std::string_view(key) == "K");
        return origins.describe(swept ? "sweep.values" : key);
    };
    for (int value : config.points()) {
        const ExperimentConfig p = config.at(value);
        if (p.M < 1) {
            throw ConfigError("key " + axis_key("M") + ": must be >= 1");
        }
        if (p.K < 1) {
            throw ConfigError("key " + axis_key("K") + ": must be >= 1");
        }
        if (p.Ks < 1) {
            throw ConfigError("key " + origins.describe("Ks") + ": must be >= 1");
        }
        if (!options.check_points) {
            continue;
        }
        if (p.Ks > p.M) {
            throw ConfigError("keys " + origins.describe("Ks") + " and " + axis_key("M") +
                              ": Ks=" + std::to_string(p.Ks) + " exceeds M=" + std::to_string(p.M));
        }
        if (p.Ks > p.K) {
            throw ConfigError("keys " + origins.describe("Ks") + " and " + axis_key("K") +
                              ": Ks=" + std::to_string(p.Ks) + " exceeds K=" + std::to_string(p.K));
        }
    }
    config.validate(options.check_points);
    return config;
}

ExperimentConfig parse_config(const std::string& path, const ConfigOverrides& overrides,
                              const ParseOptions& options) {
    if (path.empty()) {
        return parse_config_text("", "<defaults>", overrides, options);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path, overrides, options);
}

std::string canonical_config(const ExperimentConfig& config) {
    std::string out;
    const auto put = [&out](std::string_view key, const std::string& value) {
        out.append(key).append("=").append(value).append("\n");
    };
    put("M", std::to_string(config.M));
    put("K", std::to_string(config.K));
    put("Ks", std::to_string(config.Ks));
    put("gamma_db", format_exact(config.gamma_db));
    put("sigma_sq", format_exact(config.sigma_sq));
    std::string algorithms;
    for (Algorithm a : config.algorithms) {
        if (!algorithms.empty()) {
            algorithms += ",";
        }
        algorithms += to_string(a);
    }
    put("algorithms", algorithms.empty() ? "none" : algorithms);
    put("power_method", std::string(to_string(config.power_method)));
    put("trials", std::to_string(config.trials));
    put("seed", std::to_string(config.master_seed));
    put("exhaustive_budget", std::to_string(config.exhaustive_budget));
    put("sweep.axis", std::string(to_string(config.sweep_axis)));
    std::string values;
    for (int v : config.sweep_values) {
        if (!values.empty()) {
            values += ",";
        }
        values += std::to_string(v);
    }
    put("sweep.values", values);
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& config) {
    const std::uint64_t h = fnv1a64(canonical_config(config));
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + 16, h, 16);
    std::string hex(buf, ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

namespace {

constexpr std::string_view kFigure1 = R"(# M sweep, K=10, Ks=2
K = 10
Ks = 2
gamma_db = 10
sigma_sq = 0.1
algorithms = NUS,SUS,AUS,RUS,EXHAUSTIVE
power_method = approx
trials = 10000
seed = 1

[sweep]
axis = M
values = 3..8
)";

constexpr std::string_view kFigure2 = R"(# K sweep, M=4, Ks=2
M = 4
Ks = 2
gamma_db = 10
sigma_sq = 0.1
algorithms = NUS,SUS,AUS,RUS,EXHAUSTIVE
power_method = approx
trials = 10000
seed = 1

[sweep]
axis = K
values = 4..20
)";

constexpr std::string_view kFigure3 = R"(# M sweep, K=8, Ks=4
K = 8
Ks = 4
gamma_db = 10
sigma_sq = 0.1
algorithms = NUS,SUS,AUS,RUS,EXHAUSTIVE
power_method = approx
trials = 10000
seed = 1

[sweep]
axis = M
values = 5..10
)";

constexpr std::string_view kFigure4 = R"(# K sweep, M=4, Ks=4
M = 4
Ks = 4
gamma_db = 10
sigma_sq = 0.1
algorithms = NUS,SUS,AUS,RUS,EXHAUSTIVE
power_method = approx
trials = 10000
seed = 1

[sweep]
axis = K
values = 5..20
)";

} // namespace

std::string_view figure_config_text(int figure_id) {
    switch (figure_id) {
    case 1: return kFigure1;
    case 2: return kFigure2;
    case 3: return kFigure3;
    case 4: return kFigure4;
    default: break;
    }
    throw ConfigError("figure id must be 1, 2, 3 or 4, got " + std::to_string(figure_id));
}

} // namespace dpcpower
