#include "dpcpower/report.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <locale>
#include <map>
#include <ostream>
#include <sstream>

#include "dpcpower/config.hpp"
#include "dpcpower/errors.hpp"

#ifndef DPCPOWER_VERSION
#define DPCPOWER_VERSION "0.0.0"
#endif

namespace dpcpower {

std::string format_number(double value) {
    if (!std::isfinite(value)) {
        return "NA";
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 9);
    return std::string(buf.data(), ptr);
}

std::string format_exact(double value) {
    if (!std::isfinite(value)) {
        return "NA";
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

namespace {

// Integers go through the stream; pin it to the classic locale meanwhile.
class ClassicLocale {
public:
    explicit ClassicLocale(std::ostream& out) : out_(out), saved_(out.imbue(std::locale::classic())) {}
    ~ClassicLocale() { out_.imbue(saved_); }
    ClassicLocale(const ClassicLocale&) = delete;
    ClassicLocale& operator=(const ClassicLocale&) = delete;

private:
    std::ostream& out_;
    std::locale saved_;
};

std::string analytic_cell(const ResultRow& row) {
    return row.analytic && row.analytic->ok() ? format_number(row.analytic->value) : "NA";
}

std::string status_cell(const ResultRow& row) {
    return row.analytic ? std::string(to_string(row.analytic->status)) : "exact_model";
}

std::string note_cell(const ResultRow& row) {
    std::string note = row.note;
    if (row.analytic && !row.analytic->ok() && !row.analytic->detail.empty()) {
        if (!note.empty()) {
            note += "; ";
        }
        note += row.analytic->detail;
    }
    return csv_field(note);
}

double parse_double_cell(const std::string& cell) {
    if (cell == "NA") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("results file: bad number '" + cell + "'");
    }
    return v;
}

template <class T>
T parse_int_cell(const std::string& cell) {
    T v{};
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError("results file: bad integer '" + cell + "'");
    }
    return v;
}

AnalyticStatus parse_status(const std::string& cell) {
    for (auto s : {AnalyticStatus::ok, AnalyticStatus::no_closed_form, AnalyticStatus::divergent,
                   AnalyticStatus::invalid}) {
        if (cell == to_string(s)) {
            return s;
        }
    }
    throw ConfigError("results file: unknown analytic status '" + cell + "'");
}

} // namespace

void write_results_csv(std::ostream& out, const ResultTable& table) {
    ClassicLocale classic(out);
    out << kResultsHeader << '\n';
    for (const auto& row : table) {
        out << row.sweep_value << ',' << row.M << ',' << row.K << ',' << row.Ks << ','
            << csv_field(row.algorithm) << ',' << csv_field(row.power_method) << ','
            << format_number(row.mc_mean) << ',' << format_number(row.mc_stderr) << ','
            << analytic_cell(row) << ',' << status_cell(row) << ',' << row.trials << ','
            << row.failures << ',' << (row.flagged ? 1 : 0) << ',' << row.seed << ','
            << note_cell(row) << '\n';
    }
}

ResultTable read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("results file is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kResultsHeader) {
        throw ConfigError("results file has an unexpected header");
    }
    ResultTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 15) {
            throw ConfigError("results file line " + std::to_string(line_no) + ": expected 15 fields");
        }
        ResultRow row;
        row.sweep_value = parse_int_cell<int>(f[0]);
        row.M = parse_int_cell<int>(f[1]);
        row.K = parse_int_cell<int>(f[2]);
        row.Ks = parse_int_cell<int>(f[3]);
        row.algorithm = f[4];
        row.power_method = f[5];
        row.mc_mean = parse_double_cell(f[6]);
        row.mc_stderr = parse_double_cell(f[7]);
        if (f[9] != "exact_model") {
            AnalyticValue value;
            value.status = parse_status(f[9]);
            value.value = value.ok() ? parse_double_cell(f[8]) : 0.0;
            row.analytic = value;
        }
        row.trials = parse_int_cell<std::uint64_t>(f[10]);
        row.failures = parse_int_cell<std::uint64_t>(f[11]);
        row.flagged = f[12] == "1";
        row.seed = parse_int_cell<std::uint64_t>(f[13]);
        row.note = f[14];
        table.push_back(std::move(row));
    }
    return table;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
    ClassicLocale classic(out);
    out << "sweep_value,algorithm,power_method,mc_mean,mc_stderr,analytic_value,allowed_deviation,"
           "check,result\n";
    for (const auto& row : report.rows) {
        out << row.sweep_value << ',' << csv_field(row.algorithm) << ','
            << csv_field(row.power_method) << ',' << format_number(row.mc_mean) << ','
            << format_number(row.mc_stderr) << ',' << format_number(row.analytic) << ','
            << format_number(row.allowed) << ',' << row.check << ','
            << (row.pass ? "PASS" : "FAIL") << '\n';
    }
}

void write_analytic_csv(std::ostream& out, const ResultTable& table) {
    ClassicLocale classic(out);
    out << "sweep_value,M,K,Ks,algorithm,analytic_value,status,detail\n";
    for (const auto& row : table) {
        const AnalyticValue value = row.analytic.value_or(AnalyticValue{});
        out << row.sweep_value << ',' << row.M << ',' << row.K << ',' << row.Ks << ','
            << csv_field(row.algorithm) << ','
            << (value.ok() ? format_number(value.value) : std::string(to_string(value.status)))
            << ',' << to_string(value.status) << ',' << csv_field(value.detail) << '\n';
    }
}

RunManifest make_manifest(const ExperimentConfig& config, std::string command) {
    RunManifest m;
    m.config_hash = config_hash(config);
    m.tool_version = DPCPOWER_VERSION;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    m.timestamp = buf;
    m.master_seed = config.master_seed;
    m.command = std::move(command);
    m.canonical_config = canonical_config(config);
    return m;
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
    ClassicLocale classic(out);
    out << "config_hash=" << manifest.config_hash << '\n'
        << "tool_version=" << manifest.tool_version << '\n'
        << "timestamp=" << manifest.timestamp << '\n'
        << "master_seed=" << manifest.master_seed << '\n'
        << "command=" << manifest.command << '\n'
        << "[config]\n"
        << manifest.canonical_config;
}

void write_figure_csv(std::ostream& out, const ResultTable& table, const ExperimentConfig& config) {
    ClassicLocale classic(out);
    const std::string axis =
        config.sweep_axis == SweepAxis::none ? "point" : std::string(to_string(config.sweep_axis));
    out << axis;
    for (Algorithm a : config.algorithms) {
        const std::string name(to_string(a));
        out << ',' << name << "_mc," << name << "_stderr," << name << "_analytic";
    }
    out << ",p_L_analytic\n";
    for (int value : config.points()) {
        std::map<std::string, const ResultRow*> by_name;
        for (const auto& row : table) {
            if (row.sweep_value == value && row.power_method == "approx") {
                by_name[row.algorithm] = &row;
            }
        }
        out << value;
        for (Algorithm a : config.algorithms) {
            const auto it = by_name.find(std::string(to_string(a)));
            if (it == by_name.end()) {
                out << ",NA,NA,NA";
                continue;
            }
            out << ',' << format_number(it->second->mc_mean) << ','
                << format_number(it->second->mc_stderr) << ',' << analytic_cell(*it->second);
        }
        const auto lb = by_name.find(std::string(kLowerBoundName));
        out << ',' << (lb == by_name.end() ? std::string("NA") : analytic_cell(*lb->second)) << '\n';
    }
}

void write_plot_script(std::ostream& out, std::string_view csv_name, const ExperimentConfig& config) {
    const std::string axis =
        config.sweep_axis == SweepAxis::none ? "point" : std::string(to_string(config.sweep_axis));
    out << "# Plots " << csv_name << "; run from the directory that holds it.\n"
        << "import csv\n"
        << "import matplotlib\n"
        << "matplotlib.use('Agg')\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "def num(s):\n"
        << "    return float('nan') if s == 'NA' else float(s)\n\n"
        << "with open('" << csv_name << "') as f:\n"
        << "    rows = list(csv.DictReader(f))\n"
        << "x = [int(r['" << axis << "']) for r in rows]\n"
        << "fig, ax = plt.subplots()\n"
        << "for name in [";
    for (Algorithm a : config.algorithms) {
        out << "'" << to_string(a) << "', ";
    }
    out << "]:\n"
        << "    ax.plot(x, [num(r[name + '_mc']) for r in rows], marker='o', label=name + ' (MC)')\n"
        << "    a = [num(r[name + '_analytic']) for r in rows]\n"
        << "    if any(v == v for v in a):\n"
        << "        ax.plot(x, a, linestyle='--', label=name + ' (analytic)')\n"
        << "ax.plot(x, [num(r['p_L_analytic']) for r in rows], linestyle=':', label='lower bound')\n"
        << "ax.set_xlabel('" << axis << "')\n"
        << "ax.set_ylabel('average total power')\n"
        << "ax.legend()\n"
        << "fig.savefig('" << csv_name.substr(0, csv_name.rfind('.')) << ".png', dpi=150)\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

} // namespace dpcpower
