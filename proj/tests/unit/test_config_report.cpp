#include <gtest/gtest.h>

#include <clocale>
#include <cmath>
#include <fstream>
#include <locale>
#include <sstream>

#include "dpcpower/config.hpp"
#include "dpcpower/errors.hpp"
#include "dpcpower/report.hpp"

using namespace dpcpower;

namespace {

std::string error_of(std::string_view text, const ConfigOverrides& ov = {}) {
    try {
        parse_config_text(text, "t.cfg", ov);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Config, DecibelConversion) {
    EXPECT_DOUBLE_EQ(parse_config_text("gamma_db = 10\n", "t").gamma_linear, 10.0);
    EXPECT_DOUBLE_EQ(parse_config_text("gamma_db = 0\n", "t").gamma_linear, 1.0);
    EXPECT_DOUBLE_EQ(db_to_linear(20), 100.0);
}

TEST(Config, ParsesAllKeys) {
    const auto c = parse_config_text(R"(# comment
M = 6
K = 12   # trailing comment
K_s = 3
gamma_db = 5
sigma_sq = 0.25
algorithms = sus, RUS
power_method = both
trials = 77
seed = 18446744073709551615
exhaustive_budget = 500

[sweep]
axis = K
values = 3..5, 9
)",
                                     "t");
    EXPECT_EQ(c.M, 6);
    EXPECT_EQ(c.Ks, 3);
    EXPECT_DOUBLE_EQ(c.sigma_sq, 0.25);
    EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::sus, Algorithm::rus}));
    EXPECT_EQ(c.power_method, PowerMethodChoice::both);
    EXPECT_EQ(c.trials, 77u);
    EXPECT_EQ(c.master_seed, UINT64_MAX);
    EXPECT_EQ(c.exhaustive_budget, 500u);
    EXPECT_EQ(c.sweep_axis, SweepAxis::K);
    EXPECT_EQ(c.sweep_values, (std::vector<int>{3, 4, 5, 9}));
}

TEST(Config, ErrorsNameKeyAndLine) {
    const auto unknown = error_of("M = 4\nfoo = 1\n");
    EXPECT_NE(unknown.find("t.cfg:2"), std::string::npos) << unknown;
    EXPECT_NE(unknown.find("foo"), std::string::npos);

    const auto type = error_of("\n\nK = ten\n");
    EXPECT_NE(type.find("t.cfg:3"), std::string::npos) << type;
    EXPECT_NE(type.find("'K'"), std::string::npos);

    const auto both = error_of("M = 4\nKs = 5\n");
    EXPECT_NE(both.find("'Ks'"), std::string::npos) << both;
    EXPECT_NE(both.find("'M'"), std::string::npos) << both;
    EXPECT_NE(both.find("t.cfg:1"), std::string::npos) << both;
    EXPECT_NE(both.find("t.cfg:2"), std::string::npos) << both;

    EXPECT_NE(error_of("trials = 0\n").find("trials"), std::string::npos);
    EXPECT_NE(error_of("[sweep]\naxis = K\n").find("sweep.values"), std::string::npos);
    EXPECT_NE(error_of("[other]\n").find("section"), std::string::npos);
    EXPECT_NE(error_of("algorithms = NUS,XYZ\n").find("XYZ"), std::string::npos);
    EXPECT_NE(error_of("M = 4\nM = 5\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of("power_method = fast\n").find("power_method"), std::string::npos);
}

TEST(Config, FlagsOverrideFile) {
    ConfigOverrides ov;
    ov.M = 8;
    ov.trials = 5;
    ov.seed = 9;
    ov.algorithms = "NUS";
    const auto c = parse_config_text("M = 4\ntrials = 100\nseed = 1\n", "t", ov);
    EXPECT_EQ(c.M, 8);
    EXPECT_EQ(c.trials, 5u);
    EXPECT_EQ(c.master_seed, 9u);
    EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::nus}));

    ConfigOverrides zero;
    zero.trials = 0;
    EXPECT_THROW(parse_config_text("", "t", zero), ConfigError);
    ConfigOverrides ks;
    ks.Ks = 5;
    ks.M = 4;
    const auto msg = error_of("", ks);
    EXPECT_NE(msg.find("--Ks"), std::string::npos) << msg;
    EXPECT_NE(msg.find("--M"), std::string::npos) << msg;
}

TEST(Config, AnalyticModeSkipsPointChecks) {
    ParseOptions loose;
    loose.check_points = false;
    EXPECT_NO_THROW(parse_config_text("M = 3\nKs = 4\n", "t", {}, loose));
    EXPECT_THROW(parse_config_text("M = 3\nKs = 4\n", "t"), ConfigError);
}

TEST(Config, CanonicalFormAndHash) {
    const auto a = parse_config_text("K = 10\nM = 4\n", "a");
    const auto b = parse_config_text("# same\nM=4\n\nK=10\n", "b");
    EXPECT_EQ(canonical_config(a), canonical_config(b));
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    const auto c = parse_config_text("K = 11\nM = 4\n", "c");
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Config, FigureConfigs) {
    const int sizes[] = {6, 17, 6, 16};
    for (int id = 1; id <= 4; ++id) {
        const auto c = parse_config_text(figure_config_text(id), "fig");
        EXPECT_EQ(static_cast<int>(c.sweep_values.size()), sizes[id - 1]);
        EXPECT_DOUBLE_EQ(c.gamma_linear, 10.0);
        EXPECT_DOUBLE_EQ(c.sigma_sq, 0.1);
        EXPECT_EQ(c.algorithms.size(), 5u);
    }
    EXPECT_THROW(figure_config_text(5), ConfigError);
    EXPECT_THROW(figure_config_text(0), ConfigError);
}

TEST(Config, ShippedFigureFilesMatchBuiltIns) {
    for (int id = 1; id <= 4; ++id) {
        const std::string path = std::string(DPCPOWER_SOURCE_DIR) + "/configs/figure" + std::to_string(id) + ".cfg";
        const auto file = parse_config(path);
        const auto builtin = parse_config_text(figure_config_text(id), "fig");
        EXPECT_EQ(canonical_config(file), canonical_config(builtin)) << path;
    }
    EXPECT_THROW(parse_config("/nonexistent/x.cfg"), ConfigError);
}

TEST(Format, NineSignificantDigits) {
    EXPECT_EQ(format_number(0.8333333333333334), "0.833333333");
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(123456789012.0), "1.23456789e+11");
    EXPECT_EQ(format_number(NAN), "NA");
    EXPECT_EQ(format_exact(0.1), "0.1");
}

TEST(Format, LocaleIndependent) {
    std::locale previous;
    try {
        std::locale::global(std::locale("de_DE.UTF-8"));
    } catch (const std::runtime_error&) {
        GTEST_SKIP() << "de_DE locale unavailable";
    }
    std::setlocale(LC_ALL, "de_DE.UTF-8");
    const std::string s = format_number(0.5);
    std::ostringstream out;
    ResultTable t(1);
    t[0].sweep_value = 12345;
    write_results_csv(out, t);
    std::locale::global(previous);
    std::setlocale(LC_ALL, "C");
    EXPECT_EQ(s, "0.5");
    EXPECT_NE(out.str().find("\n12345,"), std::string::npos);
}

namespace {
struct CommaGrouping : std::numpunct<char> {
    char do_decimal_point() const override { return ','; }
    char do_thousands_sep() const override { return '.'; }
    std::string do_grouping() const override { return "\3"; }
};
} // namespace

TEST(Format, IgnoresImbuedAndGlobalFacets) {
    const std::locale hostile(std::locale::classic(), new CommaGrouping);
    const std::locale previous = std::locale::global(hostile);
    std::ostringstream out;
    out.imbue(hostile);
    ResultTable t(1);
    t[0].sweep_value = 12345;
    t[0].mc_mean = 0.25;
    write_results_csv(out, t);
    const std::string s = format_number(1234.5);
    std::locale::global(previous);
    EXPECT_EQ(s, "1234.5");
    EXPECT_NE(out.str().find("\n12345,"), std::string::npos);
    EXPECT_NE(out.str().find(",0.25,"), std::string::npos);
}

TEST(Csv, QuotingRoundTrip) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    const auto f = split_csv_line("1,\"a,b\",\"x\"\"y\",");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "a,b");
    EXPECT_EQ(f[2], "x\"y");
    EXPECT_EQ(f[3], "");
}

TEST(Results, WriteReadRoundTrip) {
    ResultTable t(3);
    t[0] = ResultRow{5, 4, 10, 2, "NUS", "approx", 0.38, 0.001,
                     AnalyticValue{AnalyticStatus::ok, 0.3833108596, {}}, 1000, 42, 0, false, ""};
    t[1] = ResultRow{5, 4, 10, 2, "NUS", "exact", 0.37, 0.001, std::nullopt, 1000, 42, 3, true, "3 infeasible, trials"};
    t[2] = ResultRow{5, 4, 10, 4, "AUS", "approx", NAN, NAN,
                     AnalyticValue{AnalyticStatus::no_closed_form, 0, "none"}, 0, 42, 0, false, ""};
    std::stringstream io;
    write_results_csv(io, t);
    const std::string text = io.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kResultsHeader);
    const auto back = read_results_csv(io);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0].algorithm, "NUS");
    EXPECT_NEAR(back[0].analytic->value, 0.3833108596, 1e-9);
    EXPECT_FALSE(back[1].analytic.has_value());
    EXPECT_TRUE(back[1].flagged);
    EXPECT_EQ(back[1].failures, 3u);
    EXPECT_EQ(back[2].analytic->status, AnalyticStatus::no_closed_form);
    EXPECT_TRUE(std::isnan(back[2].mc_mean));
    std::stringstream again;
    write_results_csv(again, back);
    // Notes gain the analytic detail only for non-ok statuses; the rest round-trips.
    EXPECT_EQ(again.str().substr(0, again.str().find("AUS")), text.substr(0, text.find("AUS")));
}

TEST(Results, RejectsForeignHeader) {
    std::istringstream in("a,b,c\n1,2,3\n");
    EXPECT_THROW(read_results_csv(in), ConfigError);
}

TEST(Manifest, Fields) {
    const auto c = parse_config_text("seed = 99\n", "t");
    const auto m = make_manifest(c, "dpcpower simulate");
    std::ostringstream out;
    write_manifest(out, m);
    const std::string s = out.str();
    EXPECT_NE(s.find("config_hash=" + config_hash(c)), std::string::npos);
    EXPECT_NE(s.find("master_seed=99"), std::string::npos);
    EXPECT_NE(s.find("timestamp="), std::string::npos);
    EXPECT_NE(s.find("tool_version="), std::string::npos);
}

TEST(FigureCsv, WideColumns) {
    auto c = parse_config_text(figure_config_text(2), "fig");
    c.algorithms = {Algorithm::sus};
    c.sweep_values = {4, 5};
    ResultTable t;
    for (int K : {4, 5}) {
        t.push_back(ResultRow{K, 4, K, 2, "SUS", "approx", 0.5, 0.01,
                              AnalyticValue{AnalyticStatus::ok, 0.51, {}}, 10, 1, 0, false, ""});
        t.push_back(ResultRow{K, 4, K, 2, "LOWER_BOUND", "approx", NAN, NAN,
                              AnalyticValue{AnalyticStatus::ok, 0.4, {}}, 0, 1, 0, false, ""});
    }
    std::ostringstream out;
    write_figure_csv(out, t, c);
    EXPECT_EQ(out.str(), "K,SUS_mc,SUS_stderr,SUS_analytic,p_L_analytic\n"
                         "4,0.5,0.01,0.51,0.4\n5,0.5,0.01,0.51,0.4\n");
}
