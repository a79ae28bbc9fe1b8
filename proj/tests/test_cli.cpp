#include "flatlab/config.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/experiments.hpp"
#include "flatlab/random.hpp"
#include "flatlab/serialize.hpp"
#include "flatlab/surfaces.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <json.hpp>

using namespace flatlab;

namespace {

bool has_message(const std::vector<std::string>& diags, const std::string& text)
{
    return std::any_of(diags.begin(), diags.end(), [&](const std::string& d) { return d.find(text) != std::string::npos; });
}

SampledGraph random_graph(int m, std::uint64_t seed)
{
    Rng rng(seed);
    const auto grid = m == 2 ? GraphGrid::polar(1.0, 8.0, 9, 12) : GraphGrid::spherical(m, 1.0, 8.0, 9, 2 * m + 2);
    std::vector<double> v(grid.node_count());
    for (double& x : v) {
        x = rng.normal() * 1e-3;
    }
    return SampledGraph(grid, std::move(v));
}

}  // namespace

TEST(Config, DefaultsValidate)
{
    EXPECT_TRUE(validate(ExperimentConfig{}).empty());
}

TEST(Config, ParseAndComments)
{
    const auto c = parse_config("# run\nexperiment = mesoscale\nn = 3\nalpha=0.25  # inline\n\nR = 16384\nseed = 42\n");
    EXPECT_EQ(c.experiment, "mesoscale");
    EXPECT_EQ(c.n, 3);
    EXPECT_DOUBLE_EQ(c.alpha, 0.25);
    EXPECT_DOUBLE_EQ(c.R, 16384.0);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_DOUBLE_EQ(c.beta, 0.5);
}

TEST(Config, ParseErrorLine)
{
    try {
        parse_config("n = 3\nalpha = 0.5\nbogus = 1\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    try {
        parse_config("n = three\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
    }
    EXPECT_THROW(parse_config("alpha\n"), ParseError);
}

TEST(Config, Overrides)
{
    ExperimentConfig c;
    apply_override(c, "alpha=0.3");
    apply_override(c, "experiment=kelvin-check");
    EXPECT_DOUBLE_EQ(c.alpha, 0.3);
    EXPECT_EQ(c.experiment, "kelvin-check");
    EXPECT_THROW(apply_override(c, "alpha"), ConfigError);
    EXPECT_THROW(apply_override(c, "nope=1"), ConfigError);
}

TEST(Config, Diagnostics)
{
    ExperimentConfig c;
    c.alpha = 1.5;
    c.n = 9;
    const auto d = validate(c);
    EXPECT_TRUE(has_message(d, "alpha out of (0,1)"));
    EXPECT_TRUE(has_message(d, "n out of [3,7]"));
    c = ExperimentConfig{};
    c.experiment = "nothing";
    EXPECT_FALSE(validate(c).empty());
    c = ExperimentConfig{};
    c.experiment = "mesoscale";
    c.n = 4;
    EXPECT_FALSE(validate(c).empty());
}

TEST(Config, TextRoundTrip)
{
    ExperimentConfig c;
    c.experiment = "sheet-demo";
    c.alpha = 0.1 + 0.2;
    c.eta = 3e-7;
    c.seed = 123456789;
    c.out = "somewhere";
    const auto back = parse_config(to_text(c));
    EXPECT_EQ(to_text(back), to_text(c));
    EXPECT_EQ(back.alpha, c.alpha);
}

TEST(Serialize, DoubleRoundTrip)
{
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const double x = rng.normal() * std::pow(10.0, rng.uniform(-30.0, 30.0));
        EXPECT_EQ(parse_double(format_double(x)), x);
    }
    EXPECT_EQ(parse_double(" +1.5 "), 1.5);
    EXPECT_THROW(parse_double("1.5x"), FormatError);
}

TEST(Serialize, CloudCsvAndJson)
{
    Rng rng(7);
    std::vector<double> c(3 * 50);
    for (double& x : c) {
        x = rng.normal();
    }
    const PointCloud cloud(3, c);
    const auto csv = cloud_to_csv(cloud);
    EXPECT_EQ(csv.substr(0, 9), "x1,x2,x3\n");
    EXPECT_EQ(cloud_to_csv(cloud_from_csv(csv)), csv);
    EXPECT_EQ(cloud_from_csv(csv).coords(), c);
    const auto js = cloud_to_json(cloud);
    EXPECT_EQ(cloud_to_json(cloud_from_json(js)), js);
    EXPECT_EQ(cloud_from_json(js).coords(), c);
}

TEST(Serialize, GraphCsvAndJson)
{
    for (int m : {2, 3, 4}) {
        const auto g = random_graph(m, 11 + static_cast<std::uint64_t>(m));
        const auto csv = graph_to_csv(g);
        EXPECT_EQ(csv.substr(0, 4), "rho,");
        const auto back = graph_from_csv(csv);
        EXPECT_EQ(graph_to_csv(back), csv);
        EXPECT_EQ(back.values, g.values);
        const auto js = graph_to_json(g);
        const auto jback = graph_from_json(js);
        EXPECT_EQ(graph_to_json(jback), js);
        EXPECT_EQ(jback.values, g.values);
    }
    EXPECT_EQ(graph_to_csv(random_graph(2, 1)).substr(0, 12), "rho,theta,f\n");
}

TEST(Serialize, ModesAndTraces)
{
    const std::vector<HarmonicMode> modes{{2, 0, ModeKind::log, {}, 0.25},
                                          {2, 2, ModeKind::growing, {0.6, 0.8}, -1.5},
                                          {3, 1, ModeKind::decaying, {0.0, 0.0, 1.0}, 1e-3}};
    const auto js = modes_to_json(modes);
    const auto back = modes_from_json(js);
    ASSERT_EQ(back.size(), modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        EXPECT_EQ(back[i].m, modes[i].m);
        EXPECT_EQ(back[i].k, modes[i].k);
        EXPECT_EQ(back[i].kind, modes[i].kind);
        EXPECT_EQ(back[i].axis, modes[i].axis);
        EXPECT_EQ(back[i].coefficient, modes[i].coefficient);
    }
    EXPECT_EQ(modes_to_json(back), js);

    std::vector<double> th, v;
    for (int j = 0; j < 16; ++j) {
        th.push_back(2.0 * 3.141592653589793 * j / 16.0);
        v.push_back(std::sin(th.back()) / 3.0);
    }
    const auto csv = trace_to_csv(th, v);
    const auto [tb, vb] = trace_from_csv(csv);
    EXPECT_EQ(tb, th);
    EXPECT_EQ(vb, v);
    EXPECT_EQ(trace_to_csv(tb, vb), csv);
}

TEST(Serialize, FormatErrors)
{
    EXPECT_THROW(cloud_from_csv("x1,x2\n1,2,3\n"), FormatError);
    EXPECT_THROW(cloud_from_csv("a,b\n1,2\n"), FormatError);
    EXPECT_THROW(cloud_from_json("{not json"), FormatError);
    EXPECT_THROW(graph_from_csv("rho,theta,f\n1,0,0\n2,0.5,0\n"), FormatError);
    EXPECT_THROW(modes_from_json(R"([{"m":2,"k":0,"kind":"decaying","axis":[],"coeff":1}])"), Error);
    EXPECT_THROW(trace_from_csv("theta,value\n0,abc\n"), FormatError);
}

TEST(Serialize, SolverReportJson)
{
    SolverReport r;
    r.iters = 3;
    r.residuals = {1e-2, 1e-5, 1e-9};
    r.deviation = 0.01;
    r.h = 0.125;
    const auto j = nlohmann::json::parse(solver_report_to_json(r));
    EXPECT_EQ(j["iters"], 3);
    EXPECT_EQ(j["residuals"].size(), 3u);
    EXPECT_EQ(j["h"].get<double>(), 0.125);
}

TEST(Experiments, RejectsInvalidConfig)
{
    ExperimentConfig c;
    c.alpha = 2.0;
    EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Experiments, Deterministic)
{
    ExperimentConfig c;
    c.experiment = "sheet-demo";
    c.seed = 9;
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    ASSERT_EQ(a.files.size(), b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        EXPECT_EQ(a.files[i].name, b.files[i].name);
        EXPECT_EQ(a.files[i].content, b.files[i].content);
    }
    EXPECT_EQ(a.pass, b.pass);
}

TEST(Experiments, ReportShape)
{
    ExperimentConfig c;
    c.experiment = "kelvin-check";
    c.n = 4;
    const auto res = run_experiment(c);
    EXPECT_TRUE(res.pass) << res.summary;
    const auto it = std::find_if(res.files.begin(), res.files.end(), [](const ReportFile& f) { return f.name == "report.json"; });
    ASSERT_NE(it, res.files.end());
    const auto j = nlohmann::json::parse(it->content);
    EXPECT_EQ(j["experiment"], "kelvin-check");
    EXPECT_EQ(j["config"]["n"], 4);
    EXPECT_TRUE(j.contains("results"));
    EXPECT_EQ(j["pass"], true);
}
