#include "flatlab/experiments.hpp"

#include "flatlab/analysis.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/minimal.hpp"
#include "flatlab/random.hpp"
#include "flatlab/serialize.hpp"
#include "flatlab/surfaces.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flatlab {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double pi = std::numbers::pi;

ojson config_json(const ExperimentConfig& c)
{
    ojson j;
    j["experiment"] = c.experiment;
    j["n"] = c.n;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["eta"] = c.eta;
    j["R"] = c.R;
    j["sigma"] = c.sigma;
    j["radial"] = c.radial;
    j["angular"] = c.angular;
    j["seed"] = c.seed;
    return j;
}

// Non-finite numbers become null.
ojson num(double x)
{
    return std::isfinite(x) ? ojson(x) : ojson(nullptr);
}

ojson nums(const std::vector<double>& v)
{
    ojson a = ojson::array();
    for (double x : v) {
        a.push_back(num(x));
    }
    return a;
}

ExperimentResult finish(const ExperimentConfig& cfg, ojson results, bool pass, std::string summary,
                        std::vector<ReportFile> tables = {})
{
    ojson report;
    report["experiment"] = cfg.experiment;
    report["config"] = config_json(cfg);
    report["results"] = std::move(results);
    report["pass"] = pass;
    ExperimentResult out;
    out.pass = pass;
    out.summary = cfg.experiment + ": " + (pass ? "PASS" : "FAIL") + " " + summary;
    out.files.push_back({"report.json", report.dump(2) + "\n"});
    for (auto& t : tables) {
        out.files.push_back(std::move(t));
    }
    return out;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::string fit_table(const AsymptoticFit& fit)
{
    std::string s = "rho,residual_sup\n";
    for (std::size_t k = 0; k < fit.annulus_radii.size(); ++k) {
        s += format_double(fit.annulus_radii[k]) + "," + format_double(fit.residual_sups[k]) + "\n";
    }
    return s;
}

double norm2(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

ExperimentResult catenoid_fit(const ExperimentConfig& cfg)
{
    ojson res;
    bool pass = false;
    std::string summary;
    AsymptoticFit fit;
    if (cfg.n == 3) {
        const auto grid = GraphGrid::polar(8.0, 2048.0, static_cast<std::size_t>(cfg.radial),
                                           static_cast<std::size_t>(cfg.angular));
        fit = fit_asymptotics(make_catenoid3(1.0, grid), cfg.beta);
        const double db = std::abs(fit.b - std::log(2.0));
        const double dc = std::abs(fit.c - 1.0);
        const double dd = norm2(fit.d);
        pass = db <= 1e-3 && dc <= 1e-3 && dd <= 1e-3 && fit.residual_exponent >= 1.9 && fit.residual_exponent <= 2.1;
        res["b_expected"] = std::log(2.0);
        res["c_expected"] = 1.0;
        summary = "b=" + fmt(fit.b) + " c=" + fmt(fit.c) + " |d|=" + fmt(dd) + " exponent=" + fmt(fit.residual_exponent);
    } else {
        const CatenoidSpec spec{cfg.n, 1.0, 1};
        const auto grid = GraphGrid::spherical(cfg.n - 1, 2.0, 512.0, static_cast<std::size_t>(cfg.radial),
                                               static_cast<std::size_t>(cfg.angular));
        fit = fit_asymptotics(make_catenoid_n(spec, grid, CatenoidAnchor::waist), cfg.beta);
        const double far = 1e6;
        const double c_expected = -std::pow(far, cfg.n - 3.0) * catenoid_tail(cfg.n, 1.0, far);
        const double b_expected = catenoid_rise(cfg.n, 1.0, 4.0) + catenoid_tail(cfg.n, 1.0, 4.0);
        const double rel = std::abs(fit.c - c_expected) / std::abs(c_expected);
        const double dd = norm2(fit.d);
        pass = rel <= 5e-3 && dd <= 1e-3 && std::abs(fit.b - b_expected) <= 1e-3;
        res["b_expected"] = b_expected;
        res["c_expected"] = c_expected;
        summary = "b=" + fmt(fit.b) + " c=" + fmt(fit.c) + " (expected " + fmt(c_expected) + ") |d|=" + fmt(dd);
    }
    res["b"] = fit.b;
    res["c"] = fit.c;
    res["d"] = nums(fit.d);
    res["residual_exponent"] = num(fit.residual_exponent);
    res["condition"] = fit.condition;
    return finish(cfg, std::move(res), pass, summary, {{"fit.csv", fit_table(fit)}});
}

std::vector<double> axis_at(double phi)
{
    return {std::cos(phi), std::sin(phi)};
}

// eta [a (r^2/R) cos 2(theta - phi) + s r^{-1} cos(theta - psi)]
std::vector<HarmonicMode> two_mode_mixture(double eta, double R, double a, double s, double phi, double psi)
{
    std::vector<HarmonicMode> modes;
    modes.push_back({2, 2, ModeKind::growing, axis_at(phi), eta * a / R});
    if (s > 0.0) {
        modes.push_back({2, 1, ModeKind::decaying, axis_at(psi), eta * s});
    }
    return modes;
}

HeightProfile mixture_profile(const std::vector<HarmonicMode>& modes, double R, double eta, int angular)
{
    const double rho_in = 1.5;
    const auto radial = static_cast<std::size_t>(std::ceil(16.0 * std::log2(R / rho_in))) + 1;
    const auto grid = GraphGrid::polar(rho_in, R, radial, static_cast<std::size_t>(angular));
    const auto cloud = graph_to_cloud(make_harmonic_graph(modes, grid));
    return height_profile(cloud, dyadic_scales(4.0, R / 4.0), HeightMode::shifted, R, eta);
}

ExperimentResult decay_verify(const ExperimentConfig& cfg)
{
    Rng rng(cfg.seed);
    const int members = 5;
    ojson rows = ojson::array();
    std::string table = "member,R,C_min,C_min_doubled,drift\n";
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < members; ++k) {
        const double a = rng.uniform(0.5, 2.0);
        const double s = rng.uniform(0.5, 2.0);
        const double phi = rng.uniform(0.0, pi);
        const double psi = rng.uniform(0.0, 2.0 * pi);
        double C[2];
        for (int t = 0; t < 2; ++t) {
            const double R = cfg.R * (t ? 2.0 : 1.0);
            const auto profile = mixture_profile(two_mode_mixture(cfg.eta, R, a, s, phi, psi), R, cfg.eta, cfg.angular);
            C[t] = verify_decay_bound(profile, cfg.alpha).C_min;
        }
        const double drift = std::abs(C[1] / C[0] - 1.0);
        worst = std::max(worst, drift);
        pass = pass && drift < 0.1 && C[0] >= 0.1 && C[0] <= 10.0;
        rows.push_back({{"a", a}, {"s", s}, {"C_min", C[0]}, {"C_min_doubled", C[1]}, {"drift", drift}});
        table += std::to_string(k) + "," + format_double(cfg.R) + "," + format_double(C[0]) + "," +
                 format_double(C[1]) + "," + format_double(drift) + "\n";
    }
    ojson res;
    res["n"] = cfg.n;
    res["alpha"] = cfg.alpha;
    res["R"] = cfg.R;
    res["eta"] = cfg.eta;
    res["members"] = std::move(rows);
    res["max_drift"] = worst;
    return finish(cfg, std::move(res), pass, "max C_min drift under R-doubling " + fmt(worst),
                  {{"ensemble.csv", table}});
}

ExperimentResult mesoscale(const ExperimentConfig& cfg)
{
    const auto modes = two_mode_mixture(cfg.eta, cfg.R, 1.0, cfg.sigma, 0.0, 0.0);
    const auto profile = mixture_profile(modes, cfg.R, cfg.eta, cfg.angular);
    const auto verdict = verify_decay_bound(profile, cfg.alpha);
    ojson res;
    res["n"] = cfg.n;
    res["alpha"] = cfg.alpha;
    res["R"] = cfg.R;
    res["eta"] = cfg.eta;
    res["C_min"] = verdict.C_min;
    bool pass = false;
    std::string summary;
    try {
        const auto m = locate_mesoscale(profile, cfg.alpha, modes);
        res["r_star_emp"] = m.r_star_empirical;
        res["r_star_ana"] = m.r_star_analytic;
        res["ratio"] = m.ratio;
        pass = m.ratio >= 0.5 && m.ratio <= 2.0;
        summary = "r*_emp=" + fmt(m.r_star_empirical) + " r*_ana=" + fmt(m.r_star_analytic) + " ratio=" + fmt(m.ratio);
    } catch (const NoReversal& e) {
        res["r_star_emp"] = nullptr;
        res["r_star_ana"] = nullptr;
        res["no_reversal"] = true;
        summary = e.what();
    }
    return finish(cfg, std::move(res), pass, summary, {{"profile.csv", profile_to_csv(profile)}});
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s = std::max(s, std::abs(a[i] - b[i]));
    }
    return s;
}

ExperimentResult kelvin_check(const ExperimentConfig& cfg)
{
    const int m = cfg.n - 1;
    Rng rng(cfg.seed);
    ojson res;
    bool pass = true;
    std::string summary;
    std::string table = "case,error\n";
    auto record = [&](const std::string& name, double err, double tol) {
        res[name] = err;
        table += name + "," + format_double(err) + "\n";
        pass = pass && err <= tol;
    };
    if (m >= 3) {
        const auto grid = GraphGrid::spherical(m, 0.5, 8.0, static_cast<std::size_t>(cfg.radial),
                                               static_cast<std::size_t>(cfg.angular));
        std::vector<double> axis(static_cast<std::size_t>(m));
        for (auto& x : axis) {
            x = rng.normal();
        }
        const std::vector<HarmonicMode> mix{{m, 0, ModeKind::growing, {}, rng.uniform(-1.0, 1.0)},
                                            {m, 0, ModeKind::decaying, {}, rng.uniform(-1.0, 1.0)},
                                            {m, 1, ModeKind::growing, axis, rng.uniform(-1.0, 1.0)},
                                            {m, 1, ModeKind::decaying, axis, rng.uniform(-1.0, 1.0)}};
        const auto u = synthesize(mix, grid);
        const auto back = kelvin_transform(kelvin_transform(u));
        double scale = 1.0;
        for (double v : u.values) {
            scale = std::max(scale, std::abs(v));
        }
        record("involution", sup_diff(back.values, u.values) / scale, 1e-10);

        const auto fund = kelvin_transform(synthesize({{m, 0, ModeKind::decaying, {}, 1.0}}, grid));
        record("fundamental_to_constant", sup_diff(fund.values, std::vector<double>(fund.values.size(), 1.0)), 1e-12);

        const HarmonicMode pairs[4][2] = {{{m, 0, ModeKind::growing, {}, 1.0}, {m, 0, ModeKind::decaying, {}, 1.0}},
                                          {{m, 0, ModeKind::decaying, {}, 1.0}, {m, 0, ModeKind::growing, {}, 1.0}},
                                          {{m, 1, ModeKind::growing, axis, 1.0}, {m, 1, ModeKind::decaying, axis, 1.0}},
                                          {{m, 1, ModeKind::decaying, axis, 1.0}, {m, 1, ModeKind::growing, axis, 1.0}}};
        const char* names[4] = {"pair_const_to_fundamental", "pair_fundamental_to_const", "pair_linear_to_dipole",
                                "pair_dipole_to_linear"};
        for (int p = 0; p < 4; ++p) {
            const auto v = kelvin_transform(synthesize({pairs[p][0]}, grid));
            const auto expect = synthesize({pairs[p][1]}, v.grid);
            record(names[p], sup_diff(v.values, expect.values), 1e-10);
        }
        summary = "involution error " + fmt(res["involution"].get<double>());
    } else {
        const auto grid = GraphGrid::polar(2.0, 64.0, static_cast<std::size_t>(cfg.radial),
                                           static_cast<std::size_t>(cfg.angular));
        const double b = rng.uniform(-1.0, 1.0);
        const double c = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * pi);
        const double dn = rng.uniform(0.1, 1.0);
        const std::vector<HarmonicMode> mix{{2, 0, ModeKind::growing, {}, b},
                                            {2, 0, ModeKind::log, {}, c},
                                            {2, 1, ModeKind::decaying, axis_at(phi), dn}};
        const auto lk = kelvin_transform_log(synthesize(mix, grid));
        record("log_coefficient", std::abs(lk.log_coefficient - c), 1e-10);
        const auto expect = synthesize({{2, 0, ModeKind::growing, {}, b}, {2, 1, ModeKind::growing, axis_at(phi), dn}},
                                       lk.field.grid);
        record("log_branch_field", sup_diff(lk.field.values, expect.values), 1e-10);
        summary = "log coefficient error " + fmt(res["log_coefficient"].get<double>());
    }
    return finish(cfg, std::move(res), pass, summary, {{"kelvin.csv", table}});
}

ExperimentResult solver_convergence(const ExperimentConfig& cfg)
{
    const std::size_t levels[4] = {33, 65, 129, 257};
    const auto na = static_cast<std::size_t>(cfg.angular);
    std::vector<double> hs, errs;
    std::string table = "radial,h,sup_error,newton_iters\n";
    ojson runs = ojson::array();
    for (std::size_t nr : levels) {
        const auto grid = GraphGrid::polar(2.0, 64.0, nr, na);
        const auto exact = make_catenoid3(1.0, grid);
        std::vector<double> gin(exact.values.begin(), exact.values.begin() + static_cast<std::ptrdiff_t>(na));
        std::vector<double> gout(exact.values.end() - static_cast<std::ptrdiff_t>(na), exact.values.end());
        const auto sol = solve_dirichlet(gin, gout, grid);
        const double err = sup_diff(sol.graph.values, exact.values);
        hs.push_back(grid.log_step());
        errs.push_back(err);
        table += std::to_string(nr) + "," + format_double(grid.log_step()) + "," + format_double(err) + "," +
                 std::to_string(sol.report.iters) + "\n";
        runs.push_back({{"radial", nr}, {"h", grid.log_step()}, {"sup_error", err}, {"iters", sol.report.iters}});
    }
    // least-squares slope of log err against log h
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        mx += std::log(hs[k]);
        my += std::log(errs[k]);
    }
    mx /= static_cast<double>(hs.size());
    my /= static_cast<double>(hs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < hs.size(); ++k) {
        sxy += (std::log(hs[k]) - mx) * (std::log(errs[k]) - my);
        sxx += (std::log(hs[k]) - mx) * (std::log(hs[k]) - mx);
    }
    const double slope = sxy / sxx;

    const auto zgrid = GraphGrid::polar(2.0, 64.0, 33, na);
    const std::vector<double> zero(na, 0.0);
    const auto zsol = solve_dirichlet(zero, zero, zgrid);
    const double zerr = sup_norm(zsol.graph);

    ojson res;
    res["runs"] = std::move(runs);
    res["slope"] = slope;
    res["zero_data_sup"] = zerr;
    const bool pass = std::abs(slope - 2.0) <= 0.3 && zerr <= 1e-12;
    return finish(cfg, std::move(res), pass, "refinement slope " + fmt(slope) + ", zero data sup " + fmt(zerr),
                  {{"convergence.csv", table}});
}

struct SheetInstance {
    PointCloud cloud;
    std::size_t N;
    std::vector<std::size_t> counts;
};

// N affine sheets z = l_i + a_i.y over 1 <= |y| <= 2 in the slab |z| <= 0.2,
// sampled on a jittered grid of spacing `density`.
SheetInstance make_sheets(Rng& rng, std::size_t N, double density)
{
    std::vector<double> level(N), ax(N), ay(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double base = N == 1 ? 0.0 : -0.14 + 0.28 * static_cast<double>(i) / static_cast<double>(N - 1);
        level[i] = base + rng.uniform(-0.01, 0.01);
        ax[i] = rng.uniform(-0.005, 0.005);
        ay[i] = rng.uniform(-0.005, 0.005);
    }
    std::vector<double> coords;
    std::vector<std::size_t> counts(N, 0);
    const int steps = static_cast<int>(std::ceil(2.0 / density));
    for (std::size_t i = 0; i < N; ++i) {
        for (int p = -steps; p <= steps; ++p) {
            for (int q = -steps; q <= steps; ++q) {
                const double x = p * density + rng.uniform(-0.3, 0.3) * density;
                const double y = q * density + rng.uniform(-0.3, 0.3) * density;
                const double r = std::hypot(x, y);
                if (r < 1.0 || r > 2.0) {
                    continue;
                }
                coords.insert(coords.end(), {x, y, level[i] + ax[i] * x + ay[i] * y});
                ++counts[i];
            }
        }
    }
    return {PointCloud(3, std::move(coords)), N, std::move(counts)};
}

ExperimentResult sheet_demo(const ExperimentConfig& cfg)
{
    Rng rng(cfg.seed);
    const double eps = 0.2;
    const double density = 0.02;
    const int instances = 30;
    int correct = 0;
    std::string table = "instance,N_true,N_found,ordered,connected,correct\n";
    for (int k = 0; k < instances; ++k) {
        const std::size_t N = static_cast<std::size_t>(k % 3) + 1;
        const auto inst = make_sheets(rng, N, density);
        bool ok = false;
        std::size_t found = 0;
        bool ordered = false;
        bool connected = false;
        try {
            const auto dec = sheet_decompose(inst.cloud, eps, density);
            found = dec.N;
            ordered = dec.ordered;
            connected = dec.connected;
            ok = dec.N == N && dec.ordered && dec.connected == (N == 1);
            for (std::size_t i = 0; ok && i < N; ++i) {
                ok = dec.sheets[i].size() == inst.counts[i];
            }
        } catch (const Error&) {
            ok = false;
        }
        correct += ok ? 1 : 0;
        table += std::to_string(k) + "," + std::to_string(N) + "," + std::to_string(found) + "," +
                 (ordered ? "1" : "0") + "," + (connected ? "1" : "0") + "," + (ok ? "1" : "0") + "\n";
    }
    ojson res;
    res["instances"] = instances;
    res["correct"] = correct;
    res["eps"] = eps;
    res["density"] = density;
    return finish(cfg, std::move(res), correct == instances,
                  std::to_string(correct) + "/" + std::to_string(instances) + " instances classified",
                  {{"sheets.csv", table}});
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config)
{
    const auto problems = validate(config);
    if (!problems.empty()) {
        std::string msg;
        for (const auto& p : problems) {
            msg += (msg.empty() ? "" : "; ") + p;
        }
        throw ConfigError(msg);
    }
    const auto& kind = config.experiment;
    if (kind == "catenoid-fit") {
        return catenoid_fit(config);
    }
    if (kind == "decay-verify") {
        return decay_verify(config);
    }
    if (kind == "mesoscale") {
        return mesoscale(config);
    }
    if (kind == "kelvin-check") {
        return kelvin_check(config);
    }
    if (kind == "solver-convergence") {
        return solver_convergence(config);
    }
    return sheet_demo(config);
}

}  // namespace flatlab
