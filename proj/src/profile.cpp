#include "flatlab/analysis.hpp"

#include "flatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace flatlab {

std::vector<double> dyadic_scales(double r0, double r1)
{
    if (!(r0 > 0.0) || !(r1 >= r0)) {
        throw InvalidArgument("dyadic scales need 0 < r0 <= r1");
    }
    std::vector<double> out;
    for (double r = r0; r <= r1 * (1.0 + 1e-12); r *= 2.0) {
        out.push_back(r);
    }
    return out;
}

HeightProfile height_profile(const PointCloud& cloud, const std::vector<double>& scales, HeightMode mode, double R,
                             double eta, const FlatnessOptions& options)
{
    if (scales.empty()) {
        throw InvalidArgument("height profile needs at least one scale");
    }
    for (std::size_t k = 1; k < scales.size(); ++k) {
        if (!(scales[k] > scales[k - 1])) {
            throw InvalidArgument("profile scales must be strictly increasing");
        }
    }
    HeightProfile prof;
    prof.n = cloud.ambient_dim();
    prof.R = R;
    prof.eta = eta;
    for (double r : scales) {
        const AnnularWindow w(r);
        HeightRecord rec = flatness(cloud, w, mode, options);
        const double h0 = mode == HeightMode::centered ? rec.H : flatness(cloud, w, HeightMode::centered, options).H;
        prof.eta_certificate = std::max(prof.eta_certificate, h0 / r);
        prof.records.push_back(std::move(rec));
    }
    return prof;
}

DecayVerdict verify_decay_bound(const HeightProfile& profile, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgument("alpha must lie in (0, 1)");
    }
    if (!(profile.eta > 0.0) || !(profile.R > 0.0)) {
        throw InvalidArgument("decay bound needs a profile with declared eta > 0 and R > 0");
    }
    if (profile.records.empty()) {
        throw InvalidArgument("empty profile");
    }
    const int n = profile.n;
    std::vector<double> bound;
    DecayVerdict v{0.0, alpha, {}, 0};
    for (std::size_t k = 0; k < profile.records.size(); ++k) {
        const auto& rec = profile.records[k];
        const double r = rec.r;
        const double b = profile.eta * r * (std::pow(r, 3.0 - n - alpha) + std::pow(r / profile.R, alpha));
        bound.push_back(b);
        const double q = rec.H / b;
        if (q > v.C_min) {
            v.C_min = q;
            v.binding = k;
        }
    }
    for (std::size_t k = 0; k < bound.size(); ++k) {
        v.slack.push_back(v.C_min > 0.0 ? profile.records[k].H / (v.C_min * bound[k]) : 0.0);
    }
    return v;
}

double mode_balance_scale(const std::vector<HarmonicMode>& modes, double r_lo, double r_hi)
{
    std::vector<std::pair<double, double>> terms;
    for (const auto& m : modes) {
        validate_mode(m);
        if (m.kind == ModeKind::growing && m.k <= 1) {
            continue;
        }
        if (m.coefficient != 0.0) {
            terms.emplace_back(std::abs(m.coefficient), m.homogeneity() - 1.0);
        }
    }
    if (terms.empty()) {
        throw NoReversal("the declared modes are all affine");
    }
    auto G = [&](double x) {
        double s = 0.0;
        for (const auto& [c, p] : terms) {
            s += c * std::exp(p * x);
        }
        return s;
    };
    double a = std::log(r_lo);
    double b = std::log(r_hi);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double g1 = G(x1);
    double g2 = G(x2);
    for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
        if (g1 <= g2) {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - phi * (b - a);
            g1 = G(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (b - a);
            g2 = G(x2);
        }
    }
    return std::exp(0.5 * (a + b));
}

double mesoscale_power_law(int n, double R, double alpha)
{
    return std::pow(R, alpha / (n + 2.0 * alpha - 3.0));
}

double mesoscale_beta(int n, double alpha)
{
    return (n + alpha - 3.0) / (n + 2.0 * alpha - 3.0);
}

Mesoscale locate_mesoscale(const HeightProfile& profile, double alpha,
                           const std::optional<std::vector<HarmonicMode>>& declared)
{
    const auto& rec = profile.records;
    if (rec.size() < 3) {
        throw NoReversal("a reversal needs at least 3 scales");
    }
    std::vector<double> x, y;
    bool positive = true;
    for (const auto& r : rec) {
        x.push_back(std::log(r.r));
        y.push_back(r.H / r.r);
        positive = positive && r.H > 0.0;
    }
    std::size_t k = 0;
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i] < y[k]) {
            k = i;
        }
    }
    if (k == 0 || k + 1 == y.size()) {
        throw NoReversal("H(r)/r attains its minimum at the end of the profile (r = " + std::to_string(rec[k].r) +
                         ")");
    }
    if (positive) {
        for (auto& v : y) {
            v = std::log(v);
        }
    }
    const double a = x[k] - x[k - 1];
    const double b = x[k] - x[k + 1];
    const double fa = y[k] - y[k - 1];
    const double fb = y[k] - y[k + 1];
    const double den = a * fb - b * fa;
    double xs = x[k];
    if (den != 0.0) {
        xs = x[k] - 0.5 * (a * a * fb - b * b * fa) / den;
        xs = std::clamp(xs, x[k - 1], x[k + 1]);
    }
    Mesoscale out;
    out.r_star_empirical = std::exp(xs);
    if (declared) {
        out.r_star_analytic = mode_balance_scale(*declared, rec.front().r, rec.back().r);
    } else {
        if (!(profile.R > 0.0)) {
            throw InvalidArgument("the power-law mesoscale needs the profile's outer scale R");
        }
        out.r_star_analytic = mesoscale_power_law(profile.n, profile.R, alpha);
    }
    out.ratio = out.r_star_empirical / out.r_star_analytic;
    return out;
}

TiltDrift tilt_drift_check(const HeightProfile& profile, std::optional<double> limit)
{
    const auto& rec = profile.records;
    TiltDrift out;
    out.C_drift = 0.0;
    if (rec.size() < 2) {
        return out;
    }
    std::vector<double> step;
    for (std::size_t k = 0; k + 1 < rec.size(); ++k) {
        const auto& A = rec[k];
        const auto& B = rec[k + 1];
        if (A.mode != HeightMode::shifted || B.mode != HeightMode::shifted) {
            throw InvalidArgument("tilt drift needs a shifted-mode profile");
        }
        if (std::abs(B.r - 2.0 * A.r) > 1e-9 * B.r) {
            throw InvalidArgument("tilt drift needs scales doubling from one record to the next");
        }
        double dot = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(A.e.dim()); ++i) {
            dot += A.e[i] * B.e[i];
        }
        const double s = dot < 0.0 ? -1.0 : 1.0;
        double de2 = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(A.e.dim()); ++i) {
            const double d = s * B.e[i] - A.e[i];
            de2 += d * d;
        }
        const double de = std::sqrt(de2);
        const double drift = A.r * de + std::abs(s * B.b - A.b);
        const double heights = A.H + B.H;
        double ratio = 0.0;
        if (heights > 0.0) {
            ratio = drift / heights;
        } else if (drift > 0.0) {
            ratio = std::numeric_limits<double>::infinity();
        }
        out.drift.push_back(drift);
        out.ratio.push_back(ratio);
        step.push_back(de);
        out.C_drift = std::max(out.C_drift, ratio);
    }
    const double C = limit ? *limit : out.C_drift;
    for (double r : out.ratio) {
        out.pass.push_back(r <= C);
    }
    out.tail.assign(step.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = step.size(); k-- > 0;) {
        acc += step[k];
        out.tail[k] = acc;
    }
    return out;
}

}  // namespace flatlab
