#include "flatlab/quadrature.hpp"

#include "flatlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

namespace flatlab {

namespace {

// Kronrod abscissae on [0, 1]; odd indices are the Gauss nodes.
constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double hl = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw QuadratureFailure("integrand is not finite at x = " + std::to_string(x));
        }
        return v;
    };
    const double fc = eval(c);
    double rk = wk[7] * fc;
    double rg = wg[3] * fc;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = hl * xk[i];
        const double s = eval(c - dx) + eval(c + dx);
        rk += wk[i] * s;
        if (i % 2 == 1) {
            rg += wg[i / 2] * s;
        }
    }
    return {a, b, rk * hl, std::abs((rk - rg) * hl)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           std::size_t max_intervals)
{
    if (!(abs_tol > 0.0)) {
        throw InvalidArgument("quadrature tolerance must be positive");
    }
    if (a == b) {
        return {0.0, 0.0, 0};
    }
    const double sign = b < a ? -1.0 : 1.0;
    if (b < a) {
        std::swap(a, b);
    }
    std::priority_queue<Segment> heap;
    Segment first = kronrod(f, a, b);
    double err = first.error;
    heap.push(first);
    while (err > abs_tol) {
        if (heap.size() >= max_intervals) {
            throw QuadratureFailure("error estimate " + std::to_string(err) + " above tolerance after " +
                                    std::to_string(heap.size()) + " intervals");
        }
        const Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b)) {
            throw QuadratureFailure("interval cannot be bisected further");
        }
        const Segment l = kronrod(f, s.a, mid);
        const Segment r = kronrod(f, mid, s.b);
        err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
    }
    double sum = 0.0;
    double esum = 0.0;
    const std::size_t count = heap.size();
    std::vector<Segment> all;
    all.reserve(count);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    for (const auto& s : all) {
        sum += s.value;
        esum += s.error;
    }
    return {sign * sum, esum, count};
}

}  // namespace flatlab
