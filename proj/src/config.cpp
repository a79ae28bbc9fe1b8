#include "flatlab/config.hpp"

#include "flatlab/errors.hpp"
#include "flatlab/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace flatlab {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class Int>
Int parse_int(std::string_view v)
{
    Int x{};
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw FormatError("not an integer: '" + std::string(v) + "'");
    }
    return x;
}

// Throws FormatError on a bad value and InvalidArgument on an unknown key.
void assign(ExperimentConfig& c, std::string_view key, std::string_view value)
{
    if (key == "experiment") {
        c.experiment = std::string(value);
    } else if (key == "n") {
        c.n = parse_int<int>(value);
    } else if (key == "alpha") {
        c.alpha = parse_double(value);
    } else if (key == "beta") {
        c.beta = parse_double(value);
    } else if (key == "eta") {
        c.eta = parse_double(value);
    } else if (key == "R") {
        c.R = parse_double(value);
    } else if (key == "sigma") {
        c.sigma = parse_double(value);
    } else if (key == "radial") {
        c.radial = parse_int<int>(value);
    } else if (key == "angular") {
        c.angular = parse_int<int>(value);
    } else if (key == "seed") {
        c.seed = parse_int<std::uint64_t>(value);
    } else if (key == "out") {
        c.out = std::string(value);
    } else {
        throw InvalidArgument("unknown key '" + std::string(key) + "'");
    }
}

}  // namespace

const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> kinds{"catenoid-fit", "decay-verify",       "mesoscale",
                                                "kelvin-check", "solver-convergence", "sheet-demo"};
    return kinds;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base)
{
    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++lineno;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(lineno, "expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(lineno, "empty key or value");
        }
        try {
            assign(base, key, value);
        } catch (const Error& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return base;
}

void apply_override(ExperimentConfig& config, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    }
    try {
        assign(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
    } catch (const Error& e) {
        throw ConfigError(std::string("override '") + std::string(assignment) + "': " + e.what());
    }
}

std::vector<std::string> validate(const ExperimentConfig& c)
{
    std::vector<std::string> out;
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.experiment) == kinds.end()) {
        out.push_back("experiment '" + c.experiment + "' is not a known kind");
    }
    if (c.n < 3 || c.n > 7) {
        out.push_back("n out of [3,7]");
    }
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
        out.push_back("alpha out of (0,1)");
    }
    if (!(c.beta > 0.0 && c.beta < 1.0)) {
        out.push_back("beta out of (0,1)");
    }
    if (!(c.eta > 0.0 && std::isfinite(c.eta))) {
        out.push_back("eta must be positive");
    }
    if (!(c.R >= 16.0 && std::isfinite(c.R))) {
        out.push_back("R must be at least 16");
    }
    if (!(c.sigma >= 0.0 && std::isfinite(c.sigma))) {
        out.push_back("sigma must be nonnegative");
    }
    if (c.radial < 9) {
        out.push_back("radial must be at least 9");
    }
    if (c.angular < 8) {
        out.push_back("angular must be at least 8");
    }
    if ((c.experiment == "decay-verify" || c.experiment == "mesoscale") && c.n != 3) {
        out.push_back(c.experiment + " needs n = 3");
    }
    return out;
}

std::string to_text(const ExperimentConfig& c)
{
    std::string s;
    s += "experiment = " + c.experiment + "\n";
    s += "n = " + std::to_string(c.n) + "\n";
    s += "alpha = " + format_double(c.alpha) + "\n";
    s += "beta = " + format_double(c.beta) + "\n";
    s += "eta = " + format_double(c.eta) + "\n";
    s += "R = " + format_double(c.R) + "\n";
    s += "sigma = " + format_double(c.sigma) + "\n";
    s += "radial = " + std::to_string(c.radial) + "\n";
    s += "angular = " + std::to_string(c.angular) + "\n";
    s += "seed = " + std::to_string(c.seed) + "\n";
    if (!c.out.empty()) {
        s += "out = " + c.out + "\n";
    }
    return s;
}

}  // namespace flatlab
