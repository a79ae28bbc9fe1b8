#pragma once

#include "flatlab/analysis.hpp"
#include "flatlab/geometry.hpp"
#include "flatlab/harmonic.hpp"
#include "flatlab/minimal.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace flatlab {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

/// Header x1..xn, one row per point.
std::string cloud_to_csv(const PointCloud& cloud);
PointCloud cloud_from_csv(std::string_view text);

/// Header rho,theta,f for m = 2 and rho,u1..um,f otherwise; rows run over
/// directions fastest.
std::string graph_to_csv(const SampledGraph& graph);
SampledGraph graph_from_csv(std::string_view text);

/// {ambient_dim, kind, nodes, values}; kind is "cloud" or "graph".
std::string cloud_to_json(const PointCloud& cloud);
PointCloud cloud_from_json(std::string_view text);
std::string graph_to_json(const SampledGraph& graph);
SampledGraph graph_from_json(std::string_view text);

/// [{m, k, kind, axis, coeff}]
std::string modes_to_json(const std::vector<HarmonicMode>& modes);
std::vector<HarmonicMode> modes_from_json(std::string_view text);

/// Header theta,value.
std::string trace_to_csv(const std::vector<double>& theta, const std::vector<double>& values);
std::pair<std::vector<double>, std::vector<double>> trace_from_csv(std::string_view text);

/// {iters, residuals, deviation, h}
std::string solver_report_to_json(const SolverReport& report);

/// Header r,H,H_over_r,e1..en,b
std::string profile_to_csv(const HeightProfile& profile);

}  // namespace flatlab
