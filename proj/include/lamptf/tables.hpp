#pragma once

#include <complex>
#include <string>

#include "lamptf/bvp.hpp"
#include "lamptf/io.hpp"
#include "lamptf/phase.hpp"

namespace lamptf {

/// Fixed-point companion table: one row per equilibrium with the
/// trace/determinant/discriminant triple and the classified kind.
inline CsvTable fixed_point_table(const std::vector<FixedPoint>& points) {
    CsvTable t({"index", "X", "Y", "delta1", "delta2", "Delta", "kind", "note"});
    for (std::size_t i = 0; i < points.size(); ++i) {
        const FixedPoint& fp = points[i];
        t.add_row({std::to_string(i), fmt17(fp.coords.x), fmt17(fp.coords.y), fmt17(fp.trace),
                   fmt17(fp.det), fmt17(fp.discriminant), to_string(fp.kind), fp.note});
    }
    return t;
}

/// Solution curve as (x, y, dy) rows.
inline CsvTable curve_table(const SolutionCurve& curve) {
    CsvTable t({"x", "y", "dy"});
    for (const auto& s : curve.samples) t.add_numeric_row({s.t, s.state[0], s.state[1]});
    return t;
}

/// (w, alpha) sample table of an integrability report.
inline CsvTable alpha_table(const std::vector<std::pair<double, double>>& samples) {
    CsvTable t({"w", "alpha"});
    for (const auto& [w, a] : samples) t.add_numeric_row({w, a});
    return t;
}

} // namespace lamptf
