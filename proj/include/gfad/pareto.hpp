#pragma once

#include <cstddef>
#include <vector>

namespace gfad {

struct ParetoPoint {
    double complexity = 0.0;
    double loss = 0.0;
    /// Caller-defined tag (e.g. grid index); carried through unchanged.
    int tag = 0;
};

/// True when a is at least as good as b in both coordinates and strictly
/// better in one.
inline bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
    return a.complexity <= b.complexity && a.loss <= b.loss &&
           (a.complexity < b.complexity || a.loss < b.loss);
}

/// Non-dominated subset ordered by complexity (ties by loss, then tag).
std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points);

} // namespace gfad
