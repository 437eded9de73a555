#include "gfad/pareto.hpp"

#include "gfad/error.hpp"

#include <algorithm>

namespace gfad {

std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points) {
    if (points.empty()) throw ConfigError("pareto_front: empty input");
    std::vector<ParetoPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.complexity != b.complexity) return a.complexity < b.complexity;
        if (a.loss != b.loss) return a.loss < b.loss;
        return a.tag < b.tag;
    });
    // Sweep by increasing complexity. A point survives when its loss beats every
    // strictly cheaper point, or it exactly ties the best point of its own
    // complexity group.
    std::vector<ParetoPoint> front;
    double best_cheaper = 0.0;
    bool have_cheaper = false;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].complexity == sorted[i].complexity) ++j;
        const double group_best = sorted[i].loss;
        if (!have_cheaper || group_best < best_cheaper) {
            for (std::size_t g = i; g < j && sorted[g].loss == group_best; ++g) front.push_back(sorted[g]);
            best_cheaper = group_best;
            have_cheaper = true;
        }
        i = j;
    }
    return front;
}

} // namespace gfad
