#include "umlab/grid.hpp"

#include <stdexcept>

namespace umlab {

TimeGrid::TimeGrid(Vec times) : times_(std::move(times)) {
    if (times_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (times_[0] != 0.0) throw std::invalid_argument("TimeGrid: first point must be 0");
    for (Index k = 0; k + 1 < times_.size(); ++k) {
        if (!(times_[k + 1] > times_[k]))
            throw std::invalid_argument("TimeGrid: times must be strictly increasing");
    }
    if (!(horizon() > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
}

TimeGrid TimeGrid::uniform(double horizon, Index n_steps) {
    if (n_steps < 1) throw std::invalid_argument("TimeGrid::uniform: need at least 1 step");
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid::uniform: horizon must be positive");
    Vec t(n_steps + 1);
    for (Index k = 0; k <= n_steps; ++k) {
        t[k] = horizon * static_cast<double>(k) / static_cast<double>(n_steps);
    }
    t[n_steps] = horizon;
    return TimeGrid(std::move(t));
}

}  // namespace umlab
