#pragma once

#include "umlab/types.hpp"

namespace umlab {

/// Strictly increasing time points from 0 to the horizon T > 0.
class TimeGrid {
  public:
    explicit TimeGrid(Vec times);

    static TimeGrid uniform(double horizon, Index n_steps);

    const Vec& times() const { return times_; }
    double t(Index k) const { return times_[k]; }
    double dt(Index k) const { return times_[k + 1] - times_[k]; }
    Index n_steps() const { return times_.size() - 1; }
    Index n_points() const { return times_.size(); }
    double horizon() const { return times_[times_.size() - 1]; }

    bool operator==(const TimeGrid& other) const {
        return times_.size() == other.times_.size() && (times_ == other.times_).all();
    }

  private:
    Vec times_;
};

}  // namespace umlab
