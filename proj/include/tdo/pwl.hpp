#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace tdo {

struct Breakpoint {
    double t;     // departure time in [0, period)
    double value; // travel time, > 0
};

/// Continuous periodic piecewise-linear travel-time function.
///
/// Stored as a sorted breakpoint list over [0, period); the wrap segment from
/// the last breakpoint back to the first one (one period later) is implicit,
/// so the represented function is continuous by construction. A single
/// breakpoint denotes a constant function.
class PwlFunction {
public:
    PwlFunction(std::vector<Breakpoint> points, double period);

    static PwlFunction constant(double value, double period);

    /// Linear interpolation at t mod period; total for any t >= 0.
    double eval(double t) const;

    /// t + eval(t); nondecreasing in t whenever the function is FIFO.
    double arrival(double t) const;

    /// (min, max) slope over all pieces including the wrap segment.
    std::pair<double, double> slope_range() const;

    /// Junctions (including the wrap junction) where the slope increases.
    int count_concavity_spoiling() const;

    /// FIFO holds iff every slope is >= -1.
    bool fifo_valid(double tol = 1e-12) const;

    double min_value() const;
    double max_value() const;

    const std::vector<Breakpoint>& breakpoints() const { return points_; }
    double period() const { return period_; }
    std::size_t size() const { return points_.size(); }

    /// Drops interior breakpoints that are collinear with their neighbours.
    PwlFunction compressed() const;

private:
    std::vector<Breakpoint> points_;
    double period_;
};

/// Folds arrival functions left to right: Arr[a_k](...Arr[a_1](t)...).
double compose_arrival(const std::vector<PwlFunction>& legs, double t);

/// Pointwise minimum. Output breakpoints are the union of the input
/// breakpoints plus transversal crossing points; collinear overlaps keep the
/// first function's breakpoints.
PwlFunction min_envelope(const PwlFunction& f, const PwlFunction& g);

} // namespace tdo
