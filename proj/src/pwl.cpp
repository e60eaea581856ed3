#include "tdo/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdo/errors.hpp"

namespace tdo {

namespace {

double lerp(double t0, double v0, double t1, double v1, double t) {
    return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

bool nearly_equal(double a, double b, double scale) {
    return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(scale), std::fabs(a), std::fabs(b)});
}

} // namespace

PwlFunction::PwlFunction(std::vector<Breakpoint> points, double period)
    : points_(std::move(points)), period_(period) {
    if (!(period_ > 0.0) || !std::isfinite(period_))
        throw InvariantError("pwl: period must be positive and finite");
    if (points_.empty())
        throw InvariantError("pwl: at least one breakpoint required");
    double prev = -1.0;
    for (const auto& p : points_) {
        if (!std::isfinite(p.t) || !std::isfinite(p.value))
            throw InvariantError("pwl: non-finite breakpoint");
        if (p.t < 0.0 || p.t >= period_)
            throw InvariantError("pwl: breakpoint time " + std::to_string(p.t) + " outside [0, period)");
        if (p.t <= prev)
            throw InvariantError("pwl: breakpoint times must be strictly increasing");
        if (!(p.value > 0.0))
            throw InvariantError("pwl: breakpoint values must be strictly positive");
        prev = p.t;
    }
}

PwlFunction PwlFunction::constant(double value, double period) {
    return PwlFunction({{0.0, value}}, period);
}

double PwlFunction::eval(double t) const {
    if (points_.size() == 1) return points_[0].value;
    double x = std::fmod(t, period_);
    if (x < 0.0) x += period_;

    // Last breakpoint with time <= x.
    auto it = std::upper_bound(points_.begin(), points_.end(), x,
                               [](double v, const Breakpoint& b) { return v < b.t; });
    if (it == points_.begin()) {
        // Before the first breakpoint: wrap segment from the previous period.
        const Breakpoint& a = points_.back();
        const Breakpoint& b = points_.front();
        return lerp(a.t - period_, a.value, b.t, b.value, x);
    }
    const std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
    if (i + 1 == points_.size()) {
        const Breakpoint& a = points_.back();
        const Breakpoint& b = points_.front();
        return lerp(a.t, a.value, b.t + period_, b.value, x);
    }
    const Breakpoint& a = points_[i];
    const Breakpoint& b = points_[i + 1];
    if (x == a.t) return a.value;
    return lerp(a.t, a.value, b.t, b.value, x);
}

double PwlFunction::arrival(double t) const { return t + eval(t); }

std::pair<double, double> PwlFunction::slope_range() const {
    if (points_.size() == 1) return {0.0, 0.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double s = (points_[i + 1].value - points_[i].value) / (points_[i + 1].t - points_[i].t);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double wrap = (points_.front().value - points_.back().value) /
                        (period_ - points_.back().t + points_.front().t);
    lo = std::min(lo, wrap);
    hi = std::max(hi, wrap);
    return {lo, hi};
}

int PwlFunction::count_concavity_spoiling() const {
    const std::size_t k = points_.size();
    if (k < 2) return 0;
    // Piece i runs from breakpoint i to i+1; piece k-1 is the wrap segment.
    auto piece_slope = [&](std::size_t i) {
        if (i + 1 < k)
            return (points_[i + 1].value - points_[i].value) / (points_[i + 1].t - points_[i].t);
        return (points_.front().value - points_.back().value) /
               (period_ - points_.back().t + points_.front().t);
    };
    int count = 0;
    for (std::size_t j = 0; j < k; ++j) {
        const double incoming = piece_slope((j + k - 1) % k);
        const double outgoing = piece_slope(j);
        const double scale = std::max({1.0, std::fabs(incoming), std::fabs(outgoing)});
        if (outgoing > incoming + 1e-9 * scale) ++count;
    }
    return count;
}

bool PwlFunction::fifo_valid(double tol) const {
    return slope_range().first >= -1.0 - tol;
}

double PwlFunction::min_value() const {
    double m = points_[0].value;
    for (const auto& p : points_) m = std::min(m, p.value);
    return m;
}

double PwlFunction::max_value() const {
    double m = points_[0].value;
    for (const auto& p : points_) m = std::max(m, p.value);
    return m;
}

PwlFunction PwlFunction::compressed() const {
    if (points_.size() < 3) return *this;
    std::vector<Breakpoint> out;
    out.reserve(points_.size());
    out.push_back(points_[0]);
    for (std::size_t i = 1; i + 1 < points_.size(); ++i) {
        const Breakpoint& a = out.back();
        const Breakpoint& b = points_[i];
        const Breakpoint& c = points_[i + 1];
        const double cross = (b.t - a.t) * (c.value - a.value) - (c.t - a.t) * (b.value - a.value);
        const double scale = (c.t - a.t) * std::max({1.0, std::fabs(a.value), std::fabs(c.value)});
        if (std::fabs(cross) <= 1e-12 * scale) continue; // collinear, drop b
        out.push_back(b);
    }
    out.push_back(points_.back());
    return PwlFunction(std::move(out), period_);
}

double compose_arrival(const std::vector<PwlFunction>& legs, double t) {
    double cur = t;
    for (const auto& f : legs) cur = f.arrival(cur);
    return cur;
}

PwlFunction min_envelope(const PwlFunction& f, const PwlFunction& g) {
    if (!nearly_equal(f.period(), g.period(), f.period()))
        throw InvariantError("min_envelope: periods differ");
    const double T = f.period();

    // Union of breakpoint times, deduplicated.
    std::vector<double> times;
    times.reserve(f.size() + g.size());
    for (const auto& p : f.breakpoints()) times.push_back(p.t);
    for (const auto& p : g.breakpoints()) times.push_back(p.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(),
                            [&](double a, double b) { return std::fabs(a - b) <= 1e-12 * T; }),
                times.end());

    std::vector<Breakpoint> out;
    out.reserve(times.size() * 2);
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double ta = times[j];
        const double tb = (j + 1 < times.size()) ? times[j + 1] : times[0] + T;
        const double fa = f.eval(ta), ga = g.eval(ta);
        const double fb = f.eval(tb), gb = g.eval(tb);
        out.push_back({ta, std::min(fa, ga)});
        // Both functions are linear on (ta, tb); insert a transversal crossing.
        const double da = fa - ga;
        const double db = fb - gb;
        const double scale = std::max({1.0, std::fabs(fa), std::fabs(ga), std::fabs(fb), std::fabs(gb)});
        const double tol = 1e-12 * scale;
        if ((da > tol && db < -tol) || (da < -tol && db > tol)) {
            const double tc = ta + (tb - ta) * (da / (da - db));
            if (tc > ta + 1e-12 * T && tc < tb - 1e-12 * T) {
                const double vc = f.eval(tc); // equal on both by construction
                out.push_back({tc, std::min(vc, g.eval(tc))});
            }
        }
    }
    // a crossing inside the wrap interval can land past the period; fold it
    // back and restore the ordering
    bool folded = false;
    for (auto& p : out) {
        if (p.t >= T) {
            p.t -= T;
            folded = true;
        }
    }
    if (folded) {
        std::sort(out.begin(), out.end(),
                  [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });
        out.erase(std::unique(out.begin(), out.end(),
                              [&](const Breakpoint& a, const Breakpoint& b) {
                                  return std::fabs(a.t - b.t) <= 1e-12 * T;
                              }),
                  out.end());
    }
    return PwlFunction(std::move(out), T);
}

} // namespace tdo
