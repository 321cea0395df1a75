#ifndef LAGFLOW_FLOW_ENGINE_HPP
#define LAGFLOW_FLOW_ENGINE_HPP

// Shared partition-counting engine behind the Maslov index and the spectral
// flow. A path is abstracted to t |-> sorted "positions": eigenphases
// relative to pi for unitary paths (cyclic metric), eigenvalues for
// self-adjoint paths. The engine adaptively bisects [0,1] into segments on
// which a counting window [0, eps_j) stays clear of the spectrum at the
// window edge, and sums the counter increments of Phillips's definition.

#include <lagflow/util.hpp>

#include <functional>
#include <limits>
#include <vector>

namespace lagflow {

struct FlowOptions {
  double cap = kPi / 2;      // upper bound for the window size eps_j
  double zero_tol = 1e-8;    // positions within this of 0 count as at 0
  double safety = 0.4;       // accepted motion as a fraction of the edge margin
  double eps_fraction = 0.5; // where inside the largest gap eps_j is placed
  int initial_segments = 1;  // forced minimum partition (tests use > 1)
  int min_depth = 4;         // bisection depth below which no segment is accepted
  long budget = 1L << 20;    // evaluator-call budget
  bool cyclic = false;       // positions live on (-pi, pi]
  double edge = std::numeric_limits<double>::infinity();
  // |position| beyond which appearing/disappearing positions are allowed
  // (finite spectral windows); motion to the edge is not penalized.
};

using PositionPath = std::function<std::vector<double>(double)>;

struct FlowRefinementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double pos_dist(double a, double b, const FlowOptions& o) {
  double d = std::abs(a - b);
  if (o.cyclic) d = std::min(d, 2.0 * kPi - d);
  return d;
}

/// One-sided motion of positions from `a` toward `b`; points may leave
/// through the window edge at |edge|.
inline double directed_motion(const std::vector<double>& a, const std::vector<double>& b,
                              const FlowOptions& o) {
  double worst = 0.0;
  for (double p : a) {
    double best = std::isinf(o.edge) ? std::numeric_limits<double>::infinity()
                                     : std::abs(o.edge - std::abs(p));
    for (double q : b) best = std::min(best, pos_dist(p, q, o));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double motion(const std::vector<double>& a, const std::vector<double>& b,
                     const FlowOptions& o) {
  return std::max(directed_motion(a, b, o), directed_motion(b, a, o));
}

/// Counter k: number of positions in [0, eps), with positions within
/// zero_tol of 0 counting as at 0.
inline int count_window(const std::vector<double>& pos, double eps, const FlowOptions& o) {
  int k = 0;
  for (double p : pos)
    if (p >= -o.zero_tol && p < eps) ++k;
  return k;
}

/// Window size: a point in the largest spectral gap of (0, cap] over the
/// union of the two endpoint spectra.
inline double choose_eps(const std::vector<double>& a, const std::vector<double>& b,
                         const FlowOptions& o) {
  std::vector<double> pts;
  for (const auto* v : {&a, &b})
    for (double p : *v)
      if (p > o.zero_tol && p < o.cap) pts.push_back(p);
  pts.push_back(0.0);
  pts.push_back(o.cap);
  std::sort(pts.begin(), pts.end());
  double best_lo = 0.0, best_gap = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double g = pts[i + 1] - pts[i];
    if (g > best_gap) { best_gap = g; best_lo = pts[i]; }
  }
  return best_lo + o.eps_fraction * best_gap;
}

inline double margin(const std::vector<double>& pos, double eps, const FlowOptions& o) {
  double m = std::numeric_limits<double>::infinity();
  for (double p : pos) m = std::min(m, pos_dist(p, eps, o));
  return m;
}

struct FlowState {
  const PositionPath& path;
  const FlowOptions& opts;
  long evals = 0;

  std::vector<double> eval(double t) {
    if (++evals > opts.budget)
      throw FlowRefinementError("flow engine: refinement budget exhausted; "
                                "evaluator may be discontinuous");
    return path(t);
  }

  int count(double ta, double tb, const std::vector<double>& pa,
            const std::vector<double>& pb, int depth) {
    double eps = choose_eps(pa, pb, opts);
    double marg = std::min(margin(pa, eps, opts), margin(pb, eps, opts));
    // Endpoint data alone cannot rule out a position winding all the way
    // around the window between two matching spectra, so segments coarser
    // than min_depth are always split.
    if (depth >= opts.min_depth && motion(pa, pb, opts) <= opts.safety * marg)
      return count_window(pb, eps, opts) - count_window(pa, eps, opts);
    if (depth > 60 || tb - ta < 1e-14)
      throw FlowRefinementError("flow engine: segment refinement did not converge");
    double tm = 0.5 * (ta + tb);
    std::vector<double> pm = eval(tm);
    return count(ta, tm, pa, pm, depth + 1) + count(tm, tb, pm, pb, depth + 1);
  }
};

}  // namespace detail

/// Net signed count of positions crossing 0 along the path, per the
/// partitioned-window definition.
inline int signed_zero_flow(const PositionPath& path, const FlowOptions& opts = {}) {
  detail::FlowState st{path, opts};
  int total = 0;
  int segs = std::max(1, opts.initial_segments);
  int depth0 = 0;  // an explicit initial partition counts toward min_depth
  while ((1 << depth0) < segs) ++depth0;
  std::vector<double> prev = st.eval(0.0);
  double tprev = 0.0;
  for (int j = 1; j <= segs; ++j) {
    double t = static_cast<double>(j) / segs;
    std::vector<double> cur = st.eval(t);
    total += st.count(tprev, t, prev, cur, depth0);
    tprev = t;
    prev = std::move(cur);
  }
  return total;
}

}  // namespace lagflow

#endif
