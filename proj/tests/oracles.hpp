#pragma once

// Reference computations that share no code with the library: exhaustive
// path search, quadrature, 1-d maximization and a brute-force grid minimizer
// over products of flow simplices.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace oracle {

struct RawEdge {
  std::string id;
  std::string tail;
  std::string head;
};

// Every simple directed path, as edge-id sequences, sorted.
inline std::vector<std::vector<std::string>> simple_paths(const std::vector<RawEdge>& edges,
                                                          const std::string& from,
                                                          const std::string& to) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> stack;
  std::vector<std::string> visited{from};
  std::function<void(const std::string&)> walk = [&](const std::string& at) {
    if (at == to) {
      out.push_back(stack);
      return;
    }
    for (const RawEdge& e : edges) {
      if (e.tail != at) continue;
      if (std::find(visited.begin(), visited.end(), e.head) != visited.end()) continue;
      visited.push_back(e.head);
      stack.push_back(e.id);
      walk(e.head);
      stack.pop_back();
      visited.pop_back();
    }
  };
  walk(from);
  std::sort(out.begin(), out.end());
  return out;
}

// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Golden-section search for the maximum of a unimodal f on [lo, hi].
inline double maximize_1d(const std::function<double(double)>& f, double lo, double hi) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 300 && b - a > 1e-13 * (1.0 + std::abs(a)); ++i) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return f(0.5 * (a + b));
}

inline double minimize_1d(const std::function<double(double)>& f, double lo, double hi) {
  return -maximize_1d([&](double x) { return -f(x); }, lo, hi);
}

// min sum_e g_e(x_e) over path flows with sum over each OD's paths equal to
// its demand. Paths are lists of edge indices.
struct GridProblem {
  std::vector<std::function<double(double)>> edge_objective;
  std::vector<std::vector<std::vector<int>>> od_paths;
  std::vector<double> mu;
};

struct GridSolution {
  std::vector<double> x;
  std::vector<std::vector<double>> shares;  // per OD, fractions of its demand
  double value = std::numeric_limits<double>::infinity();
};

namespace detail {

// All share vectors of length k on the lattice of `step` around `centre`
// (within +-radius lattice steps), or the whole simplex when centre is empty.
inline std::vector<std::vector<double>> lattice(std::size_t k, double step,
                                                const std::vector<double>& centre,
                                                int radius) {
  std::vector<std::vector<double>> out;
  std::vector<double> w(k, 0.0);
  if (k == 1) return {{1.0}};
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double used) {
    if (i + 1 == k) {
      const double last = 1.0 - used;
      if (last < -1e-12) return;
      w[i] = std::max(0.0, last);
      out.push_back(w);
      return;
    }
    if (centre.empty()) {
      const int n = static_cast<int>(std::lround(1.0 / step));
      const int used_steps = static_cast<int>(std::lround(used / step));
      for (int j = 0; j + used_steps <= n; ++j) {
        w[i] = j * step;
        rec(i + 1, used + w[i]);
      }
    } else {
      for (int j = -radius; j <= radius; ++j) {
        const double v = centre[i] + j * step;
        if (v < -1e-12 || used + v > 1.0 + 1e-12) continue;
        w[i] = std::max(0.0, v);
        rec(i + 1, used + w[i]);
      }
    }
  };
  rec(0, 0.0);
  return out;
}

}  // namespace detail

// Coarse search over the whole product of simplices, then repeated local
// refinement with a ten times finer lattice around the incumbent.
inline GridSolution grid_minimize(const GridProblem& prob, std::size_t num_edges,
                                  const std::vector<double>& steps) {
  GridSolution best;
  const std::size_t H = prob.od_paths.size();
  best.shares.assign(H, {});
  for (std::size_t level = 0; level < steps.size(); ++level) {
    std::vector<std::vector<std::vector<double>>> options(H);
    for (std::size_t h = 0; h < H; ++h)
      options[h] = detail::lattice(prob.od_paths[h].size(), steps[level],
                                   level == 0 ? std::vector<double>{} : best.shares[h], 15);
    GridSolution round = best;
    std::vector<double> x(num_edges, 0.0);
    std::vector<std::vector<double>> pick(H);
    std::function<void(std::size_t)> rec = [&](std::size_t h) {
      if (h == H) {
        double v = 0.0;
        for (std::size_t e = 0; e < num_edges; ++e) v += prob.edge_objective[e](x[e]);
        if (v < round.value) {
          round.value = v;
          round.x = x;
          round.shares = pick;
        }
        return;
      }
      for (const auto& w : options[h]) {
        for (std::size_t p = 0; p < w.size(); ++p)
          for (int e : prob.od_paths[h][p]) x[static_cast<std::size_t>(e)] += w[p] * prob.mu[h];
        pick[h] = w;
        rec(h + 1);
        for (std::size_t p = 0; p < w.size(); ++p)
          for (int e : prob.od_paths[h][p]) x[static_cast<std::size_t>(e)] -= w[p] * prob.mu[h];
      }
    };
    rec(0);
    best = round;
  }
  return best;
}

// Affine cost a x + b: Beckmann integrand and total cost, in closed form.
inline std::function<double(double)> affine_potential(double a, double b) {
  return [a, b](double x) { return 0.5 * a * x * x + b * x; };
}
inline std::function<double(double)> affine_total(double a, double b) {
  return [a, b](double x) { return x * (a * x + b); };
}

}  // namespace oracle
