#include "rfeas/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rfeas/error.hpp"
#include "rfeas/parallel.hpp"
#include "rfeas/random.hpp"

namespace rfeas {

double Box::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < dims(); ++k) v *= hi[k] - lo[k];
  return v;
}

void Box::check() const {
  if (lo.size() != hi.size()) throw Error(ErrorCode::DimensionMismatch, "box bounds differ in length");
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] < hi[k])) {
      throw Error(ErrorCode::InvalidBounds, "box needs finite lo < hi in every dimension");
    }
  }
}

LocalResult golden_section(const std::function<double(double)>& f, double a, double b, double fa,
                           double fb, double x_tol, double f_tol, long max_evals) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  LocalResult out;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  out.evals = 2;
  while (true) {
    const double width = b - a;
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() *
                         std::max({1.0, std::fabs(a), std::fabs(b)});
    if (width < x_tol && std::max(fa, fb) - std::min(fc, fd) < f_tol) {
      out.converged = true;
      break;
    }
    if (width <= floor) {
      out.converged = width < x_tol;
      break;
    }
    if (out.evals >= max_evals) break;
    if (fc <= fd) {
      b = d;
      fb = fd;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      fa = fc;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++out.evals;
  }
  // Best of the four tracked points; ties resolve toward the lower end.
  const double xs[4] = {a, c, d, b};
  const double fs[4] = {fa, fc, fd, fb};
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  out.x = {xs[best]};
  out.f = fs[best];
  return out;
}

namespace {

void clamp_to(std::vector<double>& x, const Box& box) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::clamp(x[k], box.lo[k], box.hi[k]);
}

LocalResult nelder_mead_once(const Objective& f, const std::vector<double>& start,
                             const std::vector<double>& step, const Box& box, double x_tol,
                             double f_tol, long max_evals) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  LocalResult out;
  clamp_to(pts[0], box);
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = pts[i + 1];
    p = pts[0];
    double h = step[i];
    if (p[i] + h > box.hi[i]) h = -h;
    p[i] += h;
    clamp_to(p, box);
  }
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);
  out.evals = static_cast<long>(n + 1);

  std::vector<std::size_t> order(n + 1);
  auto eval = [&](std::vector<double> x) {
    clamp_to(x, box);
    const double v = f(x);
    ++out.evals;
    return std::make_pair(std::move(x), v);
  };

  while (true) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return vals[i] < vals[j]; });
    {
      std::vector<std::vector<double>> p2;
      std::vector<double> v2;
      for (std::size_t i : order) {
        p2.push_back(pts[i]);
        v2.push_back(vals[i]);
      }
      pts.swap(p2);
      vals.swap(v2);
    }
    double fspread = 0.0;
    double xspread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      fspread = std::max(fspread, std::fabs(vals[i] - vals[0]));
      for (std::size_t k = 0; k < n; ++k) xspread = std::max(xspread, std::fabs(pts[i][k] - pts[0][k]));
    }
    if (fspread <= f_tol && xspread <= x_tol) {
      out.converged = true;
      break;
    }
    if (out.evals >= max_evals) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + t * (pts[n][k] - centroid[k]);
      return x;
    };

    auto [xr, fr] = eval(along(-1.0));
    if (fr < vals[0]) {
      auto [xe, fe] = eval(along(-2.0));
      if (fe < fr) {
        pts[n] = std::move(xe);
        vals[n] = fe;
      } else {
        pts[n] = std::move(xr);
        vals[n] = fr;
      }
      continue;
    }
    if (fr < vals[n - 1]) {
      pts[n] = std::move(xr);
      vals[n] = fr;
      continue;
    }
    const bool outside = fr < vals[n];
    auto [xc, fc] = eval(along(outside ? -0.5 : 0.5));
    if (fc < std::min(fr, vals[n])) {
      pts[n] = std::move(xc);
      vals[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
      auto [xs, fs] = eval(pts[i]);
      pts[i] = std::move(xs);
      vals[i] = fs;
    }
  }
  out.x = pts[0];
  out.f = vals[0];
  return out;
}

}  // namespace

LocalResult nelder_mead(const Objective& f, std::vector<double> start, const std::vector<double>& step,
                        const Box& box, double x_tol, double f_tol, long max_evals) {
  LocalResult first = nelder_mead_once(f, start, step, box, x_tol, f_tol, max_evals);
  if (!first.converged || first.evals >= max_evals) return first;
  // One restart from the converged point guards against a collapsed simplex.
  std::vector<double> small(step.size());
  for (std::size_t k = 0; k < step.size(); ++k) small[k] = std::max(step[k] * 0.1, 10.0 * x_tol);
  LocalResult second = nelder_mead_once(f, first.x, small, box, x_tol, f_tol, max_evals - first.evals);
  second.evals += first.evals;
  if (second.f > first.f) {
    first.evals = second.evals;
    return first;
  }
  return second;
}

std::vector<std::vector<double>> halton_points(std::size_t count, std::size_t dims, std::uint64_t seed) {
  static constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                         37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};
  constexpr std::size_t kPrimeCount = sizeof kPrimes / sizeof kPrimes[0];
  std::vector<double> shift(dims);
  for (std::size_t d = 0; d < dims; ++d) shift[d] = SplitMix64::stream(seed, d).uniform();
  std::vector<std::vector<double>> pts(count, std::vector<double>(dims));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      double h = 0.0;
      if (d < kPrimeCount) {
        const double base = kPrimes[d];
        double frac = 1.0 / base;
        for (std::size_t k = i + 1; k > 0; k /= kPrimes[d]) {
          h += static_cast<double>(k % kPrimes[d]) * frac;
          frac /= base;
        }
      } else {
        h = SplitMix64::stream(seed ^ 0x5bd1e995ULL, i * dims + d).uniform();
      }
      double u = h + shift[d];
      pts[i][d] = u - std::floor(u);
    }
  }
  return pts;
}

MultistartResult multistart_minimize(const Objective& f, const Box& box, const MultistartOptions& opts) {
  box.check();
  const std::size_t n = box.dims();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "cannot minimize over an empty box");
  MultistartResult result;
  std::vector<std::vector<double>> starts;
  std::vector<std::vector<double>> steps;

  if (n <= 2) {
    const std::size_t g = static_cast<std::size_t>(std::max(opts.grid_per_dim, 2));
    std::vector<std::vector<double>> axis(n, std::vector<double>(g));
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < g; ++i) {
        axis[k][i] = i + 1 == g ? box.hi[k]
                                : box.lo[k] + (box.hi[k] - box.lo[k]) * static_cast<double>(i) /
                                                  static_cast<double>(g - 1);
      }
    }
    const std::size_t total = n == 1 ? g : g * g;
    std::vector<double> values(total);
    parallel_for(total, opts.threads, [&](std::size_t idx) {
      std::vector<double> x(n);
      x[0] = axis[0][idx % g];
      if (n == 2) x[1] = axis[1][idx / g];
      values[idx] = f(x);
    });
    result.evals = static_cast<long>(total);

    std::vector<std::size_t> minima;
    for (std::size_t idx = 0; idx < total; ++idx) {
      const long i = static_cast<long>(idx % g);
      const long j = n == 2 ? static_cast<long>(idx / g) : 0;
      bool is_min = true;
      for (long dj = (n == 2 ? -1 : 0); dj <= (n == 2 ? 1 : 0) && is_min; ++dj) {
        for (long di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const long ii = i + di;
          const long jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<long>(g) || jj >= static_cast<long>(g)) continue;
          if (values[static_cast<std::size_t>(jj) * g + static_cast<std::size_t>(ii)] < values[idx]) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) minima.push_back(idx);
    }
    std::stable_sort(minima.begin(), minima.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    if (minima.size() > static_cast<std::size_t>(std::max(opts.starts, 1))) {
      minima.resize(static_cast<std::size_t>(std::max(opts.starts, 1)));
    }

    const long remaining = std::max<long>(opts.max_evals - result.evals, 0);
    const long per_start = std::max<long>(remaining / static_cast<long>(minima.size()), 4);
    result.finals.resize(minima.size());
    if (n == 1) {
      const auto& ax = axis[0];
      parallel_for(minima.size(), opts.threads, [&](std::size_t s) {
        const std::size_t i = minima[s];
        const std::size_t ia = i == 0 ? 0 : i - 1;
        const std::size_t ib = i + 1 == g ? i : i + 1;
        auto f1 = [&](double z) {
          const double x[1] = {z};
          return f(std::span<const double>(x, 1));
        };
        LocalResult r;
        if (ia == ib) {
          r.x = {ax[i]};
          r.f = values[i];
          r.converged = true;
        } else {
          r = golden_section(f1, ax[ia], ax[ib], values[ia], values[ib], opts.x_tol, opts.f_tol, per_start);
          if (values[i] < r.f) {
            r.x = {ax[i]};
            r.f = values[i];
          }
        }
        result.finals[s] = std::move(r);
      });
    } else {
      parallel_for(minima.size(), opts.threads, [&](std::size_t s) {
        const std::size_t idx = minima[s];
        std::vector<double> x0{axis[0][idx % g], axis[1][idx / g]};
        std::vector<double> step{(box.hi[0] - box.lo[0]) / static_cast<double>(g - 1) / 2.0,
                                 (box.hi[1] - box.lo[1]) / static_cast<double>(g - 1) / 2.0};
        LocalResult r = nelder_mead(f, x0, step, box, opts.x_tol, opts.f_tol, per_start);
        if (values[idx] < r.f) {
          r.x = x0;
          r.f = values[idx];
        }
        result.finals[s] = std::move(r);
      });
    }
  } else {
    const std::size_t count = static_cast<std::size_t>(std::max(opts.starts, 1));
    auto unit = halton_points(count, n, opts.seed);
    const long per_start = std::max<long>(opts.max_evals / static_cast<long>(count), 4 * static_cast<long>(n));
    result.finals.resize(count);
    parallel_for(count, opts.threads, [&](std::size_t s) {
      std::vector<double> x0(n);
      std::vector<double> step(n);
      for (std::size_t k = 0; k < n; ++k) {
        x0[k] = box.lo[k] + unit[s][k] * (box.hi[k] - box.lo[k]);
        step[k] = 0.1 * (box.hi[k] - box.lo[k]);
      }
      result.finals[s] = nelder_mead(f, x0, step, box, opts.x_tol, opts.f_tol, per_start);
    });
  }

  std::size_t best = 0;
  for (std::size_t s = 0; s < result.finals.size(); ++s) {
    result.evals += result.finals[s].evals;
    if (result.finals[s].f < result.finals[best].f) best = s;
  }
  result.x = result.finals[best].x;
  result.f = result.finals[best].f;
  result.converged = result.finals[best].converged;
  return result;
}

}  // namespace rfeas
