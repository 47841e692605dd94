#include "geodeq/verify.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "geodeq/errors.hpp"

namespace geodeq {

double Tensor3::max_abs() const {
  double r = 0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      for (std::size_t c = 0; c < dim; ++c) r = std::max(r, std::abs((*this)(a, b, c)));
  return r;
}

Tensor3 christoffel(const JetMatrix& g) {
  const std::size_t n = g.dim();
  const RMatrix ginv = inverse(values(g));
  Tensor3 gamma(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0;
        for (std::size_t m = 0; m < n; ++m)
          s += ginv(k, m) * (g(m, j).grad(i) + g(m, i).grad(j) - g(i, j).grad(m));
        gamma(k, i, j) = gamma(k, j, i) = 0.5 * s;
      }
  return gamma;
}

Tensor3 christoffel(const MetricField& g, std::span<const double> p) { return christoffel(g.at(p)); }

double compatibility_residual(const JetMatrix& g, const JetMatrix& L) {
  const std::size_t n = g.dim();
  if (L.dim() != n) throw std::invalid_argument("compatibility_residual: dimension mismatch");
  const Tensor3 gamma = christoffel(g);
  const JetMatrix low = g * L;
  const RMatrix lowv = values(low), gv = values(g);
  const RJet lambda = L.trace() * RJet(0.5);
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        double cov = low(i, j).grad(k);
        for (std::size_t m = 0; m < n; ++m) cov -= gamma(m, k, i) * lowv(m, j) + gamma(m, k, j) * lowv(i, m);
        const double rhs = lambda.grad(i) * gv(j, k) + lambda.grad(j) * gv(i, k);
        worst = std::max(worst, std::abs(cov - rhs));
      }
  return worst / (1.0 + max_abs(g) * max_abs(L));
}

double compatibility_residual(const MetricField& g, const EndoField& L, std::span<const double> p) {
  return compatibility_residual(g.at(p), L.at(p));
}

double selfadjoint_residual(const RMatrix& g, const RMatrix& L) {
  const RMatrix gl = g * L;
  return max_abs(gl - gl.transpose()) / (max_abs(gl) + 1.0);
}

double selfadjoint_residual(const MetricField& g, const EndoField& L, std::span<const double> p) {
  return selfadjoint_residual(g.value_at(p), L.value_at(p));
}

Tensor3 nabla_L(const JetMatrix& g, const JetMatrix& L) {
  const std::size_t n = g.dim();
  const Tensor3 gamma = christoffel(g);
  const RMatrix Lv = values(L);
  Tensor3 r(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = L(i, j).grad(k);
        for (std::size_t m = 0; m < n; ++m) s += gamma(i, k, m) * Lv(m, j) - gamma(m, k, j) * Lv(i, m);
        r(k, i, j) = s;
      }
  return r;
}

Tensor3 nabla_L(const MetricField& g, const EndoField& L, std::span<const double> p) {
  return nabla_L(g.at(p), L.at(p));
}

Tensor3 nijenhuis(const JetMatrix& L) {
  const std::size_t n = L.dim();
  const RMatrix Lv = values(L);
  Tensor3 r(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t m = 0; m < n; ++m) {
          s += Lv(m, i) * L(k, j).grad(m) - Lv(m, j) * L(k, i).grad(m);
          s -= Lv(k, m) * (L(m, j).grad(i) - L(m, i).grad(j));
        }
        r(k, i, j) = s;
      }
  return r;
}

Tensor3 nijenhuis(const EndoField& L, std::span<const double> p) { return nijenhuis(L.at(p)); }

EndoField complex_structure_field(const EndoField& L, double tol) {
  return EndoField(L.dim(), [L, tol](JetCoords x) { return complex_structure_J(L(x), tol); });
}

std::string to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::complete: return "complete";
    case TrajectoryStatus::boundary_exit: return "boundary_exit";
    case TrajectoryStatus::excluded: return "excluded";
    case TrajectoryStatus::step_underflow: return "step_underflow";
    case TrajectoryStatus::singular: return "singular";
  }
  return "unknown";
}

namespace {

Point geodesic_acceleration(const Tensor3& gamma, std::span<const double> v) {
  const std::size_t n = gamma.dim;
  Point a(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += gamma(k, i, j) * v[i] * v[j];
    a[k] = -s;
  }
  return a;
}

using State = std::vector<double>;

}  // namespace

Point geodesic_acceleration(const MetricField& g, std::span<const double> p, std::span<const double> v) {
  return geodesic_acceleration(christoffel(g, p), v);
}

Trajectory integrate_geodesic(const MetricField& g, const Chart& chart, std::span<const double> p0,
                              std::span<const double> v0, double T, const GeodesicOptions& opt) {
  namespace ode = boost::numeric::odeint;
  const std::size_t n = g.dim();
  if (p0.size() != n || v0.size() != n) throw SpecError("integrate_geodesic: p0 and v0 must match the dimension");
  if (!std::isfinite(T)) throw SpecError("integrate_geodesic: T must be finite");
  if (!chart.in_box(p0)) throw DomainError("integrate_geodesic: initial point lies outside the chart box");
  if (auto e = chart.excluded_by(p0))
    throw DomainError("integrate_geodesic: initial point lies in exclusion zone '" + *e + "'");

  const double dir = T < 0 ? -1.0 : 1.0;
  const double span = std::abs(T);
  auto system = [&g, n](const State& x, State& dx, double) {
    const std::span<const double> p(x.data(), n), v(x.data() + n, n);
    const auto a = geodesic_acceleration(g, p, v);
    for (std::size_t k = 0; k < n; ++k) {
      dx[k] = x[n + k];
      dx[n + k] = a[k];
    }
  };
  auto make_sample = [&](double t, const State& x) {
    TrajectorySample s;
    s.t = dir * t;
    s.point.assign(x.begin(), x.begin() + n);
    s.velocity.assign(x.begin() + n, x.end());
    s.acceleration = geodesic_acceleration(g, s.point, s.velocity);
    for (auto& v : s.velocity) v *= dir;
    return s;
  };

  Trajectory traj;
  State x0(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    x0[k] = p0[k];
    x0[n + k] = dir * v0[k];
  }
  traj.samples.push_back(make_sample(0.0, x0));
  if (span == 0.0) return traj;

  auto stepper = ode::make_dense_output(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(x0, 0.0, std::min(1e-2, span * 1e-3));
  std::size_t next_report = 1;
  const std::size_t n_uniform = opt.uniform_samples;
  State xi(2 * n);
  try {
    while (true) {
      const auto [t0, t1] = stepper.do_step(system);
      const State& x1 = stepper.current_state();
      // The last step may overshoot T; only the part up to T must stay in the chart.
      if (t1 > span) stepper.calc_state(span, xi);
      const std::span<const double> p1(t1 > span ? xi.data() : x1.data(), n);
      if (!chart.in_box(p1)) {
        traj.status = TrajectoryStatus::boundary_exit;
        traj.message = "trajectory left the chart box";
        break;
      }
      if (auto e = chart.excluded_by(p1)) {
        traj.status = TrajectoryStatus::excluded;
        traj.message = "trajectory entered exclusion zone '" + *e + "'";
        break;
      }
      if (n_uniform > 0) {
        while (next_report <= n_uniform) {
          const double tr = span * double(next_report) / double(n_uniform);
          if (tr > t1) break;
          stepper.calc_state(tr, xi);
          traj.samples.push_back(make_sample(tr, xi));
          ++next_report;
        }
      } else if (t1 < span) {
        traj.samples.push_back(make_sample(t1, x1));
      }
      if (t1 >= span) {
        if (n_uniform == 0) {
          stepper.calc_state(span, xi);
          traj.samples.push_back(make_sample(span, xi));
        }
        break;
      }
      if (stepper.current_time_step() < 1e-14 * std::max(1.0, std::abs(t1))) {
        traj.status = TrajectoryStatus::step_underflow;
        traj.message = "step size underflow";
        break;
      }
      (void)t0;
    }
  } catch (const ode::step_adjustment_error& e) {
    traj.status = TrajectoryStatus::step_underflow;
    traj.message = e.what();
  } catch (const Error& e) {
    traj.status = TrajectoryStatus::singular;
    traj.message = e.what();
  } catch (const std::domain_error& e) {
    traj.status = TrajectoryStatus::singular;
    traj.message = e.what();
  }
  return traj;
}

namespace {

Point adj_shift_apply(const RMatrix& L, double t, std::span<const double> xi) {
  const RMatrix A = adjugate(L.shifted(-t));
  const std::size_t n = L.dim();
  Point w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i] += A(i, j) * xi[j];
  return w;
}

}  // namespace

double integral_It(const RMatrix& g, const RMatrix& L, double t, std::span<const double> xi) {
  const auto w = adj_shift_apply(L, t, xi);
  double s = 0;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j) s += w[i] * g(i, j) * xi[j];
  return s;
}

double integral_It_scale(const RMatrix& g, const RMatrix& L, double t, std::span<const double> xi) {
  const auto w = adj_shift_apply(L, t, xi);
  double s = 0;
  for (std::size_t i = 0; i < g.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j) s += std::abs(w[i] * g(i, j) * xi[j]);
  return s;
}

double integral_It(const MetricField& g, const EndoField& L, double t, const TrajectorySample& s) {
  return integral_It(g.value_at(s.point), L.value_at(s.point), t, s.velocity);
}

double unparam_geodesic_residual(const MetricField& gbar, const std::vector<TrajectorySample>& samples) {
  double worst = 0;
  for (const auto& s : samples) {
    const std::size_t n = s.point.size();
    const Tensor3 gamma = christoffel(gbar, s.point);
    const auto& v = s.velocity;
    Point A(n);
    for (std::size_t k = 0; k < n; ++k) {
      double q = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q += gamma(k, i, j) * v[i] * v[j];
      A[k] = s.acceleration[k] + q;
    }
    double vv = 0, av = 0, aa = 0;
    for (std::size_t k = 0; k < n; ++k) {
      vv += v[k] * v[k];
      av += A[k] * v[k];
      aa += A[k] * A[k];
    }
    if (vv == 0.0) throw DomainError("unparam_geodesic_residual: zero velocity sample");
    double rr = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = A[k] - av / vv * v[k];
      rr += r * r;
    }
    worst = std::max(worst, std::sqrt(rr) / (std::sqrt(aa) + vv));
  }
  return worst;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("GEODEQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return std::size_t(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs f(i) for i < count over the worker pool; results land by index so
// any reduction over them is independent of scheduling.
template <class F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

VerificationReport summarize(const std::string& name, std::size_t attempted, const std::vector<double>& residuals,
                             const std::vector<Point>& where, double tol) {
  VerificationReport r;
  r.check = name;
  r.attempted = attempted;
  r.accepted = residuals.size();
  r.tolerance = tol;
  double sum = 0;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    sum += residuals[i];
    if (std::isnan(residuals[i]) || residuals[i] > residuals[worst]) worst = i;
  }
  if (!residuals.empty()) {
    r.max_residual = residuals[worst];
    r.mean_residual = sum / double(residuals.size());
    r.worst_point = where[worst];
  }
  r.pass = !residuals.empty() && r.max_residual <= tol;
  return r;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> integral_nodes(const MetricPair& pair) {
  const auto c = pair.chart.center();
  const double bound = 1.0 + double(pair.dim()) * max_abs(pair.L.value_at(c));
  std::vector<double> t;
  for (std::size_t k = 0; k < pair.dim(); ++k) t.push_back(-bound * double(k + 1));
  return t;
}

std::vector<GeodesicTrial> default_trials(const MetricPair& pair, std::size_t count, std::uint64_t seed) {
  const auto starts = pair.chart.sample(count, seed ^ 0x9e3779b97f4a7c15ULL);
  UniformStream rng(seed + 0x632be59bd9b4e019ULL);
  const double speed = 0.1 * pair.chart.box_scale();
  std::vector<GeodesicTrial> out;
  for (const auto& p : starts.points) {
    Point v(p.size());
    double norm = 0;
    while (norm < 1e-3) {
      norm = 0;
      for (auto& c : v) {
        c = rng.next(-1.0, 1.0);
        norm += c * c;
      }
      norm = std::sqrt(norm);
    }
    for (auto& c : v) c *= speed / norm;
    out.push_back({p, v, 1.0});
  }
  return out;
}

std::vector<VerificationReport> verify_pair(const MetricPair& pair, const VerifyOptions& opt) {
  const std::size_t n = pair.dim();
  if (pair.L.dim() != n || pair.chart.dim() != n) throw SpecError("verify_pair: inconsistent dimensions");
  const SampleSet samples = pair.chart.sample(opt.n_points, opt.seed);
  const std::size_t m = samples.points.size();
  std::vector<double> sa(m), compat(m), nij(m);
  parallel_for(m, [&](std::size_t i) {
    const auto& p = samples.points[i];
    try {
      const JetMatrix g = pair.g.at(p), L = pair.L.at(p);
      sa[i] = selfadjoint_residual(values(g), values(L));
      compat[i] = compatibility_residual(g, L);
      nij[i] = nijenhuis(L).max_abs();
    } catch (const Error&) {
      sa[i] = compat[i] = nij[i] = kInf;
    } catch (const std::domain_error&) {
      sa[i] = compat[i] = nij[i] = kInf;
    }
  });
  std::vector<VerificationReport> reports;
  reports.push_back(summarize("selfadjoint", samples.attempted, sa, samples.points, opt.tol.selfadjoint));
  reports.push_back(summarize("compatibility", samples.attempted, compat, samples.points, opt.tol.compatibility));
  reports.push_back(summarize("nijenhuis", samples.attempted, nij, samples.points, opt.tol.nijenhuis));

  const auto trials = opt.trials.empty() ? default_trials(pair, opt.default_trials, opt.seed) : opt.trials;
  const auto nodes = integral_nodes(pair);
  const MetricField gbar = pair.second_metric();
  GeodesicOptions gopt;
  gopt.abs_tol = gopt.rel_tol = opt.tol.integrator;
  std::vector<double> drift, unparam;
  std::vector<Point> starts;
  for (const auto& trial : trials) {
    double d = kInf, u = kInf;
    try {
      const auto traj = integrate_geodesic(pair.g, pair.chart, trial.p0, trial.v0, trial.T, gopt);
      if (traj.samples.size() >= 2) {
        d = 0;
        const auto& s0 = traj.samples.front();
        const RMatrix g0 = pair.g.value_at(s0.point), L0 = pair.L.value_at(s0.point);
        for (double t : nodes) {
          const double i0 = integral_It(g0, L0, t, s0.velocity);
          const double scale = integral_It_scale(g0, L0, t, s0.velocity);
          for (const auto& s : traj.samples) d = std::max(d, std::abs(integral_It(pair.g, pair.L, t, s) - i0) / scale);
        }
        u = unparam_geodesic_residual(gbar, traj.samples);
      }
    } catch (const Error&) {
    } catch (const std::domain_error&) {
    }
    drift.push_back(d);
    unparam.push_back(u);
    starts.push_back(trial.p0);
  }
  reports.push_back(summarize("integrals", trials.size(), drift, starts, opt.tol.integral));
  reports.push_back(summarize("unparam_geodesic", trials.size(), unparam, starts, opt.tol.geodesic));
  return reports;
}

}  // namespace geodeq
