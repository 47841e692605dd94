#pragma once

// Residual checks on a metric pair and geodesic-flow verification.

#include <optional>
#include <string>
#include <vector>

#include "geodeq/fields.hpp"

namespace geodeq {

// Rank-3 array indexed (a, b, c), each < dim.
struct Tensor3 {
  std::size_t dim = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> v{};

  explicit Tensor3(std::size_t n = 0) : dim(n) {}
  double& operator()(std::size_t a, std::size_t b, std::size_t c) { return v[(a * kMaxDim + b) * kMaxDim + c]; }
  double operator()(std::size_t a, std::size_t b, std::size_t c) const {
    return v[(a * kMaxDim + b) * kMaxDim + c];
  }
  double max_abs() const;
};

// Gamma(k, i, j) = Gamma^k_{ij}.
Tensor3 christoffel(const JetMatrix& g);
Tensor3 christoffel(const MetricField& g, std::span<const double> p);

// Max |L_{ij,k} - lambda_{,i} g_{jk} - lambda_{,j} g_{ik}| / (1 + |g| |L|),
// lambda = tr L / 2, norms entrywise max-abs.
double compatibility_residual(const JetMatrix& g, const JetMatrix& L);
double compatibility_residual(const MetricField& g, const EndoField& L, std::span<const double> p);

// |gL - (gL)^T| / (|gL| + 1).
double selfadjoint_residual(const RMatrix& g, const RMatrix& L);
double selfadjoint_residual(const MetricField& g, const EndoField& L, std::span<const double> p);

// nabla(k, i, j) = nabla_k L^i_j.
Tensor3 nabla_L(const JetMatrix& g, const JetMatrix& L);
Tensor3 nabla_L(const MetricField& g, const EndoField& L, std::span<const double> p);

// N(k, i, j) = N^k_{ij}.
Tensor3 nijenhuis(const JetMatrix& L);
Tensor3 nijenhuis(const EndoField& L, std::span<const double> p);

// Pointwise canonical complex structure of L, differentiable through jets.
EndoField complex_structure_field(const EndoField& L, double tol = 1e-6);

struct TrajectorySample {
  double t = 0;
  Point point;
  Point velocity;
  Point acceleration;  // second derivative from the geodesic equation
};

enum class TrajectoryStatus { complete, boundary_exit, excluded, step_underflow, singular };
std::string to_string(TrajectoryStatus s);

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::complete;
  std::string message;

  bool complete() const { return status == TrajectoryStatus::complete; }
};

struct GeodesicOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  // Report at accepted steps when 0, otherwise at this many uniform times
  // (plus t = 0) using the integrator's dense output.
  std::size_t uniform_samples = 0;
};

// Acceleration -Gamma^k_{ij} v^i v^j.
Point geodesic_acceleration(const MetricField& g, std::span<const double> p, std::span<const double> v);

// Dormand-Prince 5(4) with dense output. Negative T integrates the reversed
// initial velocity and maps the result back. Leaving the chart (box or an
// exclusion) halts integration and flags the partial result.
Trajectory integrate_geodesic(const MetricField& g, const Chart& chart, std::span<const double> p0,
                              std::span<const double> v0, double T, const GeodesicOptions& opt = {});

// I_t(xi) = g(adj(L - t) xi, xi).
double integral_It(const MetricField& g, const EndoField& L, double t, const TrajectorySample& s);
double integral_It(const RMatrix& g, const RMatrix& L, double t, std::span<const double> xi);
// Sum of |xi_i g_ij (adj xi)_j|: the magnitude the integral is computed from.
double integral_It_scale(const RMatrix& g, const RMatrix& L, double t, std::span<const double> xi);

// Euclidean rejection of the gbar-covariant acceleration from the velocity,
// normalized by |A| + |v|^2; maximum over samples.
double unparam_geodesic_residual(const MetricField& gbar, const std::vector<TrajectorySample>& samples);

struct VerificationReport {
  std::string check;
  std::size_t attempted = 0;
  std::size_t accepted = 0;
  double max_residual = 0;
  double mean_residual = 0;
  double tolerance = 0;
  bool pass = false;
  Point worst_point;
};

struct Tolerances {
  double selfadjoint = 1e-12;
  double compatibility = 1e-9;
  double nijenhuis = 1e-9;
  double integral = 1e-6;
  double geodesic = 1e-6;
  double integrator = 1e-10;
};

struct GeodesicTrial {
  Point p0;
  Point v0;
  double T = 1.0;
};

struct VerifyOptions {
  std::size_t n_points = 100;
  std::uint64_t seed = 1;
  Tolerances tol;
  std::vector<GeodesicTrial> trials;  // generated from the seed when empty
  std::size_t default_trials = 3;
};

// Values of t at which the integrals are monitored: n points below the
// spectrum bound of L at the chart center.
std::vector<double> integral_nodes(const MetricPair& pair);

std::vector<GeodesicTrial> default_trials(const MetricPair& pair, std::size_t count, std::uint64_t seed);

std::vector<VerificationReport> verify_pair(const MetricPair& pair, const VerifyOptions& opt = {});

// Worker count for point checks: GEODEQ_THREADS if set, else hardware.
std::size_t worker_count();

}  // namespace geodeq
