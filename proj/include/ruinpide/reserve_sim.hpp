#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ruinpide/levy_model.hpp"
#include "ruinpide/rng.hpp"

namespace ruin {

struct SimScheme {
    enum class Kind { Euler, ExactBetweenJumps };

    Kind kind = Kind::ExactBetweenJumps;
    double dt_max = 1e-3;
    bool bridge_correction = false;
};

enum class EventType { Grid, JumpR, JumpP, Ruin };

struct SamplePath {
    std::vector<double> times;      // times[0] = t0, strictly increasing, last = min(tau, T)
    std::vector<double> values;     // X at those times; values[0] = u0
    std::vector<double> s_values;   // Doleans exponential of R along the path, S(t0) = 1
    std::vector<EventType> events;
    std::optional<double> tau;      // first time X <= 0, if any
    double overshoot = 0.0;         // -X_tau >= 0 when ruined
};

/// Pre-sampled compound-Poisson arrivals on an interval, sorted by time.
struct JumpList {
    std::vector<double> times;
    std::vector<double> sizes;
};

JumpList sample_jumps(const JumpSpec& spec, double t0, double t1, StreamRng& rng);

/// Increments of one driver laid out on a merged grid: jumps sit exactly on
/// grid nodes, never smeared across a step.
struct DriverPath {
    std::vector<double> times;    // n nodes
    std::vector<double> cont;     // n-1 continuous increments over (t_i, t_{i+1}]
    std::vector<double> jump_at;  // n; jump size arriving at t_i (0 if none)
    double var_rate = 0.0;        // continuous quadratic variation per unit time
};

DriverPath sample_driver(const LevyTriplet& t, double t0, double t1, double dt_max,
                         StreamRng& rng);

/// Doleans exponential along a driver path: S_0 = 1, S *= exp(dR_cont - var*dt/2)
/// across continuous steps and S *= (1+z) at jumps. Throws if any factor
/// (1+z) <= 0 — an invalid triplet slipped through validation.
std::vector<double> doleans_path(const DriverPath& r);

struct PathOutcome {
    bool ruined = false;
    double tau = 0.0;        // meaningful when ruined
    double x_at_tau = 0.0;   // <= 0 when ruined
    double t_last = 0.0;     // time at which the run stopped
    double x_last = 0.0;     // X at t_last
    bool stopped_early = false;  // a visitor stop, not ruin/horizon
};

/// Simulate X^{t0,u0} with full path recording. Draws come from three
/// substreams derived from (seed, path_index): R, P, and bridge draws never
/// share a stream, so reseeding one driver leaves the others bitwise intact.
SamplePath simulate_path(double t0, double u0, const ModelParams& params,
                         const SimScheme& scheme, std::uint64_t seed,
                         std::uint64_t path_index);

SamplePath simulate_path_streams(double t0, double u0, const ModelParams& params,
                                 const SimScheme& scheme, StreamRng& rng_r, StreamRng& rng_p,
                                 StreamRng& rng_bridge);

/// Lean variant without recording; what the Monte Carlo estimator runs.
PathOutcome simulate_outcome(double t0, double u0, const ModelParams& params,
                             const SimScheme& scheme, std::uint64_t seed,
                             std::uint64_t path_index);

/// Run until X leaves [band_lo, band_hi], ruins, or reaches t_end.
/// Used for the stopped strong-Markov (Dynkin) consistency check.
PathOutcome simulate_until_exit(double t0, double u0, double band_lo, double band_hi,
                                double t_end, const ModelParams& params,
                                const SimScheme& scheme, std::uint64_t seed,
                                std::uint64_t path_index);

}  // namespace ruin
