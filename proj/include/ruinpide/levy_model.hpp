#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ruinpide/rng.hpp"

namespace ruin {

/// Jump size distribution of a finite-activity jump part.
struct SizeLaw {
    enum class Kind { Point, Exponential, Uniform, Empirical };

    Kind kind = Kind::Point;
    double value = 0.0;     // Point: the atom location
    double rate = 1.0;      // Exponential: rate of |z|
    int sign = 1;           // Exponential: z = sign * Exp(rate), sign in {-1, +1}
    double lo = 0.0;        // Uniform: support [lo, hi]
    double hi = 1.0;
    std::vector<std::pair<double, double>> atoms;  // Empirical: (value, probability)

    static SizeLaw point(double z0);
    static SizeLaw exponential(double rate, int sign);
    static SizeLaw uniform(double lo, double hi);
    static SizeLaw empirical(std::vector<std::pair<double, double>> atoms);

    /// Probability mass on ]-inf, x].
    double mass_at_or_below(double x) const;
    /// E[z 1_{|z| <= 1}], the compensated part of the mean.
    double mean_small() const;
    double mean() const;
    double sample(StreamRng& rng) const;

    void collect_errors(const std::string& where, std::vector<std::string>& out) const;
};

/// Quadrature/atom representation of a Levy measure Pi(dz) = intensity * law(dz):
/// a finite list of (z, weight) with weights summing to the intensity.
struct JumpAtom {
    double z;
    double weight;
};

/// Finite-activity representation of a Levy measure.
struct JumpSpec {
    double intensity = 0.0;  // mean arrivals per unit time
    SizeLaw law;

    bool active() const { return intensity > 0.0; }
    /// intensity * E[z 1_{|z| <= 1}]; the drift absorbed by the (mu - nu) compensation.
    double compensator_rate() const { return active() ? intensity * law.mean_small() : 0.0; }

    /// Discretize Pi into non-negative atoms summing to the intensity (within 1e-12).
    /// Point/empirical laws pass through exactly; continuous laws use
    /// per-cell Gauss-Legendre on equal-probability cells plus a lumped tail.
    std::vector<JumpAtom> quadrature(int n_cells) const;
};

struct LevyTriplet {
    double drift = 0.0;  // the canonical a: jump means for |z| <= 1 are not re-added
    double sigma = 0.0;
    JumpSpec jumps;
    double small_jump_diffusion = 0.0;  // variance-per-unit-time surrogate for truncated small jumps

    /// sigma^2 + small_jump_diffusion, the continuous quadratic variation rate.
    double diffusion_variance_rate() const { return sigma * sigma + small_jump_diffusion; }
    bool is_deterministic() const {
        return sigma == 0.0 && small_jump_diffusion == 0.0 && !jumps.active();
    }
};

struct Validation {
    bool ok = true;
    std::vector<std::string> errors;

    void fail(std::string msg) {
        ok = false;
        errors.push_back(std::move(msg));
    }
};

/// Checks a triplet's internal consistency. When is_price_driver is set, also
/// enforces Pi(]-inf,-1]) = 0 so the Doleans exponential of the driver stays
/// strictly positive; every support region carrying offending mass is reported.
Validation validate_triplet(const LevyTriplet& t, bool is_price_driver);

/// Terminal payoff V evaluated at ruin. ruin_indicator is the reading
/// Psi = P(tau < T); deficit_penalty evaluates a user table w(|X_tau|)
/// (piecewise linear in the overshoot, constant beyond the last knot), which
/// also expresses the literal V = 1_{]0,inf[} reading as the all-zero table.
struct PayoffSpec {
    enum class Kind { RuinIndicator, DeficitPenalty };

    Kind kind = Kind::RuinIndicator;
    std::vector<std::pair<double, double>> penalty;  // (overshoot >= 0, value in [0,1])

    static PayoffSpec ruin_indicator();
    static PayoffSpec deficit_penalty(std::vector<std::pair<double, double>> table);

    /// Value collected when ruin occurs with X_tau = x (x <= 0).
    double value_at_ruin(double x) const;
    void collect_errors(std::vector<std::string>& out) const;
};

struct ModelParams {
    LevyTriplet R;  // investment return driver; dS = S_- dR
    LevyTriplet P;  // insurance business driver
    double horizon = 1.0;
    PayoffSpec payoff;

    Validation validate() const;
};

struct JumpEvent {
    double offset;  // time offset inside the step, in [0, dt]
    double size;
};

struct Increment {
    double continuous = 0.0;
    std::vector<JumpEvent> jumps;  // sorted by offset
};

/// One discretization step of the canonical decomposition: drift plus Gaussian
/// part in `continuous`, compound-Poisson arrivals listed separately. Jumps with
/// |z| <= 1 are compensated by subtracting intensity*dt*E[z 1_{|z|<=1}] from the
/// continuous part; jumps with |z| > 1 enter uncompensated.
Increment sample_increment(const LevyTriplet& t, double dt, StreamRng& rng);

}  // namespace ruin
