#include "ruinpide/reserve_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ruin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-e) below this exponent cannot win against a uniform draw.
constexpr double kBridgeExpCutoff = 745.0;

void check_jump_factor(double z) {
    if (1.0 + z <= 0.0)
        throw std::runtime_error(
            "Doleans factor (1+z) <= 0: an invalid R-triplet slipped through validation");
}

struct PathState {
    double x;
    double s = 1.0;
    double acc;  // variation-of-constants accumulator; x = s * acc between updates
};

/// Per-driver bookkeeping. Continuous increments are drawn on the driver's own
/// application grid (regular nodes + own jumps + horizon), so the draw sequence
/// of one driver never depends on the other driver's jump times.
struct DriverState {
    const LevyTriplet* triplet;
    const JumpList* jumps;
    StreamRng* rng;
    double drift_eff;
    double var_rate;
    std::size_t next_jump = 0;
    double prev_node;  // end of the last applied continuous increment

    double next_jump_time() const {
        return next_jump < jumps->times.size() ? (*jumps->times.data() == 0, jumps->times[next_jump]) : kInf;
    }
};

}  // namespace

JumpList sample_jumps(const JumpSpec& spec, double t0, double t1, StreamRng& rng) {
    JumpList list;
    if (!spec.active() || t1 <= t0) return list;
    const std::uint64_t n = rng.poisson(spec.intensity * (t1 - t0));
    list.times.resize(n);
    list.sizes.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) list.times[i] = t0 + rng.uniform() * (t1 - t0);
    for (std::uint64_t i = 0; i < n; ++i) list.sizes[i] = spec.law.sample(rng);
    // Sort by time, keeping (time, size) pairs together.
    std::vector<std::size_t> order(n);
    for (std::uint64_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return list.times[a] < list.times[b]; });
    JumpList sorted;
    sorted.times.reserve(n);
    sorted.sizes.reserve(n);
    for (std::size_t i : order) {
        sorted.times.push_back(list.times[i]);
        sorted.sizes.push_back(list.sizes[i]);
    }
    return sorted;
}

DriverPath sample_driver(const LevyTriplet& t, double t0, double t1, double dt_max,
                         StreamRng& rng) {
    if (!(dt_max > 0.0)) throw std::invalid_argument("sample_driver: dt_max must be > 0");
    if (!(t1 > t0)) throw std::invalid_argument("sample_driver: need t1 > t0");

    const JumpList jumps = sample_jumps(t.jumps, t0, t1, rng);
    DriverPath path;
    path.var_rate = t.diffusion_variance_rate();
    path.times.push_back(t0);
    path.jump_at.push_back(0.0);

    std::size_t ij = 0;
    std::uint64_t k = 1;
    double now = t0;
    while (now < t1) {
        double next = std::min(t1, t0 + static_cast<double>(k) * dt_max);
        double jump = 0.0;
        if (ij < jumps.times.size() && jumps.times[ij] <= next) {
            next = jumps.times[ij];
            jump = jumps.sizes[ij];
            ++ij;
        } else if (next < t1) {
            ++k;
        }
        path.times.push_back(next);
        path.jump_at.push_back(jump);
        now = next;
    }

    const double drift_eff = t.drift - t.jumps.compensator_rate();
    path.cont.resize(path.times.size() - 1);
    for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
        const double dt = path.times[i + 1] - path.times[i];
        double inc = drift_eff * dt;
        if (path.var_rate > 0.0 && dt > 0.0) inc += std::sqrt(path.var_rate * dt) * rng.normal();
        path.cont[i] = inc;
    }
    return path;
}

std::vector<double> doleans_path(const DriverPath& r) {
    std::vector<double> s(r.times.size());
    s[0] = 1.0;
    double cur = 1.0;
    for (std::size_t i = 1; i < r.times.size(); ++i) {
        const double dt = r.times[i] - r.times[i - 1];
        cur *= std::exp(r.cont[i - 1] - 0.5 * r.var_rate * dt);
        const double z = r.jump_at[i];
        if (z != 0.0) {
            check_jump_factor(z);
            cur *= 1.0 + z;
        }
        s[i] = cur;
    }
    return s;
}

namespace {

/// Core event loop shared by every simulation entry point. The visitor is
/// called once per recorded event with (t, x, s, type) and may stop the run
/// by returning false.
template <typename Visitor>
PathOutcome run_path(double t0, double u0, const ModelParams& params, const SimScheme& scheme,
                     StreamRng& rng_r, StreamRng& rng_p, StreamRng& rng_bridge,
                     Visitor&& visit) {
    if (!(u0 > 0.0)) throw std::invalid_argument("simulate: initial capital must be > 0");
    const double horizon = params.horizon;
    if (!(t0 < horizon)) throw std::invalid_argument("simulate: need start time < horizon");
    if (!(scheme.dt_max > 0.0)) throw std::invalid_argument("simulate: dt_max must be > 0");

    const bool euler = scheme.kind == SimScheme::Kind::Euler;
    const JumpList jumps_r = sample_jumps(params.R.jumps, t0, horizon, rng_r);
    const JumpList jumps_p = sample_jumps(params.P.jumps, t0, horizon, rng_p);

    const double drift_r = params.R.drift - params.R.jumps.compensator_rate();
    const double drift_p = params.P.drift - params.P.jumps.compensator_rate();
    const double var_r = params.R.diffusion_variance_rate();
    const double var_p = params.P.diffusion_variance_rate();

    PathState st{u0, 1.0, u0};
    PathOutcome out;
    out.t_last = t0;
    out.x_last = u0;

    if (!visit(t0, u0, 1.0, EventType::Grid)) {
        out.stopped_early = true;
        return out;
    }

    auto ruin_at = [&](double when, double x_ruin) {
        out.ruined = true;
        out.tau = when;
        out.x_at_tau = x_ruin;
        out.t_last = when;
        out.x_last = x_ruin;
        visit(when, x_ruin, st.s, EventType::Ruin);
    };

    // Applies one continuous increment of either driver over (from, to].
    // Returns false when the path ruined inside or at the end of the span.
    auto apply_continuous = [&](double from, double to, double drift_eff, double var_rate,
                                StreamRng& rng, bool is_r) -> bool {
        const double dt = to - from;
        if (dt <= 0.0) return true;
        double inc = drift_eff * dt;
        if (var_rate > 0.0) inc += std::sqrt(var_rate * dt) * rng.normal();

        const double x_prev = st.x;
        if (is_r) {
            st.s *= std::exp(inc - 0.5 * var_rate * dt);
            if (euler)
                st.x = x_prev + x_prev * inc;
            else
                st.x = st.s * st.acc;
        } else {
            if (euler) {
                st.x = x_prev + inc;
            } else {
                st.acc += inc / st.s;
                st.x = st.s * st.acc;
            }
        }

        const double var_x = is_r ? var_rate * x_prev * x_prev : var_rate;
        if (st.x <= 0.0) {
            if (var_x == 0.0) {
                // Deterministic move: report the in-step crossing time exactly.
                const double frac = x_prev / (x_prev - st.x);
                ruin_at(from + frac * dt, 0.0);
            } else {
                ruin_at(to, st.x);
            }
            return false;
        }
        if (scheme.bridge_correction && var_x > 0.0) {
            // Brownian-bridge minimum law for the within-step crossing of 0.
            const double e = 2.0 * x_prev * st.x / (var_x * dt);
            if (e < kBridgeExpCutoff && rng_bridge.uniform() <= std::exp(-e)) {
                ruin_at(to, 0.0);
                return false;
            }
        }
        return true;
    };

    std::size_t ir = 0, ip = 0;
    std::uint64_t k = 1;
    double now = t0;
    double prev_r = t0, prev_p = t0;

    while (now < horizon) {
        const double next_jr = ir < jumps_r.times.size() ? jumps_r.times[ir] : kInf;
        const double next_jp = ip < jumps_p.times.size() ? jumps_p.times[ip] : kInf;
        const double next_reg = std::min(horizon, t0 + static_cast<double>(k) * scheme.dt_max);
        const double next = std::min({next_reg, next_jr, next_jp});
        if (next == next_reg && next < horizon) ++k;

        const bool r_node = next == next_reg || next == next_jr;
        const bool p_node = next == next_reg || next == next_jp;
        EventType ev = EventType::Grid;

        if (r_node) {
            if (!apply_continuous(prev_r, next, drift_r, var_r, rng_r, /*is_r=*/true)) return out;
            prev_r = next;
            while (ir < jumps_r.times.size() && jumps_r.times[ir] == next) {
                const double z = jumps_r.sizes[ir++];
                check_jump_factor(z);
                st.s *= 1.0 + z;
                st.x = euler ? st.x + st.x * z : st.s * st.acc;
                ev = EventType::JumpR;
                if (st.x <= 0.0) {
                    ruin_at(next, st.x);
                    return out;
                }
            }
        }
        if (p_node) {
            if (!apply_continuous(prev_p, next, drift_p, var_p, rng_p, /*is_r=*/false)) return out;
            prev_p = next;
            while (ip < jumps_p.times.size() && jumps_p.times[ip] == next) {
                const double z = jumps_p.sizes[ip++];
                st.x += z;
                if (!euler) st.acc += z / st.s;
                ev = EventType::JumpP;
                if (st.x <= 0.0) {
                    ruin_at(next, st.x);
                    return out;
                }
            }
        }

        now = next;
        out.t_last = now;
        out.x_last = st.x;
        if (!visit(now, st.x, st.s, ev)) {
            out.stopped_early = true;
            return out;
        }
    }
    return out;
}

struct NullVisitor {
    bool operator()(double, double, double, EventType) const { return true; }
};

}  // namespace

SamplePath simulate_path_streams(double t0, double u0, const ModelParams& params,
                                 const SimScheme& scheme, StreamRng& rng_r, StreamRng& rng_p,
                                 StreamRng& rng_bridge) {
    SamplePath path;
    auto record = [&path](double t, double x, double s, EventType ev) {
        path.times.push_back(t);
        path.values.push_back(x);
        path.s_values.push_back(s);
        path.events.push_back(ev);
        return true;
    };
    const PathOutcome out =
        run_path(t0, u0, params, scheme, rng_r, rng_p, rng_bridge, record);
    if (out.ruined) {
        path.tau = out.tau;
        path.overshoot = -out.x_at_tau;
    }
    return path;
}

SamplePath simulate_path(double t0, double u0, const ModelParams& params,
                         const SimScheme& scheme, std::uint64_t seed,
                         std::uint64_t path_index) {
    StreamRng rng_r(seed, path_index, kSubstreamR);
    StreamRng rng_p(seed, path_index, kSubstreamP);
    StreamRng rng_b(seed, path_index, kSubstreamBridge);
    return simulate_path_streams(t0, u0, params, scheme, rng_r, rng_p, rng_b);
}

PathOutcome simulate_outcome(double t0, double u0, const ModelParams& params,
                             const SimScheme& scheme, std::uint64_t seed,
                             std::uint64_t path_index) {
    StreamRng rng_r(seed, path_index, kSubstreamR);
    StreamRng rng_p(seed, path_index, kSubstreamP);
    StreamRng rng_b(seed, path_index, kSubstreamBridge);
    return run_path(t0, u0, params, scheme, rng_r, rng_p, rng_b, NullVisitor{});
}

PathOutcome simulate_until_exit(double t0, double u0, double band_lo, double band_hi,
                                double t_end, const ModelParams& params,
                                const SimScheme& scheme, std::uint64_t seed,
                                std::uint64_t path_index) {
    if (!(t_end <= params.horizon))
        throw std::invalid_argument("simulate_until_exit: t_end beyond the model horizon");
    ModelParams clipped = params;
    clipped.horizon = t_end;

    StreamRng rng_r(seed, path_index, kSubstreamR);
    StreamRng rng_p(seed, path_index, kSubstreamP);
    StreamRng rng_b(seed, path_index, kSubstreamBridge);
    auto stop_outside = [&](double t, double x, double, EventType) {
        return t == t0 || (x >= band_lo && x <= band_hi);
    };
    return run_path(t0, u0, clipped, scheme, rng_r, rng_p, rng_b, stop_outside);
}

}  // namespace ruin
