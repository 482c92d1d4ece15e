#include "ruinpide/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ruin {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[8] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

}  // namespace

SizeLaw SizeLaw::point(double z0) {
    SizeLaw law;
    law.kind = Kind::Point;
    law.value = z0;
    return law;
}

SizeLaw SizeLaw::exponential(double rate, int sign) {
    SizeLaw law;
    law.kind = Kind::Exponential;
    law.rate = rate;
    law.sign = sign;
    return law;
}

SizeLaw SizeLaw::uniform(double lo, double hi) {
    SizeLaw law;
    law.kind = Kind::Uniform;
    law.lo = lo;
    law.hi = hi;
    return law;
}

SizeLaw SizeLaw::empirical(std::vector<std::pair<double, double>> atoms) {
    SizeLaw law;
    law.kind = Kind::Empirical;
    law.atoms = std::move(atoms);
    return law;
}

double SizeLaw::mass_at_or_below(double x) const {
    switch (kind) {
        case Kind::Point:
            return value <= x ? 1.0 : 0.0;
        case Kind::Exponential:
            // z = sign * Y, Y ~ Exp(rate)
            if (sign > 0) return x >= 0.0 ? 1.0 - std::exp(-rate * x) : 0.0;
            return x >= 0.0 ? 1.0 : std::exp(-rate * (-x));
        case Kind::Uniform: {
            if (x <= lo) return 0.0;
            if (x >= hi) return 1.0;
            return (x - lo) / (hi - lo);
        }
        case Kind::Empirical: {
            double m = 0.0;
            for (const auto& [z, p] : atoms)
                if (z <= x) m += p;
            return m;
        }
    }
    return 0.0;
}

double SizeLaw::mean_small() const {
    switch (kind) {
        case Kind::Point:
            return std::abs(value) <= 1.0 ? value : 0.0;
        case Kind::Exponential: {
            // E[Y 1_{Y <= 1}] for Y ~ Exp(rate), then apply sign.
            const double m = (1.0 - std::exp(-rate)) / rate - std::exp(-rate);
            return sign > 0 ? m : -m;
        }
        case Kind::Uniform: {
            const double a = std::max(lo, -1.0);
            const double b = std::min(hi, 1.0);
            if (a >= b) return 0.0;
            return 0.5 * (b * b - a * a) / (hi - lo);
        }
        case Kind::Empirical: {
            double m = 0.0;
            for (const auto& [z, p] : atoms)
                if (std::abs(z) <= 1.0) m += z * p;
            return m;
        }
    }
    return 0.0;
}

double SizeLaw::mean() const {
    switch (kind) {
        case Kind::Point:
            return value;
        case Kind::Exponential:
            return sign > 0 ? 1.0 / rate : -1.0 / rate;
        case Kind::Uniform:
            return 0.5 * (lo + hi);
        case Kind::Empirical: {
            double m = 0.0;
            for (const auto& [z, p] : atoms) m += z * p;
            return m;
        }
    }
    return 0.0;
}

double SizeLaw::sample(StreamRng& rng) const {
    switch (kind) {
        case Kind::Point:
            return value;
        case Kind::Exponential:
            return sign * rng.exponential(rate);
        case Kind::Uniform:
            return rng.uniform(lo, hi);
        case Kind::Empirical: {
            double u = rng.uniform();
            for (const auto& [z, p] : atoms) {
                u -= p;
                if (u <= 0.0) return z;
            }
            return atoms.back().first;
        }
    }
    return 0.0;
}

void SizeLaw::collect_errors(const std::string& where, std::vector<std::string>& out) const {
    switch (kind) {
        case Kind::Point:
            break;
        case Kind::Exponential:
            if (rate <= 0.0) out.push_back(where + ": exponential rate must be > 0, got " + fmt(rate));
            if (sign != 1 && sign != -1) out.push_back(where + ": exponential sign must be +1 or -1");
            break;
        case Kind::Uniform:
            if (!(lo < hi)) out.push_back(where + ": uniform support needs lo < hi, got [" + fmt(lo) + ", " + fmt(hi) + "]");
            break;
        case Kind::Empirical: {
            if (atoms.empty()) {
                out.push_back(where + ": empirical law needs at least one atom");
                break;
            }
            double total = 0.0;
            for (const auto& [z, p] : atoms) {
                if (p < 0.0) out.push_back(where + ": negative probability " + fmt(p) + " at z = " + fmt(z));
                total += p;
            }
            if (std::abs(total - 1.0) > 1e-12)
                out.push_back(where + ": empirical probabilities sum to " + fmt(total) + ", expected 1");
            break;
        }
    }
}

std::vector<JumpAtom> JumpSpec::quadrature(int n_cells) const {
    std::vector<JumpAtom> out;
    if (!active()) return out;
    if (n_cells < 1) throw std::invalid_argument("quadrature: n_cells must be >= 1");

    auto gl_cells = [&](auto density, double a, double b, int cells) {
        // n_cells Gauss-Legendre panels over [a, b]; weights stay >= 0.
        for (int c = 0; c < cells; ++c) {
            const double ca = a + (b - a) * c / cells;
            const double cb = a + (b - a) * (c + 1) / cells;
            const double mid = 0.5 * (ca + cb), half = 0.5 * (cb - ca);
            for (int k = 0; k < 8; ++k) {
                const double z = mid + half * kGlNode[k];
                out.push_back({z, intensity * kGlWeight[k] * half * density(z)});
            }
        }
    };

    switch (law.kind) {
        case SizeLaw::Kind::Point:
            out.push_back({law.value, intensity});
            break;
        case SizeLaw::Kind::Empirical:
            for (const auto& [z, p] : law.atoms) out.push_back({z, intensity * p});
            break;
        case SizeLaw::Kind::Uniform: {
            const double dens = 1.0 / (law.hi - law.lo);
            gl_cells([dens](double) { return dens; }, law.lo, law.hi, n_cells);
            break;
        }
        case SizeLaw::Kind::Exponential: {
            // Equal-probability cells in |z| up to the 1 - 1e-12 quantile; the
            // exact tail mass is lumped at the tail's conditional mean.
            const double r = law.rate;
            const double tail_q = 1e-12;
            const double z_max = -std::log(tail_q) / r;
            double prev = 0.0;
            for (int c = 1; c <= n_cells; ++c) {
                const double q = (1.0 - tail_q) * c / n_cells;
                const double edge = -std::log1p(-q) / r;
                const double mid = 0.5 * (prev + edge), half = 0.5 * (edge - prev);
                for (int k = 0; k < 8; ++k) {
                    const double y = mid + half * kGlNode[k];
                    out.push_back({law.sign * y,
                                   intensity * kGlWeight[k] * half * r * std::exp(-r * y)});
                }
                prev = edge;
            }
            out.push_back({law.sign * (z_max + 1.0 / r), intensity * tail_q});
            break;
        }
    }

    // Absorb the O(1e-14) panel-rule defect so atom weights sum to the intensity.
    double total = 0.0;
    for (const auto& a : out) total += a.weight;
    if (total > 0.0) {
        const double scale = intensity / total;
        for (auto& a : out) a.weight *= scale;
    }
    return out;
}

Validation validate_triplet(const LevyTriplet& t, bool is_price_driver) {
    Validation v;
    if (!(t.sigma >= 0.0)) v.fail("sigma must be >= 0, got " + fmt(t.sigma));
    if (!(t.small_jump_diffusion >= 0.0))
        v.fail("small_jump_diffusion must be >= 0, got " + fmt(t.small_jump_diffusion));
    if (!(t.jumps.intensity >= 0.0))
        v.fail("jump intensity must be >= 0, got " + fmt(t.jumps.intensity));
    if (!std::isfinite(t.drift)) v.fail("drift must be finite");

    std::vector<std::string> law_errors;
    t.jumps.law.collect_errors("jump law", law_errors);
    for (auto& e : law_errors) v.fail(std::move(e));

    if (is_price_driver && t.jumps.active() && law_errors.empty()) {
        // Pi(]-inf,-1]) = 0 keeps S = E(R) strictly positive.
        const SizeLaw& law = t.jumps.law;
        switch (law.kind) {
            case SizeLaw::Kind::Point:
                if (law.value <= -1.0)
                    v.fail("mass " + fmt(t.jumps.intensity) + " at z <= -1 (point atom at " +
                           fmt(law.value) + "); Pi(]-inf,-1]) must be 0");
                break;
            case SizeLaw::Kind::Exponential:
                if (law.sign < 0)
                    v.fail("mass " + fmt(t.jumps.intensity * std::exp(-law.rate)) +
                           " at z <= -1 (negative exponential tail); Pi(]-inf,-1]) must be 0");
                break;
            case SizeLaw::Kind::Uniform:
                if (law.lo <= -1.0)
                    v.fail("mass " + fmt(t.jumps.intensity * law.mass_at_or_below(-1.0)) +
                           " at z <= -1 (uniform support reaches " + fmt(law.lo) +
                           "); Pi(]-inf,-1]) must be 0");
                break;
            case SizeLaw::Kind::Empirical:
                for (const auto& [z, p] : law.atoms)
                    if (z <= -1.0 && p > 0.0)
                        v.fail("mass " + fmt(t.jumps.intensity * p) + " at z <= -1 (atom at " +
                               fmt(z) + "); Pi(]-inf,-1]) must be 0");
                break;
        }
    }
    return v;
}

PayoffSpec PayoffSpec::ruin_indicator() { return PayoffSpec{}; }

PayoffSpec PayoffSpec::deficit_penalty(std::vector<std::pair<double, double>> table) {
    PayoffSpec p;
    p.kind = Kind::DeficitPenalty;
    p.penalty = std::move(table);
    return p;
}

double PayoffSpec::value_at_ruin(double x) const {
    if (kind == Kind::RuinIndicator) return 1.0;
    const double overshoot = std::max(0.0, -x);
    if (penalty.empty()) return 0.0;
    if (overshoot <= penalty.front().first) return penalty.front().second;
    if (overshoot >= penalty.back().first) return penalty.back().second;
    for (std::size_t i = 1; i < penalty.size(); ++i) {
        if (overshoot <= penalty[i].first) {
            const auto& [x0, y0] = penalty[i - 1];
            const auto& [x1, y1] = penalty[i];
            const double w = (overshoot - x0) / (x1 - x0);
            return y0 + w * (y1 - y0);
        }
    }
    return penalty.back().second;
}

void PayoffSpec::collect_errors(std::vector<std::string>& out) const {
    if (kind == Kind::RuinIndicator) return;
    if (penalty.empty()) {
        out.push_back("payoff: deficit_penalty needs a non-empty table");
        return;
    }
    double prev = -1.0;
    for (const auto& [x, y] : penalty) {
        if (x < 0.0) out.push_back("payoff: overshoot knot " + fmt(x) + " must be >= 0");
        if (x <= prev) out.push_back("payoff: overshoot knots must be strictly increasing");
        if (y < 0.0 || y > 1.0)
            out.push_back("payoff: penalty value " + fmt(y) + " outside [0,1]");
        prev = x;
    }
}

Validation ModelParams::validate() const {
    Validation v = validate_triplet(R, /*is_price_driver=*/true);
    for (auto& e : v.errors) e = "R: " + e;

    Validation vp = validate_triplet(P, /*is_price_driver=*/false);
    for (auto& e : vp.errors) v.fail("P: " + std::move(e));

    if (!(horizon > 0.0)) v.fail("horizon must be > 0, got " + fmt(horizon));
    std::vector<std::string> payoff_errors;
    payoff.collect_errors(payoff_errors);
    for (auto& e : payoff_errors) v.fail(std::move(e));
    v.ok = v.errors.empty();
    return v;
}

Increment sample_increment(const LevyTriplet& t, double dt, StreamRng& rng) {
    if (dt < 0.0) throw std::invalid_argument("sample_increment: dt must be >= 0");
    Increment inc;
    if (dt == 0.0) return inc;

    double cont = t.drift * dt;
    const double var = t.diffusion_variance_rate();
    if (var > 0.0) cont += std::sqrt(var * dt) * rng.normal();

    if (t.jumps.active()) {
        const std::uint64_t n = rng.poisson(t.jumps.intensity * dt);
        inc.jumps.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double offset = rng.uniform() * dt;
            inc.jumps.push_back({offset, t.jumps.law.sample(rng)});
        }
        std::sort(inc.jumps.begin(), inc.jumps.end(),
                  [](const JumpEvent& a, const JumpEvent& b) { return a.offset < b.offset; });
        cont -= t.jumps.compensator_rate() * dt;
    }
    inc.continuous = cont;
    return inc;
}

}  // namespace ruin
