#include "qslbattery/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "qslbattery/threading.hpp"

namespace qbat {

namespace {

constexpr double kRateFloor = 1e-10;     // |G| below this makes gamma unusable
constexpr double kGZeroTol = 1e-13;      // sample counts as an exact zero of G
constexpr double kGammaStepLimit = 0.4;  // halve while |gamma| h exceeds this
constexpr double kMinStep = 1e-9;        // leaf width at which halving stops
constexpr int kMaxDepth = 48;
constexpr double kLocalErrorLimit = 1e-3;

// sinh(z)/z, series below the point where direct evaluation loses digits
Complex sinhc(Complex z) {
    if (std::abs(z) < 1e-4) {
        const Complex z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

struct GPair {
    Complex g;
    Complex gdot;
};

// One complex-l code path serves the oscillatory, critically damped and
// overdamped branches. Large real arguments go through factored
// exponentials so cosh never overflows on its own.
GPair g_complex(double t, const ModelParams& p) {
    const Complex l = std::sqrt(Complex(p.lambda * p.lambda - 2.0 * p.gamma0 * p.lambda, 0.0));
    const Complex z = 0.5 * l * t;
    if (std::abs(z) < 0.5) {
        const double damp = std::exp(-0.5 * p.lambda * t);
        const Complex shc = sinhc(z);
        const Complex g = damp * (std::cosh(z) + (0.5 * p.lambda * t) * shc);
        const Complex gdot = -(0.5 * p.gamma0 * p.lambda * t) * damp * shc;
        return {g, gdot};
    }
    const Complex ea = std::exp(0.5 * t * (l - p.lambda));
    const Complex eb = std::exp(-0.5 * t * (l + p.lambda));
    const Complex r = p.lambda / l;
    const Complex g = 0.5 * ((1.0 + r) * ea + (1.0 - r) * eb);
    const Complex gdot = -(0.5 * p.gamma0 * p.lambda / l) * (ea - eb);
    return {g, gdot};
}

// State carried by the RK4 oracle. The generator moves population between
// the two levels only, so rho_gg = 1 - rho_ee is implied and the coherence
// rho_ge is the conjugate of rho_eg.
struct RkState {
    double pe;
    Complex coh;  // <e|rho|g>
};

RkState rk4_step(double h, const RkState& y, const double gamma[3]) {
    auto f = [](double g, const RkState& s) {
        return RkState{-g * s.pe, Complex(-0.5 * g) * s.coh};
    };
    const RkState k1 = f(gamma[0], y);
    const RkState k2 = f(gamma[1], {y.pe + 0.5 * h * k1.pe, y.coh + Complex(0.5 * h) * k1.coh});
    const RkState k3 = f(gamma[1], {y.pe + 0.5 * h * k2.pe, y.coh + Complex(0.5 * h) * k2.coh});
    const RkState k4 = f(gamma[2], {y.pe + h * k3.pe, y.coh + Complex(h) * k3.coh});
    return {y.pe + (h / 6.0) * (k1.pe + 2.0 * k2.pe + 2.0 * k3.pe + k4.pe),
            y.coh + Complex(h / 6.0) * (k1.coh + 2.0 * k2.coh + 2.0 * k3.coh + k4.coh)};
}

struct OracleScratch {
    const ModelParams* params;
    double max_local_error = 0.0;
};

// Recursive integrator over [a, b]. Halves while the dimensionless step
// |gamma| h is large or G changes sign inside; a leaf that still straddles a
// zero after bottoming out is crossed with the exact integrating factor of
// the linear equation, rho_eg -> rho_eg G(b)/G(a), which carries the sign
// flip of G that no finite-rate step can reproduce.
void integrate_interval(OracleScratch& sc, double a, double b, RkState& y, int depth) {
    const double h = b - a;
    const GSample sa = g_function(a, *sc.params);
    const GSample sm = g_function(0.5 * (a + b), *sc.params);
    const GSample sb = g_function(b, *sc.params);

    bool singular = sa.g * sb.g < 0.0 || sa.g * sm.g < 0.0;
    double gamma[3] = {0.0, 0.0, 0.0};
    const GSample* stages[3] = {&sa, &sm, &sb};
    double gmax = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(stages[i]->g) < kGZeroTol) {
            singular = true;
            break;
        }
        gamma[i] = -2.0 * stages[i]->gdot / stages[i]->g;
        gmax = std::max(gmax, std::abs(gamma[i]));
    }

    if (singular || gmax * h > kGammaStepLimit) {
        if (h > kMinStep && depth < kMaxDepth) {
            const double mid = 0.5 * (a + b);
            integrate_interval(sc, a, mid, y, depth + 1);
            integrate_interval(sc, mid, b, y, depth + 1);
            return;
        }
        double ga = sa.g;
        if (ga == 0.0) ga = g_function(a + 1e-13, *sc.params).g;  // endpoint landed on the zero
        if (ga == 0.0) throw NumericalDomain("rk4_oracle: cannot cross a flat zero of G");
        const double ratio = sb.g / ga;
        y.pe *= ratio * ratio;
        y.coh *= ratio;
        return;
    }

    // step-doubling error estimate; keep the two-half-step value
    const RkState one = rk4_step(h, y, gamma);
    const GSample q1 = g_function(a + 0.25 * h, *sc.params);
    const GSample q3 = g_function(a + 0.75 * h, *sc.params);
    const double gl[3] = {gamma[0], -2.0 * q1.gdot / q1.g, gamma[1]};
    const double gr[3] = {gamma[1], -2.0 * q3.gdot / q3.g, gamma[2]};
    RkState two = rk4_step(0.5 * h, y, gl);
    two = rk4_step(0.5 * h, two, gr);

    const double err = std::max(std::abs(one.pe - two.pe), std::abs(one.coh - two.coh));
    sc.max_local_error = std::max(sc.max_local_error, err);
    if (err > kLocalErrorLimit)
        throw StepSizeTooCoarse("rk4_oracle: local error " + std::to_string(err) + " at t = " +
                                std::to_string(a));
    y = two;
}

QubitState state_from_rk(const RkState& y) {
    Matrix2 rho;
    rho(0, 0) = 1.0 - y.pe;
    rho(1, 1) = y.pe;
    rho(1, 0) = y.coh;
    rho(0, 1) = std::conj(y.coh);
    return QubitState::from_matrix(rho);
}

template <typename Fill>
void fill_grid(TrajectoryGrid& grid, std::size_t n, bool parallel, Fill&& fill) {
    grid.times.resize(n + 1);
    grid.gsamples.resize(n + 1);
    grid.states.reserve(n + 1);
    grid.lrho.resize(n + 1);
    // states need a placeholder because QubitState has no default constructor
    for (std::size_t k = 0; k <= n; ++k) grid.states.push_back(QubitState::ground());
    detail::parallel_index_map(n + 1, parallel, fill);
}

TrajectoryGrid build_trajectory_impl(const ModelParams& params, double tmax, std::size_t n,
                                     bool parallel) {
    params.validate();
    if (!(tmax > 0.0)) throw GridDegenerate("build_trajectory: tmax must be positive");
    if (n < 2 || n % 2 != 0)
        throw GridDegenerate("build_trajectory: sample count must be even and at least 2");

    TrajectoryGrid grid;
    grid.params = params;
    const double h = tmax / static_cast<double>(n);
    fill_grid(grid, n, parallel, [&](std::size_t k) {
        const double t = static_cast<double>(k) * h;
        grid.times[k] = t;
        grid.gsamples[k] = g_function(t, params);
        grid.states[k] = propagate(params, t);
        grid.lrho[k] = liouvillian_at(params, t);
    });
    return grid;
}

} // namespace

void ModelParams::validate() const {
    if (!(omega0 > 0.0)) throw ConfigError("omega0 must be > 0");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (!(gamma0 > 0.0)) throw ConfigError("gamma0 must be > 0");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
    if (std::abs(std::norm(c_g) + std::norm(c_e) - 1.0) > 1e-12)
        throw ConfigError("initial amplitudes must be normalized");
}

double ModelParams::excited_population0() const { return std::norm(c_e); }

Complex ModelParams::coherence_eg0() const { return c_e * std::conj(c_g); }

Regime coupling_regime(const ModelParams& params) {
    params.validate();
    if (params.lambda / params.gamma0 >= kStandardAdRatio) return Regime::StandardAD;
    if (params.lambda < 2.0 * params.gamma0) return Regime::NonMarkovian;
    return Regime::TimeDependentMarkovian;
}

const char* regime_name(Regime r) {
    switch (r) {
    case Regime::NonMarkovian: return "non-markovian";
    case Regime::TimeDependentMarkovian: return "time-dependent-markovian";
    case Regime::StandardAD: return "standard-ad";
    }
    return "unknown";
}

GSample g_function(double t, const ModelParams& params) {
    if (t < 0.0) throw DomainError("g_function: t must be nonnegative");
    if (t == 0.0) return {0.0, 1.0, 0.0};
    const GPair gp = g_complex(t, params);
    const double scale = std::max(1.0, std::abs(gp.g.real()));
    if (std::abs(gp.g.imag()) > 1e-12 * scale || std::abs(gp.gdot.imag()) > 1e-12 * scale)
        throw NumericalDomain("g_function: residual imaginary part exceeds tolerance");
    return {t, gp.g.real(), gp.gdot.real()};
}

Rates rates(double t, const ModelParams& params) {
    const GSample s = g_function(t, params);
    if (std::abs(s.g) < kRateFloor)
        throw RateSingular("rates: G(t) vanishes at t = " + std::to_string(t));
    return {-2.0 * s.gdot / s.g, 0.0};
}

QubitState propagate(const ModelParams& params, double t) {
    const GSample s = g_function(t, params);
    const double pe = s.g * s.g * params.excited_population0();
    const Complex coh = s.g * params.coherence_eg0();
    Matrix2 rho;
    rho(0, 0) = 1.0 - pe;
    rho(1, 1) = pe;
    rho(1, 0) = coh;
    rho(0, 1) = std::conj(coh);
    return QubitState::from_matrix(rho);
}

Matrix2 liouvillian_at(const ModelParams& params, double t) {
    const GSample s = g_function(t, params);
    const double dpe = 2.0 * s.g * s.gdot * params.excited_population0();
    const Complex dcoh = s.gdot * params.coherence_eg0();
    Matrix2 out;
    out(0, 0) = -dpe;
    out(1, 1) = dpe;
    out(1, 0) = dcoh;
    out(0, 1) = std::conj(dcoh);
    return out;
}

TrajectoryGrid build_trajectory(const ModelParams& params, double tmax, std::size_t n) {
    return build_trajectory_impl(params, tmax, n, true);
}

TrajectoryGrid build_trajectory_serial(const ModelParams& params, double tmax, std::size_t n) {
    return build_trajectory_impl(params, tmax, n, false);
}

TrajectoryGrid rk4_oracle(const ModelParams& params, double tmax, std::size_t steps) {
    params.validate();
    if (!(tmax > 0.0)) throw GridDegenerate("rk4_oracle: tmax must be positive");
    if (steps < 2) throw GridDegenerate("rk4_oracle: need at least 2 steps");

    TrajectoryGrid grid;
    grid.params = params;
    const std::size_t n = steps;
    const double h = tmax / static_cast<double>(n);

    grid.times.resize(n + 1);
    grid.gsamples.resize(n + 1);
    grid.lrho.resize(n + 1);
    grid.states.reserve(n + 1);

    OracleScratch sc{&params};
    RkState y{params.excited_population0(), params.coherence_eg0()};

    grid.times[0] = 0.0;
    grid.gsamples[0] = g_function(0.0, params);
    grid.lrho[0] = liouvillian_at(params, 0.0);
    grid.states.push_back(state_from_rk(y));

    for (std::size_t k = 0; k < n; ++k) {
        const double a = static_cast<double>(k) * h;
        const double b = static_cast<double>(k + 1) * h;
        integrate_interval(sc, a, b, y, 0);
        grid.times[k + 1] = b;
        grid.gsamples[k + 1] = g_function(b, params);
        grid.lrho[k + 1] = liouvillian_at(params, b);
        grid.states.push_back(state_from_rk(y));
    }
    return grid;
}

std::vector<double> find_g_zeros(const ModelParams& params, double tmax) {
    params.validate();
    std::vector<double> zeros;
    if (params.lambda >= 2.0 * params.gamma0) return zeros;  // G stays positive

    const double osc = std::sqrt(2.0 * params.gamma0 * params.lambda - params.lambda * params.lambda);
    const double step = std::min(1e-3, 3.141592653589793 / (50.0 * osc));
    double prev_t = 0.0;
    double prev_g = 1.0;
    for (double t = step; t <= tmax + 0.5 * step; t += step) {
        const double tc = std::min(t, tmax);
        const double g = g_function(tc, params).g;
        if (g == 0.0) {
            zeros.push_back(tc);
        } else if (prev_g * g < 0.0) {
            double lo = prev_t, hi = tc;
            double glo = prev_g;
            for (int it = 0; it < 100 && (hi - lo) > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g_function(mid, params).g;
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (glo * gm < 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    glo = gm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
        prev_t = tc;
        prev_g = g;
        if (tc >= tmax) break;
    }
    return zeros;
}

} // namespace qbat
