#pragma once

#include <cstddef>
#include <vector>

#include "qslbattery/qmat.hpp"

namespace qbat {

/// Couplings of the damped qubit and the initial pure state amplitudes.
/// Units: hbar = k_B = 1, times in units of 1/omega0 with omega0 = 1 default.
struct ModelParams {
    double omega0 = 1.0;       // transition frequency
    double lambda = 0.5;       // spectral width of the reservoir
    double gamma0 = 10.0;      // coupling strength
    double temperature = 1.0;  // Gibbs reference temperature
    Complex c_g{0.8660254037844386, 0.0};  // sqrt(3)/2
    Complex c_e{0.5, 0.0};

    void validate() const;  // throws ConfigError
    double excited_population0() const;  // |c_e|^2
    Complex coherence_eg0() const;       // <e|rho_0|g> = c_e conj(c_g)
};

enum class Regime { NonMarkovian, TimeDependentMarkovian, StandardAD };

/// lambda/gamma0 at or above this is reported as the flat-rate damping channel.
inline constexpr double kStandardAdRatio = 100.0;

Regime coupling_regime(const ModelParams& params);
const char* regime_name(Regime r);

/// Decoherence function G(t) and its exact derivative.
struct GSample {
    double t;
    double g;
    double gdot;
};

GSample g_function(double t, const ModelParams& params);

struct Rates {
    double gamma;  // time-local decay rate, -2 Re(Gdot/G)
    double shift;  // frequency shift, -2 Im(Gdot/G); zero on resonance
};

/// Throws RateSingular when |G(t)| < 1e-10 (the rate diverges at zeros of G;
/// use liouvillian_at there instead).
Rates rates(double t, const ModelParams& params);

/// Exact reduced state at time t: rho_ee = G^2 rho_ee(0), rho_eg = G rho_eg(0).
QubitState propagate(const ModelParams& params, double t);

/// d rho/dt along the trajectory, in the form 2 G Gdot / Gdot that stays
/// finite at zeros of G. Traceless and Hermitian.
Matrix2 liouvillian_at(const ModelParams& params, double t);

struct TrajectoryGrid {
    ModelParams params;
    std::vector<double> times;      // uniform, N+1 points from 0 to tmax
    std::vector<GSample> gsamples;
    std::vector<QubitState> states;
    std::vector<Matrix2> lrho;      // d rho/dt at each sample

    std::size_t size() const { return times.size(); }
    std::size_t subintervals() const { return times.size() - 1; }
    double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    double tmax() const { return times.empty() ? 0.0 : times.back(); }
};

/// Samples the exact map on a uniform grid; n must be even and >= 2, tmax > 0.
/// Grid points are filled independently (OpenMP map).
TrajectoryGrid build_trajectory(const ModelParams& params, double tmax, std::size_t n);
/// Plain-loop reference used by the tests and the benchmark.
TrajectoryGrid build_trajectory_serial(const ModelParams& params, double tmax, std::size_t n);

/// Independent check: fixed-step RK4 on the master equation in its
/// time-local-rate form, with recursive step halving where |gamma| h gets
/// large and an exact integrating-factor crossing for the vanishing-G leaf.
/// Throws StepSizeTooCoarse if the per-step error estimate exceeds 1e-3.
TrajectoryGrid rk4_oracle(const ModelParams& params, double tmax, std::size_t steps);

/// Zeros of G in (0, tmax], bisection-refined. Empty in the monotone regime.
std::vector<double> find_g_zeros(const ModelParams& params, double tmax);

} // namespace qbat
