#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "qslbattery/dynamics.hpp"
#include "qslbattery/qmat.hpp"

namespace qbat {

enum class QuadScheme { Simpson, Trapezoid };

struct QuadratureSpec {
    std::size_t n = 0;  // subinterval count; 0 inherits the trajectory grid
    QuadScheme scheme = QuadScheme::Simpson;
    double singular_guard = 0.0;  // half-width around zeros of G excluded from
                                  // the coherence-mode integrand (0: exact-zero
                                  // samples only)
};

enum class BuresVariant {
    Standard,   // arccos(sqrt F)
    AsPrinted,  // arccos(F)
};

enum class RelPurityMode {
    Eq6Coherence,         // integrand |Gdot/G| C_l1(rho_0), the evolved-coherence reduction
    Eq4General,           // Hilbert-Schmidt norm of the generator output
    Eq6InitialCoherence,  // integrand |Gdot/G^2| C_l1(rho_0), comparison reading
};

struct QslOptions {
    QuadratureSpec quad;
    BuresVariant bures_variant = BuresVariant::Standard;
    RelPurityMode relpurity_mode = RelPurityMode::Eq6Coherence;
    double epsilon_floor = kDefaultLogFloor;
};

/// All four speed-limit times at one driving time tau, with the factors they
/// are assembled from.
struct QslResult {
    double tau = 0.0;

    double tau_qsl_fisher = 0.0;
    double tau_qsl_wy = 0.0;
    double tau_qsl_relpurity = 0.0;
    double tau_csl = 0.0;

    double bures_angle = 0.0;
    double wy_angle = 0.0;
    double lambda_op = 0.0;
    double lambda_tr = 0.0;
    double lambda_hs = 0.0;
    double theta = 0.0;
    double f_rel_purity = 1.0;
    double lambda_rms = 0.0;
    double lambda_rms_d = 0.0;
    double lognorm_avg = 0.0;
    double lognorm_avg_d = 0.0;

    bool stationary = false;
    bool singular_integrand = false;
};

/// Shared engine: integrand tables and prefix quadrature sums are built once
/// from a trajectory, then every tau on the grid is O(1). Immutable after
/// construction; evaluation is safe from any number of threads.
class QslSweep {
public:
    QslSweep(const TrajectoryGrid& grid, QslOptions options);

    const TrajectoryGrid& grid() const { return *grid_; }
    const QslOptions& options() const { return options_; }

    /// tau = times[index]; index 0 returns the zero-time limits.
    QslResult at(std::size_t index) const;
    std::vector<QslResult> all() const;         // OpenMP map over tau
    std::vector<QslResult> all_serial() const;  // plain loop reference

    /// Grid index of a tau value; snaps within 1e-9, throws GridTooShort past
    /// the grid end and DomainError off the grid points.
    std::size_t index_of_tau(double tau) const;

    double skipped_fraction() const;
    bool singular_integrand_flagged() const;
    const std::vector<double>& g_zeros() const { return zeros_; }

private:
    const TrajectoryGrid* grid_;
    QslOptions options_;
    double h_;
    Matrix2 sqrt_rho0_;
    double c0_;          // relative entropy of coherence of rho_0
    double tr_rho0_sq_;
    std::vector<double> zeros_;
    std::size_t n_skipped_ = 0;

    // prefix integrals over [0, t_k]
    std::vector<double> cum_op_, cum_tr_, cum_hs_;
    std::vector<double> cum_hs2_, cum_hs2_d_;
    std::vector<double> cum_ln2_, cum_ln2_d_;
    std::vector<double> cum_relp_;
    std::vector<double> c_relent_;  // per-sample coherence, reused by the numerator
};

/// Time-averaged Schatten norms of the generator over [0, tau]:
/// (Lambda_op, Lambda_tr, Lambda_hs).
std::array<double, 3> time_averaged_norms(const TrajectoryGrid& grid, double tau,
                                          const QuadratureSpec& quad);

/// Angle between states from the fidelity; Standard uses arccos(sqrt F),
/// AsPrinted arccos(F).
double bures_angle(const QubitState& rho0, const QubitState& rho_t, BuresVariant variant);

struct RelPurity {
    double f;
    double theta;
};
RelPurity relative_purity(const TrajectoryGrid& grid, double tau);

QslResult tau_qsl_fisher(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                         BuresVariant variant = BuresVariant::Standard);
QslResult tau_qsl_wy(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad);
QslResult tau_qsl_relpurity(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                            RelPurityMode mode = RelPurityMode::Eq6Coherence);
QslResult tau_csl(const TrajectoryGrid& grid, double tau, const QuadratureSpec& quad,
                  double floor = kDefaultLogFloor);

struct Extremum {
    double t;
    double value;
    bool is_max;
    double prominence;
};
/// Interior strict local extrema with prominence at or above the threshold,
/// positions refined by 3-point parabolic interpolation.
std::vector<Extremum> extrema_locator(const std::vector<double>& xs,
                                      const std::vector<double>& ys, double min_prominence);

/// Prefix integrals of uniformly sampled values: out[k] ~ integral to x_k.
/// Simpson uses the half-panel rule, so even indices carry the composite sum.
std::vector<double> cumulative_integral(const std::vector<double>& f, double h,
                                        QuadScheme scheme);

} // namespace qbat
