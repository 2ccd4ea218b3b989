#pragma once

#include <vector>

#include "qslbattery/dynamics.hpp"
#include "qslbattery/qmat.hpp"

namespace qbat {

/// Qubit Hamiltonian; for this model diag(0, omega0) in the {|g>, |e>} basis.
struct Hamiltonian2 {
    Matrix2 matrix;

    static Hamiltonian2 qubit(double omega0);
    static Hamiltonian2 from_matrix(const Matrix2& m);  // throws NotHermitian

    /// Eigenvalues ascending with matching eigenvectors.
    struct Spectrum {
        std::array<double, 2> energies;      // e1 <= e2
        std::array<Vector2, 2> eigenvectors;
    };
    Spectrum ascending_spectrum() const;
    double gap() const;  // e2 - e1
};

struct GibbsResult {
    QubitState state;
    double partition;  // Z = Tr exp(-H/T)
};
GibbsResult gibbs_state(const Hamiltonian2& h, double temperature);

/// State with the descending populations of rho placed on ascending energies;
/// no work is unitarily extractable from it.
QubitState passive_state(const QubitState& rho, const Hamiltonian2& h);

/// Maximal cyclic-unitary work, Tr(rho H) - Tr(rho_passive H). Also evaluated
/// through the spectral double sum; the two routes must agree to 1e-12.
double ergotropy(const QubitState& rho, const Hamiltonian2& h);

/// Minimizer of the energy over coherence-preserving unitaries: off-diagonals
/// kept, excited population lowered to min(rho_ee, rho_gg).
QubitState coherence_invariant_state(const QubitState& rho);

struct ErgotropyBreakdown {
    double w;            // total
    double w_i;          // extractable without touching the coherence
    double w_c;          // remainder, stored in the coherence
    double w_c_eq16;     // cross-check via the relative-entropy identity
    double w_c_eq18_minus;  // closed form, minus sign between the radicals
    double w_c_eq18_plus;   // closed form, plus sign (recorded for comparison)
};
ErgotropyBreakdown ergotropy_breakdown(const QubitState& rho, const Hamiltonian2& h,
                                       double temperature);

struct PowerSeries {
    std::vector<double> times;
    std::vector<double> w;
    std::vector<double> p_inst;  // dW/dt, central differences (one-sided at the ends)
    std::vector<double> p_avg;   // (W(t) - W(t0))/(t - t0); NaN at and before t0
};
/// Grid must be uniform with at least 3 points; t0 must be a grid point.
PowerSeries power_series(const std::vector<double>& times, const std::vector<double>& w,
                         double t0 = 0.0);

struct ThermoSample {
    double purity;
    double entropy;
    double c_l1;
    double c_relent;
    double w;
    double w_i;
    double w_c;
};
/// Per-point thermodynamic functionals along a trajectory (OpenMP map).
std::vector<ThermoSample> thermo_series(const TrajectoryGrid& grid, const Hamiltonian2& h,
                                        double temperature);
std::vector<ThermoSample> thermo_series_serial(const TrajectoryGrid& grid, const Hamiltonian2& h,
                                               double temperature);

} // namespace qbat
