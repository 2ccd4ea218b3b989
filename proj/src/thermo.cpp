#include "qslbattery/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qslbattery/threading.hpp"

namespace qbat {

namespace {

constexpr double kRouteTol = 1e-12;     // the two ergotropy routes must agree this well
constexpr double kRadicandTol = 1e-12;  // roundoff window clamped to zero

Matrix2 outer(const Vector2& v) {
    Matrix2 out;
    out(0, 0) = v[0] * std::conj(v[0]);
    out(0, 1) = v[0] * std::conj(v[1]);
    out(1, 0) = v[1] * std::conj(v[0]);
    out(1, 1) = v[1] * std::conj(v[1]);
    return out;
}

double clamp_small_negative(double x, double window, const char* what) {
    if (x < -window) throw NumericalDomain(std::string(what) + " negative beyond roundoff: " +
                                           std::to_string(x));
    return std::max(x, 0.0);
}

} // namespace

Hamiltonian2 Hamiltonian2::qubit(double omega0) {
    return Hamiltonian2{Matrix2::diagonal(0.0, omega0)};
}

Hamiltonian2 Hamiltonian2::from_matrix(const Matrix2& m) {
    if (m.hermiticity_error() > kHermPreTol)
        throw NotHermitian("Hamiltonian2: matrix is not Hermitian");
    return Hamiltonian2{m};
}

Hamiltonian2::Spectrum Hamiltonian2::ascending_spectrum() const {
    const SpectralDecomposition dec = eig_hermitian(matrix);  // descending
    Spectrum s;
    s.energies = {dec.eigenvalues[1], dec.eigenvalues[0]};
    s.eigenvectors = {dec.eigenvectors[1], dec.eigenvectors[0]};
    return s;
}

double Hamiltonian2::gap() const {
    const Spectrum s = ascending_spectrum();
    return s.energies[1] - s.energies[0];
}

GibbsResult gibbs_state(const Hamiltonian2& h, double temperature) {
    if (!(temperature > 0.0)) throw DomainError("gibbs_state: temperature must be positive");
    const double beta = 1.0 / temperature;
    const Hamiltonian2::Spectrum s = h.ascending_spectrum();
    // populations relative to the ground energy, so the exponentials never overflow
    const double w1 = 1.0;
    const double w2 = std::exp(-beta * (s.energies[1] - s.energies[0]));
    const double z_shifted = w1 + w2;
    const Matrix2 rho = (w1 / z_shifted) * outer(s.eigenvectors[0]) +
                        (w2 / z_shifted) * outer(s.eigenvectors[1]);
    const double z = std::exp(-beta * s.energies[0]) * z_shifted;
    return {QubitState::from_matrix(rho), z};
}

QubitState passive_state(const QubitState& rho, const Hamiltonian2& h) {
    const SpectralDecomposition r = eig_hermitian(rho.rho());  // descending
    const Hamiltonian2::Spectrum s = h.ascending_spectrum();
    const Matrix2 out = r.eigenvalues[0] * outer(s.eigenvectors[0]) +
                        r.eigenvalues[1] * outer(s.eigenvectors[1]);
    return QubitState::from_matrix(out);
}

double ergotropy(const QubitState& rho, const Hamiltonian2& h) {
    const QubitState passive = passive_state(rho, h);
    const double w_passive_route =
        trace_product_real(rho.rho(), h.matrix) - trace_product_real(passive.rho(), h.matrix);

    // spectral double sum: sum_{j,i} r_j e_i (|<r_j|e_i>|^2 - delta_ij)
    const SpectralDecomposition r = eig_hermitian(rho.rho());
    const Hamiltonian2::Spectrum s = h.ascending_spectrum();
    double w_sum_route = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const Vector2& rv = r.eigenvectors[static_cast<std::size_t>(j)];
            const Vector2& ev = s.eigenvectors[static_cast<std::size_t>(i)];
            const Complex ov = std::conj(rv[0]) * ev[0] + std::conj(rv[1]) * ev[1];
            const double overlap = std::norm(ov);
            const double delta = (i == j) ? 1.0 : 0.0;
            w_sum_route += r.eigenvalues[static_cast<std::size_t>(j)] *
                           s.energies[static_cast<std::size_t>(i)] * (overlap - delta);
        }
    }

    if (std::abs(w_passive_route - w_sum_route) > kRouteTol)
        throw NumericalDomain("ergotropy routes disagree: " + std::to_string(w_passive_route) +
                              " vs " + std::to_string(w_sum_route));
    return clamp_small_negative(w_passive_route, kRadicandTol, "ergotropy");
}

QubitState coherence_invariant_state(const QubitState& rho) {
    const double pg = rho.population_g();
    const double pe = rho.population_e();
    const double pe_min = std::min(pe, pg);
    Matrix2 out = rho.rho();
    out(0, 0) = 1.0 - pe_min;
    out(1, 1) = pe_min;
    // the population swap never breaks positivity for a valid input; keep the guard anyway
    const SpectralDecomposition dec = eig_hermitian(out);
    if (dec.eigenvalues[1] < -kPsdTol)
        throw NotAState("coherence_invariant_state: population swap broke positivity");
    return QubitState::from_matrix(out);
}

ErgotropyBreakdown ergotropy_breakdown(const QubitState& rho, const Hamiltonian2& h,
                                       double temperature) {
    if (!(temperature > 0.0))
        throw DomainError("ergotropy_breakdown: temperature must be positive");

    ErgotropyBreakdown out{};
    out.w = ergotropy(rho, h);

    const QubitState sigma = coherence_invariant_state(rho);
    const double w_i_raw =
        trace_product_real(rho.rho(), h.matrix) - trace_product_real(sigma.rho(), h.matrix);
    out.w_i = clamp_small_negative(w_i_raw, kRadicandTol, "incoherent ergotropy");
    out.w_c = clamp_small_negative(out.w - out.w_i, 1e-10, "coherent ergotropy");

    // relative-entropy identity: beta W_c = C(rho) + S(E(sigma)||rho_eq) - D(rho||rho_eq)
    const double beta = 1.0 / temperature;
    const GibbsResult eq = gibbs_state(h, temperature);
    const StateFunctionals fr = state_functionals(rho);
    const QubitState sigma_dephased = QubitState::from_matrix(sigma.rho().dephased());
    const double s_quantum = relative_entropies(sigma_dephased, eq.state).quantum;
    const double d_classical = relative_entropies(rho, eq.state).classical;
    out.w_c_eq16 = (fr.rel_ent_coherence + s_quantum - d_classical) / beta;

    // closed form in purity and l1 coherence, both sign choices
    const double gap = h.gap();
    const double rad1 =
        clamp_small_negative(2.0 * fr.purity - 1.0, kRadicandTol, "purity radicand");
    const double rad2 = clamp_small_negative(rad1 - fr.l1_coherence * fr.l1_coherence,
                                             kRadicandTol, "coherence radicand");
    out.w_c_eq18_minus = 0.5 * gap * (std::sqrt(rad1) - std::sqrt(rad2));
    out.w_c_eq18_plus = 0.5 * gap * (std::sqrt(rad1) + std::sqrt(rad2));
    return out;
}

PowerSeries power_series(const std::vector<double>& times, const std::vector<double>& w,
                         double t0) {
    if (times.size() < 3 || w.size() != times.size())
        throw GridDegenerate("power_series: need at least 3 matching samples");
    const double h = times[1] - times[0];
    for (std::size_t k = 1; k + 1 < times.size(); ++k) {
        if (std::abs((times[k + 1] - times[k]) - h) > 1e-12 * std::max(1.0, h))
            throw GridDegenerate("power_series: grid is not uniform");
    }
    const double rel = (t0 - times.front()) / h;
    const auto k0 = static_cast<std::size_t>(std::llround(rel));
    if (k0 >= times.size() || std::abs(times[k0] - t0) > 1e-9 * std::max(1.0, times.back()))
        throw DomainError("power_series: t0 is not a grid point");

    PowerSeries out;
    out.times = times;
    out.w = w;
    const std::size_t n = times.size();
    out.p_inst.resize(n);
    out.p_avg.resize(n);

    out.p_inst[0] = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h);
    for (std::size_t k = 1; k + 1 < n; ++k) out.p_inst[k] = (w[k + 1] - w[k - 1]) / (2.0 * h);
    out.p_inst[n - 1] = (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < n; ++k) {
        out.p_avg[k] = (k > k0) ? (w[k] - w[k0]) / (times[k] - times[k0]) : nan;
    }
    return out;
}

namespace {

std::vector<ThermoSample> thermo_series_impl(const TrajectoryGrid& grid, const Hamiltonian2& h,
                                             double temperature, bool parallel) {
    std::vector<ThermoSample> out(grid.size());
    detail::parallel_index_map(out.size(), parallel, [&](std::size_t k) {
        const QubitState& rho = grid.states[k];
        const StateFunctionals f = state_functionals(rho);
        const ErgotropyBreakdown e = ergotropy_breakdown(rho, h, temperature);
        out[k] = {f.purity, f.entropy, f.l1_coherence, f.rel_ent_coherence, e.w, e.w_i, e.w_c};
    });
    return out;
}

} // namespace

std::vector<ThermoSample> thermo_series(const TrajectoryGrid& grid, const Hamiltonian2& h,
                                        double temperature) {
    return thermo_series_impl(grid, h, temperature, true);
}

std::vector<ThermoSample> thermo_series_serial(const TrajectoryGrid& grid, const Hamiltonian2& h,
                                               double temperature) {
    return thermo_series_impl(grid, h, temperature, false);
}

} // namespace qbat
