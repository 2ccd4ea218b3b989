#include "qslbattery/qmat.hpp"

#include <algorithm>
#include <cmath>

namespace qbat {

namespace {

// Deterministic phase: rotate so the largest-modulus component is real >= 0.
Vector2 fix_phase(Vector2 v) {
    const int lead = (std::abs(v[0]) >= std::abs(v[1])) ? 0 : 1;
    const double mod = std::abs(v[lead]);
    if (mod == 0.0) return v;
    const Complex phase = std::conj(v[lead]) / mod;
    v[0] *= phase;
    v[1] *= phase;
    return v;
}

Vector2 normalized(Vector2 v) {
    const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
    v[0] /= n;
    v[1] /= n;
    return v;
}

Matrix2 outer(const Vector2& v) {
    Matrix2 out;
    out(0, 0) = v[0] * std::conj(v[0]);
    out(0, 1) = v[0] * std::conj(v[1]);
    out(1, 0) = v[1] * std::conj(v[0]);
    out(1, 1) = v[1] * std::conj(v[1]);
    return out;
}

Matrix2 hermitize(const Matrix2& m) {
    Matrix2 out;
    out(0, 0) = Complex(m(0, 0).real(), 0.0);
    out(1, 1) = Complex(m(1, 1).real(), 0.0);
    out(0, 1) = 0.5 * (m(0, 1) + std::conj(m(1, 0)));
    out(1, 0) = std::conj(out(0, 1));
    return out;
}

std::array<double, 2> psd_eigenvalues_clamped(const Matrix2& m) {
    const SpectralDecomposition dec = eig_hermitian(m);
    std::array<double, 2> ev = dec.eigenvalues;
    for (double& l : ev) {
        if (l < -kPsdTol)
            throw NegativeEigenvalue("matrix is not positive semidefinite: eigenvalue " +
                                     std::to_string(l));
        l = std::max(l, 0.0);
    }
    return ev;
}

} // namespace

Matrix2 SpectralDecomposition::reconstruct() const {
    return eigenvalues[0] * outer(eigenvectors[0]) + eigenvalues[1] * outer(eigenvectors[1]);
}

QubitState QubitState::from_matrix(const Matrix2& rho) {
    if (rho.hermiticity_error() > kHermTol)
        throw InvalidState("density matrix is not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kTraceTol)
        throw InvalidState("density matrix trace differs from 1");
    const SpectralDecomposition dec = eig_hermitian(rho);
    if (dec.eigenvalues[1] < -kPsdTol)
        throw InvalidState("density matrix has a negative eigenvalue: " +
                           std::to_string(dec.eigenvalues[1]));
    return QubitState(hermitize(rho));
}

QubitState QubitState::from_amplitudes(Complex c_g, Complex c_e) {
    const double n = std::norm(c_g) + std::norm(c_e);
    if (std::abs(n - 1.0) > kTraceTol)
        throw InvalidState("amplitudes are not normalized");
    Matrix2 rho;
    rho(0, 0) = std::norm(c_g);
    rho(1, 1) = std::norm(c_e);
    rho(0, 1) = c_g * std::conj(c_e);
    rho(1, 0) = c_e * std::conj(c_g);
    return QubitState(rho);
}

QubitState QubitState::ground() { return QubitState(Matrix2::diagonal(1.0, 0.0)); }

QubitState QubitState::maximally_mixed() { return QubitState(Matrix2::diagonal(0.5, 0.5)); }

SpectralDecomposition eig_hermitian(const Matrix2& m) {
    if (m.hermiticity_error() > kHermPreTol)
        throw NotHermitian("eig_hermitian: input fails the Hermiticity check");

    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const Complex b = 0.5 * (m(0, 1) + std::conj(m(1, 0)));

    SpectralDecomposition dec;
    if (b == Complex(0.0, 0.0)) {
        // keep diagonal input exact: the spectrum is the diagonal itself
        const bool swap = d > a;
        dec.eigenvalues = {swap ? d : a, swap ? a : d};
        dec.eigenvectors[swap ? 1 : 0] = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
        dec.eigenvectors[swap ? 0 : 1] = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
        return dec;
    }

    const double mean = 0.5 * (a + d);
    const double half_gap = 0.5 * (a - d);
    const double rad = std::hypot(half_gap, std::abs(b));

    dec.eigenvalues = {mean + rad, mean - rad};

    if (2.0 * rad < kDegenerateGap) {
        // numerically degenerate: fix the computational basis
        dec.eigenvectors[0] = {Complex(1.0, 0.0), Complex(0.0, 0.0)};
        dec.eigenvectors[1] = {Complex(0.0, 0.0), Complex(1.0, 0.0)};
        return dec;
    }

    // eigenvector candidates (b, l-a) and (l-d, conj(b)); take the better conditioned
    const double l1 = dec.eigenvalues[0];
    Vector2 v1;
    if (std::abs(l1 - a) >= std::abs(l1 - d))
        v1 = {b, Complex(l1 - a, 0.0)};
    else
        v1 = {Complex(l1 - d, 0.0), std::conj(b)};
    v1 = fix_phase(normalized(v1));
    // orthogonal complement is the second eigenvector of a 2x2 Hermitian matrix
    Vector2 v2 = fix_phase(Vector2{-std::conj(v1[1]), std::conj(v1[0])});
    dec.eigenvectors = {v1, v2};
    return dec;
}

Matrix2 matrix_function(const Matrix2& m, MatrixFn f, double floor) {
    SpectralDecomposition dec = eig_hermitian(m);
    std::array<double, 2> ev = dec.eigenvalues;
    switch (f) {
    case MatrixFn::Sqrt:
        for (double& l : ev) {
            if (l < -kPsdTol)
                throw NegativeEigenvalue("matrix_function(sqrt): eigenvalue " + std::to_string(l));
            // eigenvalues at the roundoff floor are exact zeros; without the
            // truncation sqrt would amplify 1e-17 noise to 3e-9
            l = (l < kSqrtNoiseFloor) ? 0.0 : std::sqrt(l);
        }
        break;
    case MatrixFn::Log:
        if (floor <= 0.0) throw DomainError("matrix_function(log): floor must be positive");
        for (double& l : ev) l = std::log(std::max(l, floor));
        break;
    }
    SpectralDecomposition out = dec;
    out.eigenvalues = ev;
    return hermitize(out.reconstruct());
}

Matrix2 matrix_sqrt(const Matrix2& m) { return matrix_function(m, MatrixFn::Sqrt); }

Matrix2 matrix_log(const Matrix2& m, double floor) {
    return matrix_function(m, MatrixFn::Log, floor);
}

double fidelity_with_sqrt(const Matrix2& sqrt_rho0, const QubitState& rho_t) {
    const Matrix2 inner = hermitize(sqrt_rho0 * rho_t.rho() * sqrt_rho0);
    std::array<double, 2> ev = psd_eigenvalues_clamped(inner);
    for (double& l : ev) l = (l < kSqrtNoiseFloor) ? 0.0 : l;  // same floor as matrix sqrt
    const double tr = std::sqrt(ev[0]) + std::sqrt(ev[1]);
    const double f = tr * tr;
    if (f > 1.0 + 1e-10) throw NumericalDomain("fidelity exceeds 1: " + std::to_string(f));
    return std::clamp(f, 0.0, 1.0);
}

double fidelity(const QubitState& rho0, const QubitState& rho_t) {
    return fidelity_with_sqrt(matrix_sqrt(rho0.rho()), rho_t);
}

double affinity_with_sqrt(const Matrix2& sqrt_rho0, const QubitState& rho_t) {
    const double a = trace_product_real(sqrt_rho0, matrix_sqrt(rho_t.rho()));
    if (a > 1.0 + 1e-10) throw NumericalDomain("affinity exceeds 1: " + std::to_string(a));
    return std::clamp(a, 0.0, 1.0);
}

double affinity(const QubitState& rho0, const QubitState& rho_t) {
    return affinity_with_sqrt(matrix_sqrt(rho0.rho()), rho_t);
}

SchattenNorms schatten_norms(const Matrix2& a) {
    // singular values from the spectrum of A^dagger A
    const Matrix2 ata = hermitize(a.adjoint() * a);
    const std::array<double, 2> ev = psd_eigenvalues_clamped(ata);
    const double s1 = std::sqrt(ev[0]);
    const double s2 = std::sqrt(ev[1]);
    return {s1, s1 + s2, a.frobenius_norm()};
}

double entropy_of_eigenvalues(double l1, double l2) {
    auto term = [](double l) { return (l > 0.0) ? -l * std::log(l) : 0.0; };
    return term(std::max(l1, 0.0)) + term(std::max(l2, 0.0));
}

StateFunctionals state_functionals(const QubitState& rho) {
    const Matrix2& r = rho.rho();
    StateFunctionals out;
    out.purity = trace_product_real(r, r);
    const SpectralDecomposition dec = eig_hermitian(r);
    out.entropy = entropy_of_eigenvalues(dec.eigenvalues[0], dec.eigenvalues[1]);
    out.dephased = r.dephased();
    out.l1_coherence = std::abs(r(0, 1)) + std::abs(r(1, 0));
    const double s_diag = entropy_of_eigenvalues(r(0, 0).real(), r(1, 1).real());
    double c = s_diag - out.entropy;
    if (c < -1e-10) throw NumericalDomain("relative entropy of coherence came out negative");
    out.rel_ent_coherence = std::max(c, 0.0);
    return out;
}

RelativeEntropies relative_entropies(const QubitState& rho, const QubitState& sigma,
                                     double floor, bool clamp_reference) {
    const SpectralDecomposition sig = eig_hermitian(sigma.rho());
    if (!clamp_reference && sig.eigenvalues[1] < floor)
        throw SingularReference("reference state eigenvalue " +
                                std::to_string(sig.eigenvalues[1]) + " below floor");

    RelativeEntropies out;
    // quantum: Tr rho ln rho - Tr rho ln sigma, with 0 ln 0 = 0 on rho's side
    const SpectralDecomposition rh = eig_hermitian(rho.rho());
    const double tr_rho_ln_rho = -entropy_of_eigenvalues(rh.eigenvalues[0], rh.eigenvalues[1]);
    const Matrix2 ln_sigma = matrix_log(sigma.rho(), floor);
    const double tr_rho_ln_sigma = trace_product_real(rho.rho(), ln_sigma);
    out.quantum = std::max(tr_rho_ln_rho - tr_rho_ln_sigma, 0.0);

    // classical: descending eigenvalue lists
    double d = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double p = std::max(rh.eigenvalues[static_cast<std::size_t>(i)], 0.0);
        const double s = std::max(sig.eigenvalues[static_cast<std::size_t>(i)], floor);
        if (p > 0.0) d += p * (std::log(p) - std::log(s));
    }
    out.classical = std::max(d, 0.0);
    return out;
}

} // namespace qbat
