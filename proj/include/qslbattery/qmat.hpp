#pragma once

#include <array>

#include "qslbattery/errors.hpp"
#include "qslbattery/matrix2.hpp"

namespace qbat {

// Tolerances used by the exact 2x2 routines.
inline constexpr double kHermTol = 1e-12;        // state Hermiticity
inline constexpr double kHermPreTol = 1e-10;     // eigensolver input check
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-12;         // eigenvalues >= -kPsdTol
inline constexpr double kDegenerateGap = 1e-14;  // below this the eigenbasis is ambiguous
inline constexpr double kSqrtNoiseFloor = 1e-14; // sqrt treats smaller eigenvalues as zero
inline constexpr double kDefaultLogFloor = 1e-12;

using Vector2 = std::array<Complex, 2>;

/// Eigen-decomposition of a Hermitian 2x2 matrix, eigenvalues sorted
/// descending, eigenvectors orthonormal with a deterministic phase.
struct SpectralDecomposition {
    std::array<double, 2> eigenvalues{};
    std::array<Vector2, 2> eigenvectors{};

    Matrix2 reconstruct() const;
};

/// Density matrix of a qubit. Construction validates Hermiticity, unit trace
/// and positivity; instances are immutable afterwards.
class QubitState {
public:
    static QubitState from_matrix(const Matrix2& rho);
    /// Pure state c_g|0> + c_e|1>; amplitudes must be normalized.
    static QubitState from_amplitudes(Complex c_g, Complex c_e);
    static QubitState ground();
    static QubitState maximally_mixed();

    const Matrix2& rho() const { return rho_; }
    double population_g() const { return rho_(0, 0).real(); }
    double population_e() const { return rho_(1, 1).real(); }
    /// <e| rho |g>
    Complex coherence_eg() const { return rho_(1, 0); }

private:
    explicit QubitState(const Matrix2& rho) : rho_(rho) {}
    Matrix2 rho_;
};

enum class MatrixFn { Sqrt, Log };

/// Closed-form eigensolver (trace/determinant); throws NotHermitian when the
/// input fails the Hermiticity check at 1e-10.
SpectralDecomposition eig_hermitian(const Matrix2& m);

/// f applied to the spectrum and reconstructed in the eigenbasis. For Log the
/// eigenvalues are clamped below at `floor` first; for Sqrt an eigenvalue
/// below -1e-12 raises NegativeEigenvalue (roundoff-negative is clamped to 0).
Matrix2 matrix_function(const Matrix2& m, MatrixFn f, double floor = kDefaultLogFloor);
Matrix2 matrix_sqrt(const Matrix2& m);
Matrix2 matrix_log(const Matrix2& m, double floor = kDefaultLogFloor);

/// Uhlmann fidelity F = {Tr sqrt(sqrt(rho0) rho_t sqrt(rho0))}^2 in [0, 1].
double fidelity(const QubitState& rho0, const QubitState& rho_t);
/// Same, reusing a precomputed sqrt(rho0).
double fidelity_with_sqrt(const Matrix2& sqrt_rho0, const QubitState& rho_t);

/// Affinity Tr[sqrt(rho0) sqrt(rho_t)] in [0, 1].
double affinity(const QubitState& rho0, const QubitState& rho_t);
double affinity_with_sqrt(const Matrix2& sqrt_rho0, const QubitState& rho_t);

struct SchattenNorms {
    double op;  // largest singular value
    double tr;  // sum of singular values
    double hs;  // Frobenius
};
SchattenNorms schatten_norms(const Matrix2& a);

struct StateFunctionals {
    double purity;          // Tr rho^2
    double entropy;         // von Neumann, nats
    Matrix2 dephased;       // diagonal part in the energy basis
    double l1_coherence;    // sum of off-diagonal moduli
    double rel_ent_coherence;  // S(rho^D) - S(rho)
};
StateFunctionals state_functionals(const QubitState& rho);

/// Shannon entropy of a 2-outcome distribution, nats, 0 ln 0 = 0.
double entropy_of_eigenvalues(double l1, double l2);

struct RelativeEntropies {
    double quantum;    // S(rho || sigma)
    double classical;  // D between descending-sorted eigenvalue lists
};
/// `floor` guards the reference logarithms. With clamp_reference = false a
/// sigma eigenvalue below the floor raises SingularReference; with true the
/// eigenvalue is clamped instead.
RelativeEntropies relative_entropies(const QubitState& rho, const QubitState& sigma,
                                     double floor = kDefaultLogFloor,
                                     bool clamp_reference = false);

} // namespace qbat
