#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace qbat {

using Complex = std::complex<double>;

/// Dense 2x2 complex matrix, row-major. Value type with the handful of
/// operations a two-level system needs; anything heavier is out of scope.
struct Matrix2 {
    std::array<Complex, 4> m{};

    Complex& operator()(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
    const Complex& operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

    static Matrix2 zero() { return Matrix2{}; }
    static Matrix2 identity() {
        Matrix2 out;
        out(0, 0) = 1.0;
        out(1, 1) = 1.0;
        return out;
    }
    static Matrix2 diagonal(double a, double b) {
        Matrix2 out;
        out(0, 0) = a;
        out(1, 1) = b;
        return out;
    }

    Complex trace() const { return m[0] + m[3]; }

    Matrix2 adjoint() const {
        Matrix2 out;
        out(0, 0) = std::conj((*this)(0, 0));
        out(0, 1) = std::conj((*this)(1, 0));
        out(1, 0) = std::conj((*this)(0, 1));
        out(1, 1) = std::conj((*this)(1, 1));
        return out;
    }

    /// Diagonal part (dephasing in the computational basis).
    Matrix2 dephased() const {
        Matrix2 out;
        out(0, 0) = m[0];
        out(1, 1) = m[3];
        return out;
    }

    double max_abs() const {
        double v = 0.0;
        for (const Complex& x : m) v = std::max(v, std::abs(x));
        return v;
    }

    /// max_ij |M - M^dagger|_ij
    double hermiticity_error() const {
        const Matrix2 d = *this - adjoint();
        return d.max_abs();
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const Complex& x : m) s += std::norm(x);
        return std::sqrt(s);
    }

    friend Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
        Matrix2 out;
        for (std::size_t i = 0; i < 4; ++i) out.m[i] = a.m[i] + b.m[i];
        return out;
    }
    friend Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
        Matrix2 out;
        for (std::size_t i = 0; i < 4; ++i) out.m[i] = a.m[i] - b.m[i];
        return out;
    }
    friend Matrix2 operator*(const Matrix2& a, const Matrix2& b) {
        Matrix2 out;
        out(0, 0) = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0);
        out(0, 1) = a(0, 0) * b(0, 1) + a(0, 1) * b(1, 1);
        out(1, 0) = a(1, 0) * b(0, 0) + a(1, 1) * b(1, 0);
        out(1, 1) = a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
        return out;
    }
    friend Matrix2 operator*(Complex s, const Matrix2& a) {
        Matrix2 out;
        for (std::size_t i = 0; i < 4; ++i) out.m[i] = s * a.m[i];
        return out;
    }
    friend Matrix2 operator*(double s, const Matrix2& a) { return Complex(s, 0.0) * a; }
};

/// Re Tr(A B); exact trace inner product for Hermitian arguments.
inline double trace_product_real(const Matrix2& a, const Matrix2& b) {
    const Complex t = a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0) + a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
    return t.real();
}

} // namespace qbat
