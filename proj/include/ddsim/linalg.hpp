// Dense complex-matrix kernel: Kronecker products, Hermitian
// exponentials, partial trace over the bath factor, norms.
//
// Everything is templated on the real scalar so the same code serves double
// (production) and long double (reference checks in tests).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

#include "ddsim/errors.hpp"

namespace ddsim {

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using CMatrix = CMatrixT<double>;
using RVector = RVectorT<double>;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// Largest matrix dimension any operator may reach (qubit plus 11 bath spins).
inline constexpr Index kMaxDimension = 4096;

namespace pauli {

template <typename Real = double>
CMatrixT<Real> identity() { return CMatrixT<Real>::Identity(2, 2); }

template <typename Real = double>
CMatrixT<Real> x()
{
    CMatrixT<Real> m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

template <typename Real = double>
CMatrixT<Real> y()
{
    using C = std::complex<Real>;
    CMatrixT<Real> m(2, 2);
    m << C(0), C(0, -1), C(0, 1), C(0);
    return m;
}

template <typename Real = double>
CMatrixT<Real> z()
{
    CMatrixT<Real> m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

} // namespace pauli

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a,
          const Eigen::MatrixBase<DerivedB>& b,
          Index cap = kMaxDimension)
{
    using Scalar = typename DerivedA::Scalar;
    using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Index rows = a.rows() * b.rows();
    const Index cols = a.cols() * b.cols();
    if (rows > cap || cols > cap) {
        throw DimensionError("kron: result dimension " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " exceeds cap " + std::to_string(cap));
    }
    Result out(rows, cols);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Largest entry magnitude of a - a^dagger.
template <typename Derived>
auto hermiticity_defect(const Eigen::MatrixBase<Derived>& a)
{
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// Entries are of order the matrix's largest element, so the tolerance scales
// with it (never below the absolute 1e-12 for order-one matrices).
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = 1e-12)
{
    if (a.rows() != a.cols()) return false;
    using std::max;
    const double scale = max(1.0, static_cast<double>(a.cwiseAbs().maxCoeff()));
    return static_cast<double>(hermiticity_defect(a)) < tol * scale;
}

// max |U^dagger U - 1|
template <typename Derived>
auto unitarity_residual(const Eigen::MatrixBase<Derived>& u)
{
    using Plain = typename Derived::PlainObject;
    return (u.adjoint() * u - Plain::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// Spectral decomposition h = V diag(E) V^dagger of a Hermitian generator.
// Reused for every duration t, which is what makes sweeps cheap.
template <typename Real>
class HermitianEigenT {
public:
    using Matrix = CMatrixT<Real>;
    using Vector = RVectorT<Real>;

    HermitianEigenT() = default;

    explicit HermitianEigenT(const Matrix& h)
    {
        if (h.rows() != h.cols()) {
            throw DimensionError("HermitianEigen: generator must be square");
        }
        if (!is_hermitian(h)) {
            throw ContractError("HermitianEigen: generator is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
        if (solver.info() != Eigen::Success) {
            throw NumericError("HermitianEigen: eigendecomposition failed");
        }
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    Index dim() const { return values_.size(); }
    const Vector& eigenvalues() const { return values_; }
    const Matrix& eigenvectors() const { return vectors_; }

    // exp(-i t E) as a vector of phases
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> phases(Real t) const
    {
        using C = std::complex<Real>;
        return values_.unaryExpr([t](Real e) { return std::exp(C(0, -e * t)); });
    }

    // exp(-i t h)
    Matrix propagator(Real t) const
    {
        return vectors_ * phases(t).asDiagonal() * vectors_.adjoint();
    }

private:
    Vector values_;
    Matrix vectors_;
};

using HermitianEigen = HermitianEigenT<double>;

// exp(-i t h) for Hermitian h.
template <typename Real>
CMatrixT<Real> expm_hermitian(const CMatrixT<Real>& h, Real t)
{
    return HermitianEigenT<Real>(h).propagator(t);
}

inline CMatrix expm_hermitian(const CMatrix& h, double t)
{
    return expm_hermitian<double>(h, t);
}

// tr_B for a qubit (first factor) times a bath of dimension bath_dim.
template <typename Derived>
auto partial_trace_bath(const Eigen::MatrixBase<Derived>& rho, Index bath_dim)
{
    using Scalar = typename Derived::Scalar;
    using Result = Eigen::Matrix<Scalar, 2, 2>;
    if (bath_dim < 1 || rho.rows() != 2 * bath_dim || rho.cols() != 2 * bath_dim) {
        throw DimensionError("partial_trace_bath: expected a square matrix of dimension 2*" +
                             std::to_string(bath_dim));
    }
    Result out;
    for (Index a = 0; a < 2; ++a) {
        for (Index b = 0; b < 2; ++b) {
            out(a, b) = rho.block(a * bath_dim, b * bath_dim, bath_dim, bath_dim).trace();
        }
    }
    return out;
}

// tr(a^dagger a); for the Hermitian differences used here this is tr(a^2).
template <typename Derived>
auto frobenius_sq(const Eigen::MatrixBase<Derived>& a)
{
    return a.squaredNorm();
}

} // namespace ddsim
