#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemostat {

// Symmetric tridiagonal matrix in compact storage.
struct SymTridiag {
    std::vector<double> diag;     // n entries
    std::vector<double> offdiag;  // n-1 entries

    std::size_t size() const { return diag.size(); }
};

// Small dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

    // max absolute row sum
    double norm_inf() const {
        double best = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n_; ++j) row += std::abs(a_[i * n_ + j]);
            if (row > best) best = row;
        }
        return best;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

Matrix to_dense(const SymTridiag& m);

struct EigResult {
    double lambda_max = 0.0;
    std::vector<double> vector;  // unit 2-norm, uniform sign with first component positive
    double residual = 0.0;       // ||A v - lambda v||_2
};

struct DenseEigs {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

class EigenConvergenceError : public std::runtime_error {
public:
    EigenConvergenceError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval gershgorin_bounds(const SymTridiag& m);

// Number of eigenvalues strictly below `shift` (Sturm sequence / LDL^T pivots,
// zero pivots replaced by a machine-scaled tiny value).
int sturm_count(const SymTridiag& m, double shift);

// Largest eigenvalue by bisection on sturm_count between Gershgorin bounds.
// tol <= 0 selects the default 1e-13 * Gershgorin radius; the bracket never
// shrinks below 4 ulp.
double top_eigenvalue(const SymTridiag& m, double tol = -1.0);

// Unit eigenvector for the top eigenvalue via inverse iteration with a shift
// slightly above lambda_max. Requires strictly positive off-diagonal entries
// (irreducible quasi-positive case); the result is entrywise positive.
EigResult perron_vector(const SymTridiag& m, double lambda_max);

// Full eigendecomposition by cyclic Jacobi rotations, n <= 16. Brute-force
// oracle; rejects matrices with asymmetry beyond 1e-12 relative.
DenseEigs dense_eigensystem(const Matrix& a);

// Gradient of the top eigenvalue with respect to the matrix entries: the
// rank-one outer product w w^T of the Perron vector.
Matrix eigenvalue_sensitivity(const SymTridiag& m);

enum class SpectralSign { negative, marginal, positive };

struct AbscissaEstimate {
    double value = 0.0;
    bool converged = false;
    SpectralSign sign = SpectralSign::marginal;
};

// Estimate of the spectral abscissa (max real part of eigenvalues) of a
// general dense matrix, m <= 64, by power iteration on the time-h propagator
// exp(A h) realized by fixed-substep RK4 with renormalization. The sign is
// certified only when the windowed growth estimates have stabilized and
// |alpha| > 1e-6; everything else reports marginal.
AbscissaEstimate spectral_abscissa(const Matrix& a);

}  // namespace chemostat
