#ifndef MLFSM_LINALG_HPP
#define MLFSM_LINALG_HPP

#include <cstddef>
#include <vector>

namespace mlfsm {

// Row-major dense matrix; sized for the small systems here (<= 10x10 blocks).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Matrix operator*(const Matrix& rhs) const;
    std::vector<double> operator*(const std::vector<double>& v) const;
    Matrix transpose() const;

    // Places `block` with its top-left corner at (i0, j0).
    void set_block(std::size_t i0, std::size_t j0, const Matrix& block);

    double max_abs() const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// LU decomposition with partial pivoting.
struct LuDecomposition {
    Matrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;

    std::vector<double> solve(const std::vector<double>& b) const;
    double determinant() const;
};

LuDecomposition lu_decompose(const Matrix& a);

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b);
double determinant(const Matrix& a);
Matrix inverse(const Matrix& a);

// 1-norm condition estimate ||A||_1 * ||A^-1||_1; +inf when singular.
double condition_number_1(const Matrix& a);

// Eigenvalues/vectors of a symmetric matrix (cyclic Jacobi).
struct SymmetricEigen {
    std::vector<double> values;   // ascending
    Matrix vectors;               // columns are eigenvectors
};

SymmetricEigen symmetric_eigen(const Matrix& a);

// Symmetrize then clamp negative eigenvalues to zero.
Matrix project_psd(const Matrix& a);

} // namespace mlfsm

#endif
