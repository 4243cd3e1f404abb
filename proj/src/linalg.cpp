#include "mlfsm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlfsm/errors.hpp"

namespace mlfsm {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

std::vector<double> Matrix::operator*(const std::vector<double>& v) const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

void Matrix::set_block(std::size_t i0, std::size_t j0, const Matrix& block) {
    for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j) (*this)(i0 + i, j0 + j) = block(i, j);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

LuDecomposition lu_decompose(const Matrix& a) {
    const std::size_t n = a.rows();
    LuDecomposition d;
    d.lu = a;
    d.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(d.lu(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(d.lu(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0 || !std::isfinite(best)) {
            d.singular = true;
            return d;
        }
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(d.lu(piv, j), d.lu(col, j));
            std::swap(d.perm[piv], d.perm[col]);
            d.sign = -d.sign;
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = d.lu(r, col) / d.lu(col, col);
            d.lu(r, col) = f;
            for (std::size_t j = col + 1; j < n; ++j) d.lu(r, j) -= f * d.lu(col, j);
        }
    }
    return d;
}

std::vector<double> LuDecomposition::solve(const std::vector<double>& b) const {
    if (singular) throw numerical_error("linear solve: matrix is singular");
    const std::size_t n = lu.rows();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu(ii, j) * x[j];
        x[ii] /= lu(ii, ii);
    }
    return x;
}

double LuDecomposition::determinant() const {
    if (singular) return 0.0;
    double det = static_cast<double>(sign);
    for (std::size_t i = 0; i < lu.rows(); ++i) det *= lu(i, i);
    return det;
}

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
    return lu_decompose(a).solve(b);
}

double determinant(const Matrix& a) { return lu_decompose(a).determinant(); }

Matrix inverse(const Matrix& a) {
    const std::size_t n = a.rows();
    auto d = lu_decompose(a);
    if (d.singular) throw numerical_error("inverse: matrix is singular");
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        std::fill(e.begin(), e.end(), 0.0);
        e[j] = 1.0;
        auto col = d.solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

namespace {
double norm_1(const Matrix& a) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}
} // namespace

double condition_number_1(const Matrix& a) {
    auto d = lu_decompose(a);
    if (d.singular) return std::numeric_limits<double>::infinity();
    return norm_1(a) * norm_1(inverse(a));
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix m = a;
    // enforce exact symmetry before sweeping
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m(i, j) = m(j, i) = avg;
        }
    Matrix v = Matrix::identity(n);

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = m(i, i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
    SymmetricEigen sorted;
    sorted.values.resize(n);
    sorted.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        sorted.values[j] = out.values[order[j]];
        for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

Matrix project_psd(const Matrix& a) {
    const std::size_t n = a.rows();
    auto eig = symmetric_eigen(a);
    Matrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(eig.values[k], 0.0);
        if (lam == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += lam * eig.vectors(i, k) * eig.vectors(j, k);
    }
    return out;
}

} // namespace mlfsm
