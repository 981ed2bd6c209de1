#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>

#include "ptwalk/errors.hpp"

namespace ptwalk::numerics {

using cdouble = std::complex<double>;

/// Small dense complex matrix, dimension 2 or 4, row-major storage.
/// All coin-space and superoperator objects live in this type. Entries are
/// checked finite on construction.
class CMat {
public:
    CMat() : dim_(2) { entries_.fill(cdouble{0.0, 0.0}); }

    explicit CMat(int dim) : dim_(dim) {
        check_dim(dim);
        entries_.fill(cdouble{0.0, 0.0});
    }

    CMat(int dim, std::initializer_list<cdouble> vals) : dim_(dim) {
        check_dim(dim);
        if (static_cast<int>(vals.size()) != dim * dim)
            throw Error("CMat: initializer size does not match dim*dim");
        entries_.fill(cdouble{0.0, 0.0});
        int i = 0;
        for (const auto& v : vals) entries_[i++] = v;
        check_finite();
    }

    static CMat zero(int dim) { return CMat(dim); }

    static CMat identity(int dim) {
        CMat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cdouble& operator()(int r, int c) { return entries_[r * dim_ + c]; }
    const cdouble& operator()(int r, int c) const { return entries_[r * dim_ + c]; }

    CMat& operator+=(const CMat& o) {
        require_same_dim(o);
        for (int i = 0; i < dim_ * dim_; ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        require_same_dim(o);
        for (int i = 0; i < dim_ * dim_; ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    CMat& operator*=(cdouble s) {
        for (int i = 0; i < dim_ * dim_; ++i) entries_[i] *= s;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, cdouble s) { return a *= s; }
    friend CMat operator*(cdouble s, CMat a) { return a *= s; }

    friend CMat operator*(const CMat& a, const CMat& b) {
        a.require_same_dim(b);
        const int n = a.dim_;
        CMat c(n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                const cdouble aik = a(i, k);
                if (aik == cdouble{0.0, 0.0}) continue;
                for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    CMat adjoint() const {
        CMat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
        return r;
    }

    CMat transpose() const {
        CMat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    CMat conjugate() const {
        CMat r(dim_);
        for (int i = 0; i < dim_ * dim_; ++i) r.entries_[i] = std::conj(entries_[i]);
        return r;
    }

    cdouble trace() const {
        cdouble t{0.0, 0.0};
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (int i = 0; i < dim_ * dim_; ++i) s += std::norm(entries_[i]);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < dim_ * dim_; ++i) m = std::max(m, std::abs(entries_[i]));
        return m;
    }

    /// (M + M†)/2, used to tidy objects that are Hermitian analytically.
    CMat hermitized() const {
        CMat r(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                r(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
        return r;
    }

    bool is_finite() const {
        for (int i = 0; i < dim_ * dim_; ++i)
            if (!std::isfinite(entries_[i].real()) || !std::isfinite(entries_[i].imag()))
                return false;
        return true;
    }

    void check_finite() const {
        if (!is_finite()) throw Error("CMat: non-finite entry");
    }

private:
    static void check_dim(int dim) {
        if (dim != 2 && dim != 4) throw Error("CMat: dim must be 2 or 4");
    }
    void require_same_dim(const CMat& o) const {
        if (dim_ != o.dim_) throw Error("CMat: dimension mismatch");
    }

    int dim_;
    std::array<cdouble, 16> entries_;
};

/// Kronecker product of two 2x2 matrices, yielding a 4x4.
inline CMat kron2(const CMat& a, const CMat& b) {
    if (a.dim() != 2 || b.dim() != 2) throw Error("kron2: expects 2x2 operands");
    CMat r(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    r(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return r;
}

} // namespace ptwalk::numerics
