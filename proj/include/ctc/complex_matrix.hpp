#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ctc/errors.hpp"

namespace ctc {

using Complex = std::complex<double>;

/// Dense square complex matrix that carries its ordered list of
/// tensor-factor dimensions. The side length always equals the product
/// of the factor dimensions, which lets partial traces and factor
/// embeddings be checked instead of guessed at call sites.
class ComplexMatrix {
  public:
    ComplexMatrix() : dims_{1}, side_(1), data_(1, Complex(0, 0)) {}

    explicit ComplexMatrix(std::vector<int> dims)
        : dims_(std::move(dims)), side_(product(dims_)), data_(static_cast<size_t>(side_) * side_) {
        if (dims_.empty()) throw dimension_error("ComplexMatrix: empty factor list");
        for (int d : dims_)
            if (d < 1) throw dimension_error("ComplexMatrix: factor dimension < 1");
    }

    static ComplexMatrix zero(std::vector<int> dims) { return ComplexMatrix(std::move(dims)); }

    static ComplexMatrix identity(std::vector<int> dims) {
        ComplexMatrix m(std::move(dims));
        for (int i = 0; i < m.side_; ++i) m(i, i) = 1.0;
        return m;
    }

    /// Single factor of dimension n.
    static ComplexMatrix zero(int n) { return zero(std::vector<int>{n}); }
    static ComplexMatrix identity(int n) { return identity(std::vector<int>{n}); }

    int side() const { return side_; }
    const std::vector<int>& dims() const { return dims_; }
    int factor_count() const { return static_cast<int>(dims_.size()); }

    Complex& operator()(int r, int c) { return data_[static_cast<size_t>(r) * side_ + c]; }
    const Complex& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * side_ + c]; }

    const std::vector<Complex>& raw() const { return data_; }

    /// Reinterpret the same entries under a different factor split
    /// (product must match the side length).
    ComplexMatrix with_dims(std::vector<int> dims) const {
        if (product(dims) != side_) throw dimension_error("with_dims: factor product != side");
        ComplexMatrix m = *this;
        m.dims_ = std::move(dims);
        return m;
    }

    ComplexMatrix dagger() const {
        ComplexMatrix m(dims_);
        for (int r = 0; r < side_; ++r)
            for (int c = 0; c < side_; ++c) m(c, r) = std::conj((*this)(r, c));
        return m;
    }

    Complex trace() const {
        Complex t(0, 0);
        for (int i = 0; i < side_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0;
        for (const Complex& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    bool is_finite() const {
        for (const Complex& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        check_same_side(o, "+");
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        check_same_side(o, "-");
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMatrix& operator*=(Complex z) {
        for (Complex& v : data_) v *= z;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex z) { return a *= z; }
    friend ComplexMatrix operator*(Complex z, ComplexMatrix a) { return a *= z; }
    friend ComplexMatrix operator*(ComplexMatrix a, double z) { return a *= Complex(z, 0); }
    friend ComplexMatrix operator*(double z, ComplexMatrix a) { return a *= Complex(z, 0); }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.check_same_side(b, "*");
        ComplexMatrix m(a.dims_);
        for (int r = 0; r < a.side_; ++r)
            for (int k = 0; k < a.side_; ++k) {
                const Complex arc = a(r, k);
                if (arc == Complex(0, 0)) continue;
                for (int c = 0; c < a.side_; ++c) m(r, c) += arc * b(k, c);
            }
        return m;
    }

    std::string to_string() const {
        std::ostringstream os;
        for (int r = 0; r < side_; ++r) {
            for (int c = 0; c < side_; ++c) {
                const Complex& z = (*this)(r, c);
                os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i) ";
            }
            os << "\n";
        }
        return os.str();
    }

    static int product(const std::vector<int>& dims) {
        return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
    }

  private:
    void check_same_side(const ComplexMatrix& o, const char* op) const {
        if (side_ != o.side_)
            throw dimension_error(std::string("matrix op '") + op + "': side mismatch");
    }

    std::vector<int> dims_;
    int side_ = 1;
    std::vector<Complex> data_;
};

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.dagger(); }

inline Complex trace(const ComplexMatrix& m) { return m.trace(); }

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

/// Kronecker product; factor lists concatenate.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    std::vector<int> dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    ComplexMatrix m(dims);
    const int nb = b.side();
    for (int i = 0; i < a.side(); ++i)
        for (int j = 0; j < a.side(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex(0, 0)) continue;
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l) m(i * nb + k, j * nb + l) = aij * b(k, l);
        }
    return m;
}

namespace detail {

inline std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
    return s;
}

inline void decompose(int index, const std::vector<int>& dims, const std::vector<int>& strides,
                      std::vector<int>& out) {
    for (size_t f = 0; f < dims.size(); ++f) {
        out[f] = index / strides[f];
        index %= strides[f];
    }
}

}  // namespace detail

/// Partial trace keeping the factors listed in `keep` (0-based, strictly
/// increasing). Kept factor dimensions survive in their original order;
/// an empty `keep` produces the full trace as a 1x1 matrix.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<int>& keep) {
    const auto& dims = m.dims();
    const int nf = m.factor_count();
    std::vector<bool> kept(nf, false);
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= nf) throw dimension_error("partial_trace: factor index out of range");
        if (i > 0 && keep[i] <= keep[i - 1]) throw dimension_error("partial_trace: keep must be strictly increasing");
        kept[keep[i]] = true;
    }

    std::vector<int> out_dims;
    for (int f = 0; f < nf; ++f)
        if (kept[f]) out_dims.push_back(dims[f]);
    if (out_dims.empty()) out_dims.push_back(1);

    ComplexMatrix out(out_dims);
    const auto strides = detail::strides_of(dims);
    const auto out_strides = detail::strides_of(out_dims);
    std::vector<int> ri(nf), ci(nf);
    for (int r = 0; r < m.side(); ++r) {
        detail::decompose(r, dims, strides, ri);
        for (int c = 0; c < m.side(); ++c) {
            detail::decompose(c, dims, strides, ci);
            bool diagonal_on_traced = true;
            for (int f = 0; f < nf; ++f)
                if (!kept[f] && ri[f] != ci[f]) {
                    diagonal_on_traced = false;
                    break;
                }
            if (!diagonal_on_traced) continue;
            int R = 0, C = 0, of = 0;
            for (int f = 0; f < nf; ++f)
                if (kept[f]) {
                    R += ri[f] * out_strides[of];
                    C += ci[f] * out_strides[of];
                    ++of;
                }
            out(R, C) += m(r, c);
        }
    }
    return out;
}

/// Embed an operator acting on the selected factors (0-based, strictly
/// increasing) into the full space described by `full_dims`, tensoring
/// identity onto every other factor. `op.dims()` must match the selected
/// factor dimensions in order.
inline ComplexMatrix embed(const ComplexMatrix& op, const std::vector<int>& full_dims,
                           const std::vector<int>& factors) {
    const int nf = static_cast<int>(full_dims.size());
    std::vector<bool> sel(nf, false);
    std::vector<int> sel_dims;
    for (size_t i = 0; i < factors.size(); ++i) {
        int f = factors[i];
        if (f < 0 || f >= nf) throw dimension_error("embed: factor index out of range");
        if (i > 0 && f <= factors[i - 1]) throw dimension_error("embed: factors must be strictly increasing");
        sel[f] = true;
        sel_dims.push_back(full_dims[f]);
    }
    if (op.dims() != sel_dims && ComplexMatrix::product(op.dims()) != ComplexMatrix::product(sel_dims))
        throw dimension_error("embed: operator dims do not match selected factors");

    ComplexMatrix out(full_dims);
    const auto strides = detail::strides_of(full_dims);
    const auto sel_strides = detail::strides_of(sel_dims);
    std::vector<int> ri(nf), ci(nf);
    for (int r = 0; r < out.side(); ++r) {
        detail::decompose(r, full_dims, strides, ri);
        for (int c = 0; c < out.side(); ++c) {
            detail::decompose(c, full_dims, strides, ci);
            bool identity_elsewhere = true;
            for (int f = 0; f < nf; ++f)
                if (!sel[f] && ri[f] != ci[f]) {
                    identity_elsewhere = false;
                    break;
                }
            if (!identity_elsewhere) continue;
            int R = 0, C = 0, of = 0;
            for (int f = 0; f < nf; ++f)
                if (sel[f]) {
                    R += ri[f] * sel_strides[of];
                    C += ci[f] * sel_strides[of];
                    ++of;
                }
            out(r, c) = op(R, C);
        }
    }
    return out;
}

/// Contract selected factors of `m` against a ket: returns
/// (1 ⊗ <ket| ⊗ 1) m (1 ⊗ |ket> ⊗ 1) on the remaining factors.
/// `ket` is given in the computational basis of the selected factors.
inline ComplexMatrix project_out(const ComplexMatrix& m, const std::vector<int>& factors,
                                 const std::vector<Complex>& ket) {
    const auto& dims = m.dims();
    const int nf = m.factor_count();
    std::vector<bool> sel(nf, false);
    std::vector<int> sel_dims;
    for (size_t i = 0; i < factors.size(); ++i) {
        int f = factors[i];
        if (f < 0 || f >= nf) throw dimension_error("project_out: factor index out of range");
        if (i > 0 && f <= factors[i - 1]) throw dimension_error("project_out: factors must be strictly increasing");
        sel[f] = true;
        sel_dims.push_back(dims[f]);
    }
    const int sel_side = ComplexMatrix::product(sel_dims);
    if (static_cast<int>(ket.size()) != sel_side) throw dimension_error("project_out: ket length mismatch");

    std::vector<int> out_dims;
    for (int f = 0; f < nf; ++f)
        if (!sel[f]) out_dims.push_back(dims[f]);
    if (out_dims.empty()) out_dims.push_back(1);

    ComplexMatrix out(out_dims);
    const auto strides = detail::strides_of(dims);
    const auto sel_strides = detail::strides_of(sel_dims);
    const auto out_strides = detail::strides_of(out_dims);
    std::vector<int> ri(nf), ci(nf);
    for (int r = 0; r < m.side(); ++r) {
        detail::decompose(r, dims, strides, ri);
        int R = 0, rsel = 0;
        {
            int of = 0, sf = 0;
            for (int f = 0; f < nf; ++f)
                if (sel[f]) rsel += ri[f] * sel_strides[sf++];
                else R += ri[f] * out_strides[of++];
        }
        const Complex bra = std::conj(ket[rsel]);
        if (bra == Complex(0, 0)) continue;
        for (int c = 0; c < m.side(); ++c) {
            detail::decompose(c, dims, strides, ci);
            int C = 0, csel = 0;
            {
                int of = 0, sf = 0;
                for (int f = 0; f < nf; ++f)
                    if (sel[f]) csel += ci[f] * sel_strides[sf++];
                    else C += ci[f] * out_strides[of++];
            }
            out(R, C) += bra * m(r, c) * ket[csel];
        }
    }
    return out;
}

}  // namespace ctc
