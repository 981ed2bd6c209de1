#include "ptwalk/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ptwalk::numerics {

namespace {

// Unitary 2x2 rotation diagonalizing the Hermitian pencil
//   [[app, apq], [conj(apq), aqq]]   (app, aqq real).
// Returns J with J† M J diagonal. Columns of [gp gq] are updated as
// [gp gq] <- [gp gq] J in the one-sided sweeps.
struct Rotation {
    cdouble j11, j12, j21, j22;
};

Rotation make_rotation(double app, double aqq, cdouble apq) {
    const double absb = std::abs(apq);
    if (absb == 0.0) return {1.0, 0.0, 0.0, 1.0};
    const cdouble phase = apq / absb;
    const double tau = (aqq - app) / (2.0 * absb);
    const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    // J = diag(1, conj(phase)) * [[c, s], [-s, c]]
    return {c, s, -s * std::conj(phase), c * std::conj(phase)};
}

void sort_desc_with_vectors(std::vector<double>& w, CMat& v) {
    const int n = v.dim();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
    std::vector<double> w2(n);
    CMat v2(n);
    for (int j = 0; j < n; ++j) {
        w2[j] = w[idx[j]];
        for (int i = 0; i < n; ++i) v2(i, j) = v(i, idx[j]);
    }
    w = std::move(w2);
    v = v2;
}

// Fix eigenvector phase: largest-modulus component made real positive.
void canonicalize_column(CMat& v, int col) {
    const int n = v.dim();
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double m = std::abs(v(i, col));
        if (m > best * (1.0 + 1e-12)) {
            best = m;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    const cdouble ph = v(imax, col) / best;
    for (int i = 0; i < n; ++i) v(i, col) /= ph;
}

void normalize_column(CMat& v, int col) {
    const int n = v.dim();
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(v(i, col));
    s = std::sqrt(s);
    if (s > 0.0)
        for (int i = 0; i < n; ++i) v(i, col) /= s;
}

// Eigenvalue ordering: modulus descending with a relative tie tolerance,
// then real descending, then imaginary descending. The tolerance matters:
// conjugate pairs land a few ulps apart in modulus and must still order by
// the tie-break rule.
bool eig_less(const cdouble& a, const cdouble& b, double scale) {
    const double ma = std::abs(a), mb = std::abs(b);
    const double tol = 1e-12 * std::max({ma, mb, scale});
    if (std::abs(ma - mb) > tol) return ma > mb;
    if (std::abs(a.real() - b.real()) > tol) return a.real() > b.real();
    return a.imag() > b.imag();
}

void sort_eigenvalues(std::vector<cdouble>& vals, double scale) {
    std::stable_sort(vals.begin(), vals.end(),
                     [scale](const cdouble& a, const cdouble& b) { return eig_less(a, b, scale); });
}

// Residual-minimal eigenvector of a 2x2 for a given eigenvalue, from the
// rows of (A - lambda I). Row choice picks the larger candidate so the
// cancellation identity keeps the residual at rounding level even for
// ill-conditioned eigenbases.
void eigvec_2x2(const CMat& a, cdouble lambda, CMat& v, int col) {
    const cdouble v1a = a(0, 1), v2a = lambda - a(0, 0);
    const cdouble v1b = lambda - a(1, 1), v2b = a(1, 0);
    const double na = std::sqrt(std::norm(v1a) + std::norm(v2a));
    const double nb = std::sqrt(std::norm(v1b) + std::norm(v2b));
    if (na == 0.0 && nb == 0.0) {
        // Scalar matrix: pick coordinate axes.
        v(0, col) = (col == 0) ? 1.0 : 0.0;
        v(1, col) = (col == 0) ? 0.0 : 1.0;
        return;
    }
    if (na >= nb) {
        v(0, col) = v1a;
        v(1, col) = v2a;
    } else {
        v(0, col) = v1b;
        v(1, col) = v2b;
    }
    normalize_column(v, col);
}

EigenDecomp eig2(const CMat& a) {
    EigenDecomp d;
    d.vectors = CMat(2);

    if (a(0, 1) == cdouble{0.0, 0.0} && a(1, 0) == cdouble{0.0, 0.0}) {
        std::vector<cdouble> vals{a(0, 0), a(1, 1)};
        sort_eigenvalues(vals, a.frobenius_norm());
        d.values = vals;
        if (vals[0] == a(0, 0) && !(vals[0] == vals[1])) {
            d.vectors = CMat::identity(2);
        } else if (!(vals[0] == vals[1])) {
            d.vectors(0, 1) = 1.0;
            d.vectors(1, 0) = 1.0;
        } else {
            d.vectors = CMat::identity(2);
        }
        d.condition = 1.0;
        return d;
    }

    const cdouble tr = a(0, 0) + a(1, 1);
    const cdouble det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    cdouble s = std::sqrt(tr * tr - 4.0 * det);
    // Pick the sign avoiding cancellation in tr + s.
    if ((std::conj(tr) * s).real() < 0.0) s = -s;
    const cdouble l1 = 0.5 * (tr + s);
    const cdouble l2 = (std::abs(l1) > 0.0) ? det / l1 : 0.5 * (tr - s);

    std::vector<cdouble> vals{l1, l2};
    sort_eigenvalues(vals, a.frobenius_norm());
    d.values = vals;
    eigvec_2x2(a, vals[0], d.vectors, 0);
    eigvec_2x2(a, vals[1], d.vectors, 1);
    return d;
}

// Coefficients of det(lambda I - A) = lambda^n + b[n-1] lambda^(n-1) + ... + b[0]
// by Faddeev-LeVerrier.
std::vector<cdouble> char_poly(const CMat& a) {
    const int n = a.dim();
    std::vector<cdouble> b(n);
    CMat m = a;
    cdouble c = m.trace();
    b[n - 1] = -c;
    for (int k = 2; k <= n; ++k) {
        // m <- a * (m + b[n-k+1] I)
        CMat tmp = m;
        for (int i = 0; i < n; ++i) tmp(i, i) += b[n - k + 1];
        m = a * tmp;
        c = m.trace() / static_cast<double>(k);
        b[n - k] = -c;
    }
    return b;
}

cdouble poly_eval(const std::vector<cdouble>& b, cdouble z) {
    // Monic polynomial z^n + b[n-1] z^(n-1) + ... + b[0].
    cdouble p{1.0, 0.0};
    for (int i = static_cast<int>(b.size()) - 1; i >= 0; --i) p = p * z + b[i];
    return p;
}

std::vector<cdouble> durand_kerner(const std::vector<cdouble>& b) {
    const int n = static_cast<int>(b.size());
    std::vector<cdouble> z(n);
    const cdouble seed{0.4, 0.9};
    cdouble p = seed;
    for (int i = 0; i < n; ++i) {
        z[i] = p;
        p *= seed;
    }
    for (int iter = 0; iter < 200; ++iter) {
        double shift = 0.0;
        for (int i = 0; i < n; ++i) {
            cdouble denom{1.0, 0.0};
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= (z[i] - z[j]);
            if (denom == cdouble{0.0, 0.0}) {
                z[i] += cdouble{1e-8, 1e-8};
                continue;
            }
            const cdouble dz = poly_eval(b, z[i]) / denom;
            z[i] -= dz;
            shift = std::max(shift, std::abs(dz));
        }
        if (shift < 1e-15) break;
    }
    // Newton polish where the derivative is healthy.
    std::vector<cdouble> db(n - 1);
    for (int i = 1; i < n; ++i) db[i - 1] = b[i] * static_cast<double>(i);
    auto dpoly = [&](cdouble zz) {
        cdouble p2 = static_cast<double>(n);
        for (int i = n - 2; i >= 0; --i) p2 = p2 * zz + db[i];
        return p2;
    };
    for (int i = 0; i < n; ++i) {
        for (int it = 0; it < 3; ++it) {
            const cdouble dp = dpoly(z[i]);
            if (std::abs(dp) < 1e-8) break;
            z[i] -= poly_eval(b, z[i]) / dp;
        }
    }
    return z;
}

EigenDecomp eig4(const CMat& a) {
    EigenDecomp d;
    const double scale = std::max(a.frobenius_norm() / 2.0, 1e-300);
    CMat as = a;
    as *= cdouble{1.0 / scale, 0.0};

    auto roots = durand_kerner(char_poly(as));
    sort_eigenvalues(roots, as.frobenius_norm());

    // Group roots into clusters and take null vectors per multiplicity so
    // semisimple repeated eigenvalues get independent vectors.
    d.vectors = CMat(4);
    const double ctol = 1e-8 * std::max(1.0, as.frobenius_norm());
    int i = 0;
    while (i < 4) {
        int j = i + 1;
        while (j < 4 && std::abs(roots[j] - roots[i]) < ctol) ++j;
        const int mult = j - i;
        cdouble mean{0.0, 0.0};
        for (int m = i; m < j; ++m) mean += roots[m];
        mean /= static_cast<double>(mult);
        CMat shifted = as;
        for (int r = 0; r < 4; ++r) shifted(r, r) -= mean;
        const Svd sv = svd(shifted);
        for (int m = 0; m < mult; ++m) {
            // Smallest singular vectors span the null space. A defective
            // cluster has fewer null directions than roots; duplicating the
            // most-null vector then drives the condition estimate over the
            // NonDiagonalizable threshold, which is the contract.
            int col = 3 - m;
            if (sv.sigma[col] > 1e-6 * std::max(1.0, as.frobenius_norm())) col = 3;
            for (int r = 0; r < 4; ++r) d.vectors(r, i + m) = sv.v(r, col);
        }
        i = j;
    }

    // Rayleigh refinement: lambda <- v†Av / v†v minimizes ||Av - lambda v||
    // for the computed vector and repairs the linear convergence of
    // Durand-Kerner on multiple roots.
    d.values.resize(4);
    for (int m = 0; m < 4; ++m) {
        cdouble num{0.0, 0.0};
        double den = 0.0;
        for (int r = 0; r < 4; ++r) {
            cdouble av{0.0, 0.0};
            for (int c2 = 0; c2 < 4; ++c2) av += as(r, c2) * d.vectors(c2, m);
            num += std::conj(d.vectors(r, m)) * av;
            den += std::norm(d.vectors(r, m));
        }
        d.values[m] = (den > 0.0 ? num / den : roots[m]) * scale;
    }
    return d;
}

} // namespace

Svd svd(const CMat& a) {
    const int n = a.dim();
    CMat g = a;
    CMat v = CMat::identity(n);

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double hpp = 0.0, hqq = 0.0;
                cdouble hpq{0.0, 0.0};
                for (int r = 0; r < n; ++r) {
                    hpp += std::norm(g(r, p));
                    hqq += std::norm(g(r, q));
                    hpq += std::conj(g(r, p)) * g(r, q);
                }
                if (std::abs(hpq) <= 1e-16 * std::sqrt(hpp * hqq) + 1e-300) continue;
                converged = false;
                const Rotation rot = make_rotation(hpp, hqq, hpq);
                for (int r = 0; r < n; ++r) {
                    const cdouble gp = g(r, p), gq = g(r, q);
                    g(r, p) = gp * rot.j11 + gq * rot.j21;
                    g(r, q) = gp * rot.j12 + gq * rot.j22;
                    const cdouble vp = v(r, p), vq = v(r, q);
                    v(r, p) = vp * rot.j11 + vq * rot.j21;
                    v(r, q) = vp * rot.j12 + vq * rot.j22;
                }
            }
        }
        if (converged) break;
    }

    Svd out;
    out.sigma.resize(n);
    out.u = CMat(n);
    out.v = v;
    std::vector<double> norms(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += std::norm(g(r, j));
        norms[j] = std::sqrt(s);
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return norms[x] > norms[y]; });

    CMat vs(n);
    for (int j = 0; j < n; ++j) {
        const int src = idx[j];
        out.sigma[j] = norms[src];
        for (int r = 0; r < n; ++r) vs(r, j) = v(r, src);
        if (norms[src] > 1e-300) {
            for (int r = 0; r < n; ++r) out.u(r, j) = g(r, src) / norms[src];
        }
    }
    out.v = vs;

    // Complete U to an orthonormal basis where columns vanished.
    for (int j = 0; j < n; ++j) {
        if (out.sigma[j] > 1e-300) continue;
        for (int cand = 0; cand < n; ++cand) {
            CMat trial = out.u;
            for (int r = 0; r < n; ++r) trial(r, j) = (r == cand) ? 1.0 : 0.0;
            for (int prev = 0; prev < n; ++prev) {
                if (prev == j || (out.sigma[prev] <= 1e-300 && prev > j)) continue;
                cdouble ip{0.0, 0.0};
                for (int r = 0; r < n; ++r) ip += std::conj(trial(r, prev)) * trial(r, j);
                for (int r = 0; r < n; ++r) trial(r, j) -= ip * trial(r, prev);
            }
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += std::norm(trial(r, j));
            if (s > 1e-4) {
                for (int r = 0; r < n; ++r) out.u(r, j) = trial(r, j) / std::sqrt(s);
                break;
            }
        }
    }
    return out;
}

double cond(const CMat& a) {
    const Svd s = svd(a);
    const double smax = s.sigma.front();
    const double smin = s.sigma.back();
    if (smin <= smax * 1e-300 || smin == 0.0) return std::numeric_limits<double>::infinity();
    return smax / smin;
}

EigenDecomp eig(const CMat& a) {
    a.check_finite();
    EigenDecomp d = (a.dim() == 2) ? eig2(a) : eig4(a);
    for (int j = 0; j < a.dim(); ++j) {
        normalize_column(d.vectors, j);
        canonicalize_column(d.vectors, j);
    }
    d.condition = cond(d.vectors);
    if (!(d.condition <= 1e12))
        throw NonDiagonalizableError("eig: eigenvector condition " + std::to_string(d.condition) +
                                         " exceeds 1e12 (near an exceptional point)",
                                     d.condition);
    return d;
}

CMat inv(const CMat& a) {
    a.check_finite();
    const Svd s = svd(a);
    if (s.sigma.back() < 1e-12 * s.sigma.front() || s.sigma.front() == 0.0)
        throw SingularError("inv: singular to working precision (sigma_min/sigma_max below 1e-12)");

    const int n = a.dim();
    CMat work = a;
    CMat r = CMat::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(work(col, col));
        for (int row = col + 1; row < n; ++row) {
            const double m = std::abs(work(row, col));
            if (m > best) {
                best = m;
                piv = row;
            }
        }
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(work(col, j), work(piv, j));
                std::swap(r(col, j), r(piv, j));
            }
        }
        const cdouble d = work(col, col);
        for (int j = 0; j < n; ++j) {
            work(col, j) /= d;
            r(col, j) /= d;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            const cdouble f = work(row, col);
            if (f == cdouble{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) {
                work(row, j) -= f * work(col, j);
                r(row, j) -= f * r(col, j);
            }
        }
    }
    return r;
}

CMat pinv(const CMat& a, double rtol) {
    a.check_finite();
    if (!(rtol > 0.0)) throw Error("pinv: rtol must be positive");
    const Svd s = svd(a);
    const int n = a.dim();
    const double cut = rtol * s.sigma.front();
    CMat r(n);
    for (int k = 0; k < n; ++k) {
        if (s.sigma[k] <= cut || s.sigma[k] == 0.0) continue;
        const double w = 1.0 / s.sigma[k];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r(i, j) += w * s.v(i, k) * std::conj(s.u(j, k));
    }
    return r;
}

HermEigen eig_hermitian(const CMat& a) {
    a.check_finite();
    const int n = a.dim();
    CMat m = a.hermitized();
    CMat v = CMat::identity(n);
    const double scale = std::max(m.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(m(p, q));
        if (std::sqrt(off) <= 1e-15 * scale) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(m(p, q)) <= 1e-18 * scale) continue;
                const Rotation rot = make_rotation(m(p, p).real(), m(q, q).real(), m(p, q));
                // m <- J† m J applied on rows/cols p,q
                for (int r = 0; r < n; ++r) {
                    const cdouble mp = m(r, p), mq = m(r, q);
                    m(r, p) = mp * rot.j11 + mq * rot.j21;
                    m(r, q) = mp * rot.j12 + mq * rot.j22;
                }
                for (int c = 0; c < n; ++c) {
                    const cdouble mp = m(p, c), mq = m(q, c);
                    m(p, c) = std::conj(rot.j11) * mp + std::conj(rot.j21) * mq;
                    m(q, c) = std::conj(rot.j12) * mp + std::conj(rot.j22) * mq;
                }
                for (int r = 0; r < n; ++r) {
                    const cdouble vp = v(r, p), vq = v(r, q);
                    v(r, p) = vp * rot.j11 + vq * rot.j21;
                    v(r, q) = vp * rot.j12 + vq * rot.j22;
                }
            }
        }
    }

    HermEigen h;
    h.values.resize(n);
    for (int i = 0; i < n; ++i) h.values[i] = m(i, i).real();
    h.vectors = v;
    sort_desc_with_vectors(h.values, h.vectors);
    return h;
}

CMat sqrtm_psd(const CMat& a) {
    a.check_finite();
    const HermEigen h = eig_hermitian(a);
    const double scale = std::max(a.frobenius_norm(), 0.0);
    for (double w : h.values)
        if (w < -1e-8 * std::max(scale, 1e-300))
            throw NotPsdError("sqrtm_psd: eigenvalue " + std::to_string(w) +
                              " below -1e-8 * ||A||");
    const int n = a.dim();
    CMat r(n);
    for (int k = 0; k < n; ++k) {
        const double w = std::sqrt(std::max(h.values[k], 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r(i, j) += w * h.vectors(i, k) * std::conj(h.vectors(j, k));
    }
    return r.hermitized();
}

double trace_norm(const CMat& a) {
    a.check_finite();
    const Svd s = svd(a);
    double t = 0.0;
    for (double x : s.sigma) t += x;
    return t;
}

} // namespace ptwalk::numerics
