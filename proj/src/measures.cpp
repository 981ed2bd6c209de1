#include "ptwalk/measures.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace ptwalk::measures {

namespace {

// Compensated accumulator, any CMat dimension.
struct KahanCMat {
    CMat sum;
    CMat comp;
    explicit KahanCMat(int dim) : sum(dim), comp(dim) {}

    void add(const CMat& m) {
        const int n = sum.dim();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const cdouble y = m(i, j) - comp(i, j);
                const cdouble t = sum(i, j) + y;
                comp(i, j) = (t - sum(i, j)) - y;
                sum(i, j) = t;
            }
    }
};

CMat mat_pow(const CMat& m, int t) {
    CMat result = CMat::identity(m.dim());
    CMat base = m;
    int e = t;
    while (e > 0) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

// Inverse of a 2x2 through the adjugate; the walk operators have unit
// determinant so this is cancellation-free.
CMat inv2(const CMat& m) {
    const cdouble det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (std::abs(det) == 0.0) throw SingularError("inv2: zero determinant");
    CMat r(2);
    r(0, 0) = m(1, 1) / det;
    r(0, 1) = -m(0, 1) / det;
    r(1, 0) = -m(1, 0) / det;
    r(1, 1) = m(0, 0) / det;
    return r;
}

double half_abs_eig_sum_hermitian(const CMat& delta) {
    const auto h = numerics::eig_hermitian(delta);
    double s = 0.0;
    for (double w : h.values) s += std::abs(w);
    return 0.5 * s;
}

double half_abs_eig_sum_plain(const CMat& delta) {
    const auto d = numerics::eig(delta);
    double s = 0.0;
    for (const cdouble& v : d.values) s += std::abs(v);
    return 0.5 * s;
}

// Shared machinery of map_matrix / rhp_chain: the raw vectorized map
// L_raw(t) summed over momenta. Normalised: W^t (x) conj(W^t).
// Metric: W^t (x) (G0 W^-t)^T, using W†^t G(t) = G0 W^-t so no exploding
// intermediate is ever formed.
struct MapChainData {
    std::vector<CMat> w;       // one-step operators
    std::vector<CMat> w_inv;   // their inverses (metric only)
    std::vector<CMat> g0;      // t = 0 metrics (metric only)
    int n = 0;
    Formalism formalism = Formalism::Normalised;
};

MapChainData build_chain_data(const WalkParams& p, const KGrid& grid, Formalism formalism) {
    if (formalism == Formalism::Raw)
        throw Error("map_matrix: formalism must be Normalised or Metric");
    MapChainData d;
    d.n = grid.n;
    d.formalism = formalism;
    d.w.reserve(grid.n);
    if (formalism == Formalism::Metric) {
        const auto blocks = evolution::spectral_blocks(p, grid);
        for (const auto& b : blocks) {
            d.w.push_back(walk::coin_walk_operator(p, b.k));
            d.w_inv.push_back(inv2(d.w.back()));
            d.g0.push_back(b.g0);
        }
    } else {
        for (double k : grid.points) d.w.push_back(walk::coin_walk_operator(p, k));
    }
    return d;
}

CMat raw_map(const MapChainData& d, int t) {
    KahanCMat acc(4);
    for (int i = 0; i < d.n; ++i) {
        const CMat wt = mat_pow(d.w[i], t);
        if (d.formalism == Formalism::Metric) {
            const CMat b = d.g0[i] * mat_pow(d.w_inv[i], t);
            acc.add(numerics::kron2(wt, b.transpose()));
        } else {
            acc.add(numerics::kron2(wt, wt.conjugate()));
        }
    }
    return acc.sum * cdouble{1.0 / d.n, 0.0};
}

MapMatrix assemble_map(const MapChainData& d, int t, const CMat* raw0_inv) {
    MapMatrix m;
    m.from_t = 0;
    m.to_t = t;
    m.formalism = d.formalism;
    const CMat raw = raw_map(d, t);
    m.matrix = (d.formalism == Formalism::Metric && raw0_inv) ? raw * (*raw0_inv) : raw;
    return m;
}

} // namespace

std::array<cdouble, 4> vec2(const CMat& m) {
    if (m.dim() != 2) throw Error("vec2: expects a 2x2");
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

CMat devec2(const std::array<cdouble, 4>& v) {
    return CMat(2, {v[0], v[1], v[2], v[3]});
}

double trace_distance(const CoinState& rho, const CoinState& sigma) {
    if (rho.formalism != sigma.formalism)
        throw FormalismMismatchError("trace_distance: states from different formalisms");
    const CMat delta = rho.matrix - sigma.matrix;
    if (rho.formalism == Formalism::Metric) return half_abs_eig_sum_plain(delta);
    return half_abs_eig_sum_hermitian(delta);
}

double generalized_trace_distance(const FullState& rho, const FullState& sigma) {
    if (rho.formalism != sigma.formalism || rho.sites != sigma.sites)
        throw FormalismMismatchError("generalized_trace_distance: incompatible states");
    const Eigen::MatrixXcd delta = rho.matrix - sigma.matrix;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(delta, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw ComputeError("generalized_trace_distance: eigensolver failed");
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

MeasureSeries blp_series(const WalkParams& p, const CoinState& rho0, const CoinState& sigma0,
                         int T, const KGrid& grid, Formalism formalism) {
    if (T < 0) throw Error("blp_series: T must be nonnegative");
    if ((rho0.matrix - sigma0.matrix).frobenius_norm() == 0.0)
        throw Error("blp_series: initial states must differ");

    MeasureSeries out;
    out.label = "blp";

    // The per-momentum data is t-independent; build it once for the series.
    std::vector<evolution::KBlock> blocks;
    std::vector<CMat> ws;
    if (formalism == Formalism::Metric) {
        blocks = evolution::spectral_blocks(p, grid);
    } else {
        ws.reserve(grid.n);
        for (double k : grid.points) ws.push_back(walk::coin_walk_operator(p, k));
    }

    auto evolve = [&](const CoinState& s, int t) -> CoinState {
        if (formalism == Formalism::Metric) {
            const auto sum = evolution::metric_sum(blocks, s.matrix, t);
            return {sum.state * cdouble{1.0 / sum.trace, 0.0}, Formalism::Metric};
        }
        KahanCMat acc(2);
        for (const CMat& w : ws) {
            const CMat wt = mat_pow(w, t);
            acc.add(wt * s.matrix * wt.adjoint());
        }
        CMat m = acc.sum.hermitized();
        return {m * cdouble{1.0 / m.trace().real(), 0.0}, Formalism::Normalised};
    };

    double n = 0.0;
    double d_prev = 0.0;
    for (int t = 0; t <= T; ++t) {
        const double d = trace_distance(evolve(rho0, t), evolve(sigma0, t));
        if (t > 0 && d > d_prev) n += d - d_prev;
        d_prev = d;
        out.push(t, n);
    }
    return out;
}

MapMatrix map_matrix(const WalkParams& p, int t, const KGrid& grid, Formalism formalism) {
    if (t < 0) throw Error("map_matrix: t must be nonnegative");
    const MapChainData d = build_chain_data(p, grid, formalism);
    if (formalism == Formalism::Metric) {
        const CMat raw0_inv = numerics::inv(raw_map(d, 0));
        return assemble_map(d, t, &raw0_inv);
    }
    return assemble_map(d, t, nullptr);
}

MapMatrix intermediate_map(const MapMatrix& l_next, const MapMatrix& l_curr, double rtol) {
    if (l_next.from_t != l_curr.from_t || l_next.to_t < l_curr.to_t)
        throw Error("intermediate_map: maps are not a consistent chain");
    if (l_next.formalism != l_curr.formalism)
        throw FormalismMismatchError("intermediate_map: maps from different formalisms");

    MapMatrix m;
    m.from_t = l_curr.to_t;
    m.to_t = l_next.to_t;
    m.formalism = l_next.formalism;
    try {
        m.matrix = l_next.matrix * numerics::inv(l_curr.matrix);
    } catch (const SingularError&) {
        m.matrix = l_next.matrix * numerics::pinv(l_curr.matrix, rtol);
        m.pseudo_inverted = true;
    }
    return m;
}

ChoiMatrix choi_of_map(const MapMatrix& l) {
    // (id (x) Lambda)(|Phi><Phi|) computed in the vectorized picture: swap
    // the middle index pair, apply I4 (x) L, swap back.
    std::array<cdouble, 16> v{};
    // vec of |Phi><Phi| = (1/2) sum_ab E_ab (x) E_ab.
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const int r = 2 * a + a;
            const int c = 2 * b + b;
            v[4 * r + c] = 0.5;
        }

    auto swap23 = [](const std::array<cdouble, 16>& x) {
        std::array<cdouble, 16> y{};
        for (int n = 0; n < 16; ++n) {
            const int b3 = (n >> 3) & 1, b2 = (n >> 2) & 1, b1 = (n >> 1) & 1, b0 = n & 1;
            y[(b3 << 3) | (b1 << 2) | (b2 << 1) | b0] = x[n];
        }
        return y;
    };

    std::array<cdouble, 16> x = swap23(v);
    std::array<cdouble, 16> y{};
    for (int alpha = 0; alpha < 4; ++alpha)
        for (int beta = 0; beta < 4; ++beta) {
            cdouble s{0.0, 0.0};
            for (int gamma = 0; gamma < 4; ++gamma)
                s += l.matrix(beta, gamma) * x[4 * alpha + gamma];
            y[4 * alpha + beta] = s;
        }
    const std::array<cdouble, 16> u = swap23(y);

    ChoiMatrix c;
    c.from_t = l.from_t;
    c.to_t = l.to_t;
    c.matrix = CMat(4);
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) c.matrix(r, col) = u[4 * r + col];
    return c;
}

CMat partial_trace_out(const CMat& choi) {
    if (choi.dim() != 4) throw Error("partial_trace_out: expects a 4x4");
    CMat r(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cdouble s{0.0, 0.0};
            for (int m = 0; m < 2; ++m) s += choi(2 * i + m, 2 * j + m);
            r(i, j) = s;
        }
    return r;
}

std::vector<RhpPoint> rhp_chain(const WalkParams& p, int T, const KGrid& grid,
                                Formalism formalism, double rtol) {
    if (T < 1) throw Error("rhp_chain: T must be at least 1");
    const MapChainData d = build_chain_data(p, grid, formalism);
    CMat raw0_inv(4);
    const bool metric = (formalism == Formalism::Metric);
    if (metric) raw0_inv = numerics::inv(raw_map(d, 0));

    std::vector<RhpPoint> points;
    points.reserve(T);
    double cumulative = 0.0;
    MapMatrix prev = assemble_map(d, 0, metric ? &raw0_inv : nullptr);
    for (int t = 1; t <= T; ++t) {
        const MapMatrix curr = assemble_map(d, t, metric ? &raw0_inv : nullptr);
        const MapMatrix inter = intermediate_map(curr, prev, rtol);
        const ChoiMatrix choi = choi_of_map(inter);
        RhpPoint pt;
        pt.t = t;
        pt.g = numerics::trace_norm(choi.matrix) - 1.0;
        cumulative += pt.g;
        pt.cumulative = cumulative;
        pt.choi_trace2 = 2.0 * choi.matrix.trace().real();
        pt.pseudo_inverted = inter.pseudo_inverted;
        points.push_back(pt);
        prev = curr;
    }
    return points;
}

MeasureSeries rhp_series(const WalkParams& p, int T, const KGrid& grid, Formalism formalism,
                         double rtol) {
    MeasureSeries out;
    out.label = "rhp";
    for (const RhpPoint& pt : rhp_chain(p, T, grid, formalism, rtol))
        out.push(pt.t, pt.cumulative, pt.pseudo_inverted ? kPinvUsed : kOk);
    return out;
}

namespace {

double checked_purity(cdouble tr2, const char* who) {
    if (std::abs(tr2.imag()) > 1e-10 * std::max(1.0, std::abs(tr2)))
        throw ComputeError(std::string(who) + ": tr(rho^2) has a non-real part beyond rounding");
    return tr2.real();
}

} // namespace

double purity(const CoinState& state) {
    return checked_purity((state.matrix * state.matrix).trace(), "purity");
}

double purity(const FullState& state) {
    return checked_purity((state.matrix * state.matrix).trace(), "purity");
}

double entanglement_entropy(const CoinState& rho) {
    const auto d = numerics::eig(rho.matrix);
    double ee = 0.0;
    for (const cdouble& v : d.values) {
        const double m = std::abs(v);
        if (m > 0.0) ee -= m * std::log(m);
    }
    return ee;
}

MeasureSeries entanglement_series(const WalkParams& p, const CoinState& rho0, int T,
                                  const KGrid& grid) {
    if (T < 0) throw Error("entanglement_series: T must be nonnegative");
    MeasureSeries out;
    out.label = "entanglement_entropy";
    const auto blocks = evolution::spectral_blocks(p, grid);
    for (int t = 0; t <= T; ++t) {
        const auto sum = evolution::metric_sum(blocks, rho0.matrix, t);
        const CoinState s{sum.state * cdouble{1.0 / sum.trace, 0.0}, Formalism::Metric};
        const auto d = numerics::eig(s.matrix);
        std::uint8_t status = kOk;
        double ee = 0.0;
        for (const cdouble& v : d.values) {
            const double m = std::abs(v);
            if (m > 1.0 + 1e-8) status |= kBeyondEp;
            if (m > 0.0) ee -= m * std::log(m);
        }
        out.push(t, ee, status);
    }
    return out;
}

MeasureSeries purity_series(const WalkParams& p, const FullState& rho0, int T) {
    if (T < 0) throw Error("purity_series: T must be nonnegative");
    MeasureSeries out;
    out.label = "purity";
    for (int t = 0; t <= T; ++t) {
        const FullState s = evolution::evolve_full(p, rho0, t, Formalism::Metric);
        out.push(t, purity(s));
    }
    return out;
}

} // namespace ptwalk::measures
