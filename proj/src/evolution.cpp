#include "ptwalk/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace ptwalk::evolution {

namespace {

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

cdouble cpow_int(cdouble z, int t) {
    cdouble result{1.0, 0.0};
    cdouble base = z;
    int e = t;
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

// Compensated (Kahan) accumulator for 2x2 complex matrices; the k-sum is a
// deterministic ordered fold.
struct KahanMat {
    CMat sum{2};
    CMat comp{2};

    void add(const CMat& m) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const cdouble y = m(i, j) - comp(i, j);
                const cdouble t = sum(i, j) + y;
                comp(i, j) = (t - sum(i, j)) - y;
                sum(i, j) = t;
            }
    }
};

struct KahanScalar {
    cdouble sum{0.0, 0.0};
    cdouble comp{0.0, 0.0};

    void add(cdouble x) {
        const cdouble y = x - comp;
        const cdouble t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

void require_density(const CMat& m, const char* who) {
    if (m.dim() != 2) throw Error(std::string(who) + ": coin state must be 2x2");
    const double scale = std::max(1.0, m.frobenius_norm());
    if ((m - m.adjoint()).frobenius_norm() > 1e-9 * scale)
        throw Error(std::string(who) + ": initial state not Hermitian");
    if (std::abs(m.trace() - cdouble{1.0, 0.0}) > 1e-9)
        throw Error(std::string(who) + ": initial state trace must be 1");
    const auto h = numerics::eig_hermitian(m);
    if (h.values.back() < -1e-9)
        throw Error(std::string(who) + ": initial state not positive semi-definite");
}

void require_step(int t, const char* who) {
    if (t < 0) throw Error(std::string(who) + ": t must be nonnegative");
}

} // namespace

CoinState coin_up() {
    return {CMat(2, {1.0, 0.0, 0.0, 0.0}), Formalism::Raw};
}

CoinState coin_plus() {
    return {CMat(2, {0.5, 0.5, 0.5, 0.5}), Formalism::Raw};
}

CoinState make_density(const CMat& m) {
    require_density(m, "make_density");
    return {m, Formalism::Raw};
}

KBlock spectral_block(const WalkParams& p, double k) {
    const walk::KEigenSystem sys = walk::eigensystem(p, k);
    KBlock b;
    b.k = k;
    b.lambda = {sys.lambda_plus, sys.lambda_minus};
    b.phi = sys.vectors;
    try {
        b.phi_inv = numerics::inv(sys.vectors);
    } catch (const SingularError&) {
        throw SingularMetricError("spectral_block: eigenvector matrix singular at k = " +
                                  std::to_string(k));
    }
    b.g0 = (b.phi_inv.adjoint() * b.phi_inv).hermitized();
    return b;
}

std::vector<KBlock> spectral_blocks(const WalkParams& p, const KGrid& grid) {
    std::vector<KBlock> blocks;
    blocks.reserve(grid.n);
    for (double k : grid.points) blocks.push_back(spectral_block(p, k));
    return blocks;
}

CoinMetric coin_metric(const WalkParams& p, double k, int t) {
    require_step(t, "coin_metric");
    const KBlock b = spectral_block(p, k);
    const double w0 = std::pow(std::abs(b.lambda[0]), 2.0 * t);
    const double w1 = std::pow(std::abs(b.lambda[1]), 2.0 * t);
    if (!(w0 > 0.0) || !(w1 > 0.0) || !std::isfinite(w0) || !std::isfinite(w1))
        throw SingularMetricError("coin_metric: eigenvalue weights degenerate at k = " +
                                  std::to_string(k));
    // G(t) = phi^-† diag(1/w) phi^-1
    CMat d(2);
    d(0, 0) = 1.0 / w0;
    d(1, 1) = 1.0 / w1;
    CoinMetric g;
    g.k = k;
    g.t = t;
    g.matrix = (b.phi_inv.adjoint() * d * b.phi_inv).hermitized();
    return g;
}

CoinState evolve_normalised(const WalkParams& p, const CoinState& rho0, int t,
                            const KGrid& grid) {
    require_step(t, "evolve_normalised");
    require_density(rho0.matrix, "evolve_normalised");

    KahanMat acc;
    for (double k : grid.points) {
        const CMat wt = mat_pow(walk::coin_walk_operator(p, k), t);
        acc.add(wt * rho0.matrix * wt.adjoint());
    }
    CMat m = acc.sum * cdouble{1.0 / grid.n, 0.0};
    m = m.hermitized();
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw ComputeError("evolve_normalised: nonpositive trace");
    m *= cdouble{1.0 / tr, 0.0};
    return {m, Formalism::Normalised};
}

namespace {

// Evolved momentum component of the metric formalism in the one-step
// eigenbasis: rho_k(t) = phi B phi^-1 with B_ij = C_ij (lambda_i/lambda_j)^t
// and C = phi^-1 rho0 phi^-†. The diagonal of B carries the (constant)
// trace, so the unrescaled trace is read off before assembling the state.
struct MetricTerm {
    CMat state{2};
    cdouble trace{0.0, 0.0};
};

MetricTerm metric_term(const KBlock& b, const CMat& rho0, int t) {
    const CMat c = b.phi_inv * rho0 * b.phi_inv.adjoint();
    CMat bt(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            bt(i, j) = c(i, j) * cpow_int(b.lambda[i] / b.lambda[j], t);
    MetricTerm out;
    out.trace = bt(0, 0) + bt(1, 1);
    out.state = b.phi * bt * b.phi_inv;
    return out;
}

} // namespace

MetricSum metric_sum(const std::vector<KBlock>& blocks, const CMat& rho0, int t) {
    require_step(t, "metric_sum");
    KahanMat acc;
    KahanScalar tau;
    for (const KBlock& b : blocks) {
        const MetricTerm term = metric_term(b, rho0, t);
        acc.add(term.state);
        tau.add(term.trace);
    }
    const double n = static_cast<double>(blocks.size());
    MetricSum out;
    out.state = acc.sum * cdouble{1.0 / n, 0.0};
    out.trace = tau.sum.real() / n;
    return out;
}

CoinState evolve_metric(const WalkParams& p, const CoinState& rho0, int t, const KGrid& grid) {
    require_step(t, "evolve_metric");
    require_density(rho0.matrix, "evolve_metric");

    const auto blocks = spectral_blocks(p, grid);
    const MetricSum sum = metric_sum(blocks, rho0.matrix, t);
    if (!(std::abs(sum.trace) > 0.0))
        throw ComputeError("evolve_metric: vanishing unrescaled trace");
    CMat m = sum.state * cdouble{1.0 / sum.trace, 0.0};
    return {m, Formalism::Metric};
}

measures::MeasureSeries trace_series(const WalkParams& p, const CoinState& rho0, int T,
                                     const KGrid& grid, Formalism formalism) {
    require_step(T, "trace_series");
    require_density(rho0.matrix, "trace_series");

    measures::MeasureSeries out;
    if (formalism == Formalism::Normalised) {
        out.label = "trace_normalised";
        for (int t = 0; t <= T; ++t) out.push(t, 1.0);
        return out;
    }

    std::vector<KahanScalar> acc(T + 1);
    if (formalism == Formalism::Raw) {
        out.label = "trace_raw";
        for (double k : grid.points) {
            const CMat w = walk::coin_walk_operator(p, k);
            CMat wt = CMat::identity(2);
            for (int t = 0; t <= T; ++t) {
                if (t > 0) wt = w * wt;
                const CMat m = wt * rho0.matrix;
                cdouble tr{0.0, 0.0};
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) tr += m(i, j) * std::conj(wt(i, j));
                acc[t].add(tr);
            }
        }
    } else {
        out.label = "trace_metric";
        const auto blocks = spectral_blocks(p, grid);
        for (const KBlock& b : blocks) {
            const CMat c = b.phi_inv * rho0.matrix * b.phi_inv.adjoint();
            const cdouble r0 = b.lambda[0] / b.lambda[0];
            const cdouble r1 = b.lambda[1] / b.lambda[1];
            cdouble p0{1.0, 0.0}, p1{1.0, 0.0};
            for (int t = 0; t <= T; ++t) {
                if (t > 0) {
                    p0 *= r0;
                    p1 *= r1;
                }
                acc[t].add(c(0, 0) * p0 + c(1, 1) * p1);
            }
        }
    }
    for (int t = 0; t <= T; ++t) out.push(t, acc[t].sum.real() / grid.n);
    return out;
}

// ---------------------------------------------------------------------------
// Position-space lattice oracle (general-N path, Eigen-backed).
// ---------------------------------------------------------------------------

KGrid lattice_grid(int sites) {
    return KGrid::uniform(sites, sites % 2 != 0);
}

FullState make_full_origin(int sites, const CMat& coin) {
    if (sites < 2) throw Error("make_full_origin: need at least 2 sites");
    require_density(coin, "make_full_origin");
    FullState f;
    f.sites = sites;
    f.matrix = Eigen::MatrixXcd::Zero(2 * sites, 2 * sites);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) f.matrix(i, j) = coin(i, j);
    f.formalism = Formalism::Raw;
    return f;
}

Eigen::MatrixXcd build_walk_matrix(const WalkParams& p, int sites) {
    const int n = 2 * sites;
    auto lift_coin = [&](const CMat& c) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (int x = 0; x < sites; ++x)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) m(2 * x + i, 2 * x + j) = c(i, j);
        return m;
    };
    Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(n, n);
    for (int x = 0; x < sites; ++x) {
        shift(2 * ((x + 1) % sites) + 0, 2 * x + 0) = 1.0;
        shift(2 * ((x - 1 + sites) % sites) + 1, 2 * x + 1) = 1.0;
    }
    return shift * lift_coin(walk::gain_loss(-p.gamma)) * lift_coin(walk::coin_operator(p.theta2)) *
           shift * lift_coin(walk::gain_loss(p.gamma)) * lift_coin(walk::coin_operator(p.theta1));
}

namespace {

Eigen::MatrixXcd eigen_mat_pow(const Eigen::MatrixXcd& m, int t) {
    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    Eigen::MatrixXcd base = m;
    int e = t;
    while (e > 0) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

// Metric of the full operator, built from its eigendecomposition. The +-k
// momentum blocks give exactly degenerate eigenvalue pairs whose raw
// unit-norm eigenvectors are basis-ambiguous; orthonormalizing inside each
// degenerate cluster restores the well-defined subspace projector.
Eigen::MatrixXcd full_metric(const Eigen::MatrixXcd& w, int t) {
    const int n = static_cast<int>(w.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(w);
    if (solver.info() != Eigen::Success)
        throw ComputeError("full_metric: eigensolver failed");
    Eigen::MatrixXcd v = solver.eigenvectors();
    const Eigen::VectorXcd vals = solver.eigenvalues();

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    const double condition = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!(condition < 1e10))
        throw NonDiagonalizableError(
            "full_metric: full walk operator eigenvector condition " + std::to_string(condition) +
                " exceeds 1e10 (near an exceptional point)",
            condition);

    // Conjugate eigenvalue families share real parts, so sorted-adjacency
    // grouping interleaves them; collect each cluster around a seed instead.
    const double ctol = 1e-8 * vals.cwiseAbs().maxCoeff();
    std::vector<char> assigned(n, 0);
    Eigen::MatrixXcd minv = Eigen::MatrixXcd::Zero(n, n);
    for (int seed = 0; seed < n; ++seed) {
        if (assigned[seed]) continue;
        std::vector<int> members;
        for (int j = 0; j < n; ++j)
            if (!assigned[j] && std::abs(vals(j) - vals(seed)) < ctol) {
                members.push_back(j);
                assigned[j] = 1;
            }
        // Modified Gram-Schmidt over the cluster columns.
        std::vector<Eigen::VectorXcd> basis;
        for (int m : members) {
            Eigen::VectorXcd u = v.col(m);
            for (const auto& b : basis) u -= b.dot(u) * b;
            const double norm = u.norm();
            if (norm < 1e-8)
                throw ComputeError("full_metric: degenerate cluster not of full rank");
            basis.push_back(u / norm);
        }
        const double weight = std::pow(std::abs(vals(seed)), 2.0 * t);
        for (const auto& b : basis) minv += weight * (b * b.adjoint());
    }
    return minv.partialPivLu().inverse();
}

} // namespace

FullState evolve_full(const WalkParams& p, const FullState& rho0, int t, Formalism formalism) {
    require_step(t, "evolve_full");
    if (rho0.sites < 2 || rho0.matrix.rows() != 2 * rho0.sites)
        throw Error("evolve_full: malformed full state");

    const Eigen::MatrixXcd w = build_walk_matrix(p, rho0.sites);
    const Eigen::MatrixXcd wt = eigen_mat_pow(w, t);
    Eigen::MatrixXcd m = wt * rho0.matrix * wt.adjoint();

    FullState out;
    out.sites = rho0.sites;
    out.formalism = formalism;
    switch (formalism) {
        case Formalism::Raw:
            out.matrix = std::move(m);
            return out;
        case Formalism::Normalised: {
            const double tr = m.trace().real();
            if (!(tr > 0.0)) throw ComputeError("evolve_full: nonpositive trace");
            out.matrix = m / tr;
            return out;
        }
        case Formalism::Metric: {
            m = m * full_metric(w, t);
            const double tr = m.trace().real();
            if (!(std::abs(tr) > 0.0)) throw ComputeError("evolve_full: vanishing metric trace");
            out.matrix = m / tr;
            return out;
        }
    }
    throw Error("evolve_full: unknown formalism");
}

CoinState position_oracle(const WalkParams& p, const FullState& rho0, int t,
                          Formalism formalism) {
    const FullState evolved = evolve_full(p, rho0, t, formalism);
    CMat coin(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cdouble s{0.0, 0.0};
            for (int x = 0; x < evolved.sites; ++x) s += evolved.matrix(2 * x + i, 2 * x + j);
            coin(i, j) = s;
        }
    if (formalism == Formalism::Normalised || formalism == Formalism::Metric) {
        const double tr = coin.trace().real();
        if (!(std::abs(tr) > 0.0)) throw ComputeError("position_oracle: vanishing trace");
        coin *= cdouble{1.0 / tr, 0.0};
        if (formalism == Formalism::Normalised) coin = coin.hermitized();
    }
    return {coin, formalism};
}

} // namespace ptwalk::evolution
