#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "ptwalk/series.hpp"
#include "ptwalk/walk.hpp"

namespace ptwalk::evolution {

using numerics::CMat;
using numerics::cdouble;
using walk::KGrid;
using walk::WalkParams;

enum class Formalism { Raw, Normalised, Metric };

/// Reduced 2x2 coin state. Raw and Normalised states are ordinary density
/// matrices (the Raw trace drifts under evolution); Metric states carry the
/// pseudo-Hermitian correction and are generally not Hermitian.
struct CoinState {
    CMat matrix{2};
    Formalism formalism = Formalism::Raw;
};

/// |up><up|
CoinState coin_up();
/// |up + down><up + down| / 2
CoinState coin_plus();
/// Validates Hermitian, PSD and unit trace (1e-9) before wrapping.
CoinState make_density(const CMat& m);

/// Momentum-resolved coin-space metric G_c(k, t).
struct CoinMetric {
    double k = 0.0;
    int t = 0;
    CMat matrix{2};
};

/// Per-momentum spectral data of the one-step walk operator: eigenvalues,
/// eigenvector matrix and its inverse, and the t = 0 metric
/// g0 = (phi phi†)^-1 = phi^-† phi^-1.
struct KBlock {
    double k = 0.0;
    std::array<cdouble, 2> lambda;
    CMat phi{2};
    CMat phi_inv{2};
    CMat g0{2};
};

/// Builds the spectral block of every grid momentum (ascending k).
/// Throws ExceptionalPointError if any grid point sits on a(k) = 1.
std::vector<KBlock> spectral_blocks(const WalkParams& p, const KGrid& grid);

/// Single-momentum block.
KBlock spectral_block(const WalkParams& p, double k);

/// G_c(k, t) = (sum_i |lambda_i|^(2t) phi_i phi_i†)^-1, built from one-step
/// eigendata with unit-norm eigenvectors. Identity at gamma = 0. Satisfies
/// G(k, t+1) = W^-† G(k, t) W^-1.
CoinMetric coin_metric(const WalkParams& p, double k, int t);

/// Unrescaled metric sum (1/N) sum_k W^t rho0 W†^t G_c(k, t) and its trace,
/// from prebuilt spectral blocks.
struct MetricSum {
    CMat state{2};
    double trace = 0.0;
};
MetricSum metric_sum(const std::vector<KBlock>& blocks, const CMat& rho0, int t);

/// Trace-normalisation method: (1/N) sum_k W^t rho0 W†^t, then divided by
/// its trace. Output Hermitian, PSD, unit trace.
CoinState evolve_normalised(const WalkParams& p, const CoinState& rho0, int t, const KGrid& grid);

/// Metric formalism: (1/N) sum_k W^t rho0 W†^t G_c(k, t), rescaled by the
/// time-independent trace. Computed per momentum in the one-step eigenbasis;
/// forming the triple product directly loses eps * |lambda_+|^(2t) absolute
/// accuracy above the exceptional point.
CoinState evolve_metric(const WalkParams& p, const CoinState& rho0, int t, const KGrid& grid);

/// Unrescaled trace of the evolved reduced state at the momenta of `grid`,
/// one value per step 0..T. Raw reports the drifting trace of the plain
/// evolution, Metric the time-invariant trace of the metric sum, Normalised
/// is identically 1.
measures::MeasureSeries trace_series(const WalkParams& p, const CoinState& rho0, int T,
                                     const KGrid& grid, Formalism formalism);

/// Full coin+position state on a periodic lattice, dimension 2 * sites,
/// site-major ordering.
struct FullState {
    int sites = 0;
    Eigen::MatrixXcd matrix;
    Formalism formalism = Formalism::Raw;
};

/// Origin-localized product state |0><0| (x) coin.
FullState make_full_origin(int sites, const CMat& coin);

/// Dense position-space walk operator on the periodic lattice.
Eigen::MatrixXcd build_walk_matrix(const WalkParams& p, int sites);

/// Evolves the full state t steps. Normalised divides by the trace; Metric
/// applies G(t) from the full-operator eigendecomposition and rescales.
/// Metric branch throws NonDiagonalizableError when the eigenvector
/// condition of the full operator exceeds 1e10.
FullState evolve_full(const WalkParams& p, const FullState& rho0, int t, Formalism formalism);

/// Reduced 2x2 coin state of the lattice evolution (partial trace over
/// position). Matches evolve_normalised exactly when the momentum grid
/// equals the lattice momenta, and evolve_metric to oracle accuracy.
CoinState position_oracle(const WalkParams& p, const FullState& rho0, int t, Formalism formalism);

/// The momentum grid whose points coincide with the lattice momenta of an
/// N-site ring: unshifted for even N, half-step shifted for odd N.
KGrid lattice_grid(int sites);

} // namespace ptwalk::evolution
