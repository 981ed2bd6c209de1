#pragma once

#include <array>
#include <vector>

#include "ptwalk/evolution.hpp"
#include "ptwalk/series.hpp"

namespace ptwalk::measures {

using evolution::CoinState;
using evolution::Formalism;
using evolution::FullState;
using numerics::CMat;
using numerics::cdouble;
using walk::KGrid;
using walk::WalkParams;

/// Superoperator of the coin-state map in row-major vectorization: column
/// (i, j) is vec of the image of |i><j|, order (1,1), (1,2), (2,1), (2,2).
struct MapMatrix {
    CMat matrix{4};
    int from_t = 0;
    int to_t = 0;
    Formalism formalism = Formalism::Normalised;
    bool pseudo_inverted = false;
};

/// Choi matrix (id (x) Lambda)(|Phi><Phi|) with the normalized maximally
/// entangled |Phi>; first factor input, second output. Trace 1 for trace
/// preserving maps (the x2 unnormalized convention is a display scaling).
struct ChoiMatrix {
    CMat matrix{4};
    int from_t = 0;
    int to_t = 0;
};

/// Row-major vec of a 2x2 (rows stacked) and its inverse.
std::array<cdouble, 4> vec2(const CMat& m);
CMat devec2(const std::array<cdouble, 4>& v);

/// Half trace norm of the difference. Normalised/Raw states use the
/// Hermitian eigenvalues of rho - sigma; Metric states use the plain
/// eigenvalues of the non-Hermitian difference (the generalised trace norm
/// reduces to the half-sum of their absolute values).
/// Throws FormalismMismatchError when the formalisms differ.
double trace_distance(const CoinState& rho, const CoinState& sigma);

/// Generalized trace distance of full lattice states: half-sum of the
/// absolute eigenvalues of rho.matrix - sigma.matrix.
double generalized_trace_distance(const FullState& rho, const FullState& sigma);

/// Discrete BLP accumulation: N(t) = N(t-1) + max(D(t) - D(t-1), 0), N(0) = 0.
MeasureSeries blp_series(const WalkParams& p, const CoinState& rho0, const CoinState& sigma0,
                         int T, const KGrid& grid, Formalism formalism);

/// Matrix of the dynamical map taking the reduced state at step 0 to step t.
/// For the metric formalism this is the map between metric states, so
/// L(0,0) = I and the vec-trace functional is a fixed left vector.
MapMatrix map_matrix(const WalkParams& p, int t, const KGrid& grid, Formalism formalism);

/// L(t+1, t) = L(t+1, 0) L(t, 0)^-1, falling back to the pseudo-inverse at
/// rtol when the inversion is singular (pseudo_inverted flag set).
MapMatrix intermediate_map(const MapMatrix& l_next, const MapMatrix& l_curr, double rtol);

/// Choi matrix of the map.
ChoiMatrix choi_of_map(const MapMatrix& l);

/// Partial trace of a 4x4 over the second (output) factor.
CMat partial_trace_out(const CMat& choi);

/// Per-step record of the RHP chain.
struct RhpPoint {
    int t = 0;                 // step, Choi of the map t-1 -> t
    double g = 0.0;            // ||C||_1 - 1, raw (may be tiny negative)
    double cumulative = 0.0;   // sum of g up to t
    double choi_trace2 = 0.0;  // 2 tr(C), the unnormalized-convention trace
    bool pseudo_inverted = false;
};

std::vector<RhpPoint> rhp_chain(const WalkParams& p, int T, const KGrid& grid,
                                Formalism formalism, double rtol = 1e-10);

/// Cumulative RHP measure I_RHP(t) = sum_{k<=t} g(k); pinv fallbacks carry
/// the kPinvUsed status bit. g is recoverable as the series increments.
MeasureSeries rhp_series(const WalkParams& p, int T, const KGrid& grid, Formalism formalism,
                         double rtol = 1e-10);

/// Re tr(state^2); the imaginary part is checked against rounding noise.
double purity(const CoinState& state);
double purity(const FullState& state);

/// EE = -sum |lambda_i| ln |lambda_i| over the eigenvalues of the coin
/// state, 0 ln 0 = 0, natural log.
double entanglement_entropy(const CoinState& rho);

/// EE(t) series for the metric evolution; points with an eigenvalue
/// magnitude beyond 1 + 1e-8 carry the kBeyondEp status bit.
MeasureSeries entanglement_series(const WalkParams& p, const CoinState& rho0, int T,
                                  const KGrid& grid);

/// tr(state(t)^2) of the full metric lattice evolution.
MeasureSeries purity_series(const WalkParams& p, const FullState& rho0, int T);

} // namespace ptwalk::measures
