"""Brute-force and dense-algebra certificates for desk-scale instances.

These routines exist to check the main pipeline against ground truth that
is computed by exhaustive enumeration or dense linear algebra: the seeded
discrete optimum (a local Cheeger-style constant), the relaxation bound
between the continuous objective and that optimum, the rounding guarantee,
and first-order optimality residuals of the continuous solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import (
    Community,
    GraphError,
    SignedGraph,
    as_node_set,
    community,
    rayleigh_quotient,
    seed_vector,
)
from .spectral import smallest_eigenpair, solve_seeded
from .sweep import fast_sweep

BRUTE_FORCE_NODE_LIMIT = 16
_CHUNK = 1 << 16  # labelings per vectorized block; bounds peak memory


class OracleError(ValueError):
    """Instance too large, or no feasible labeling exists."""


@dataclass(frozen=True)
class CheegerCertificate:
    """Exhaustive minimum of the ratio over seed-containing communities.

    ``argmin`` attains ``h_value`` among all band pairs that contain the
    seeds and whose volume is at most k times the seed volume;
    ``feasible_count`` is the number of labelings meeting those constraints.
    """

    h_value: float
    argmin: Community
    feasible_count: int
    k: float
    seeds: tuple[frozenset, frozenset]


@dataclass(frozen=True)
class KktReport:
    """First-order optimality residuals of a continuous solution.

    ``stationarity_residual`` fits the best scalar multiple of D s to
    (L - alpha D) x in least squares, which sidesteps the exact scaling
    convention of the multiplier; ``multiplier`` is that fitted scalar.
    """

    primal_norm_residual: float
    correlation_slack: float
    stationarity_residual: float
    complementary_slackness: float
    multiplier: float


@dataclass(frozen=True)
class RelaxationReport:
    lambda_value: float
    h_value: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class ApproximationReport:
    beta_out: float
    sweep_bound: float
    cheeger_bound: float
    h_value: float
    lambda_value: float
    ok: bool


def dense_operators(g: SignedGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense (A, D, L) for small instances; independent of the sparse paths."""
    a = g.adjacency.toarray()
    d = np.diag(g.degrees)
    return a, d, d - a


def _enumerate_min(g, s1, s2, k):
    """Vectorized scan over all {band1, band2, neither} labelings."""
    n = g.node_count
    deg = g.degrees
    seeds = sorted(s1 | s2)
    free = np.array([i for i in range(n) if i not in (s1 | s2)], dtype=np.int64)
    nfree = len(free)
    vol_seed = float(deg[seeds].sum())
    budget = k * vol_seed * (1.0 + 1e-12)

    base = np.zeros(n, dtype=np.int8)
    base[sorted(s1)] = 1
    base[sorted(s2)] = -1

    eu, ev, w = g.edge_u, g.edge_v, g.edge_w
    aw = np.abs(w)
    pos = w > 0

    best_beta = np.inf
    best_sigma = None
    feasible = 0
    total = 3**nfree
    digits = 3 ** np.arange(nfree, dtype=np.int64) if nfree else None
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        codes = np.arange(start, stop, dtype=np.int64)
        sigma = np.tile(base, (len(codes), 1))
        if nfree:
            trits = (codes[:, None] // digits[None, :]) % 3
            sigma[:, free] = (trits - 1).astype(np.int8)
        nz = sigma != 0
        vol = nz @ deg
        feas = vol <= budget
        feasible += int(feas.sum())
        if not feas.any():
            continue
        sig = sigma[feas]
        volf = vol[feas]
        su = sig[:, eu].astype(np.int16)
        sv = sig[:, ev].astype(np.int16)
        prod = su * sv
        num = 2.0 * ((prod == -1) & pos) @ w
        num += ((prod == 1) & ~pos) @ aw
        num += ((su != 0) != (sv != 0)) @ aw
        betas = num / volf
        i = int(np.argmin(betas))
        if betas[i] < best_beta:
            best_beta = float(betas[i])
            best_sigma = sig[i].copy()
    return best_beta, best_sigma, feasible


def brute_force_cheeger(g: SignedGraph, s1, s2, k: float) -> CheegerCertificate:
    """Exact seeded optimum by enumerating every 3-way node labeling.

    Requires n <= 16. Both seed-to-band assignments are tried and the better
    kept (they are symmetric, so this is a consistency belt). One seed side
    may be empty; the union must not be.
    """
    if g.node_count > BRUTE_FORCE_NODE_LIMIT:
        raise OracleError(
            f"brute force limited to n <= {BRUTE_FORCE_NODE_LIMIT}, got {g.node_count}"
        )
    s1 = as_node_set(g, s1)
    s2 = as_node_set(g, s2)
    if s1 & s2:
        raise GraphError("seed sets overlap")
    if not (s1 | s2):
        raise GraphError("both seed sets are empty")

    b1, sig1, n1 = _enumerate_min(g, s1, s2, k)
    b2, sig2, n2 = _enumerate_min(g, s2, s1, k)
    if sig2 is not None:
        sig2 = -sig2  # swap bands back so seeds land in their own sides
    if sig1 is None and sig2 is None:
        raise OracleError(f"no feasible labeling for k={k}")
    if sig2 is None or (sig1 is not None and b1 <= b2):
        best_beta, best_sigma, feasible = b1, sig1, n1
    else:
        best_beta, best_sigma, feasible = b2, sig2, n2

    argmin = community(
        g, np.flatnonzero(best_sigma == 1), np.flatnonzero(best_sigma == -1)
    )
    return CheegerCertificate(
        h_value=argmin.beta,
        argmin=argmin,
        feasible_count=feasible,
        k=float(k),
        seeds=(s1, s2),
    )


def grid_search_minimum(
    g: SignedGraph,
    s1,
    s2,
    kappa: float,
    num_points: int = 10_000,
    feasibility_slack: float = 0.0,
) -> tuple[float, float]:
    """Dense sweep of the one-parameter solution family.

    Solves (L - alpha D) x = D s on a dense alpha grid over
    [-vol(G), lambda1), keeps candidates whose normalized correlation
    reaches kappa (minus ``feasibility_slack``), and returns
    (best objective, its alpha). The bottom eigenvector is always included
    as the alpha -> lambda1 endpoint.
    """
    a, dmat, lmat = dense_operators(g)
    deg = g.degrees
    s = seed_vector(g, s1, s2)
    ds = deg * s.values
    eig = smallest_eigenpair(g)
    lam1 = eig.lambda1
    vol = g.total_volume

    alphas = np.linspace(-vol, lam1 - max(1e-9, 1e-9 * vol), num_points)
    shifted = lmat[None, :, :] - alphas[:, None, None] * dmat[None, :, :]
    rhs = np.broadcast_to(ds[:, None], (num_points, len(ds), 1))
    xs = np.linalg.solve(shifted, rhs)[:, :, 0]
    norms = np.sqrt(np.einsum("ij,j,ij->i", xs, deg, xs))
    xs = xs / norms[:, None]
    corr = np.abs(xs @ ds)
    objs = np.einsum("ij,jk,ik->i", xs, lmat, xs)

    v1 = eig.v1
    corr = np.append(corr, abs(float(v1 @ ds)))
    objs = np.append(objs, lam1)
    alphas = np.append(alphas, lam1)

    ok = corr >= kappa - feasibility_slack
    if not ok.any():
        raise OracleError(f"no grid candidate reaches correlation {kappa}")
    best = int(np.argmin(np.where(ok, objs, np.inf)))
    return float(objs[best]), float(alphas[best])


def kkt_check(
    g: SignedGraph,
    x: np.ndarray,
    s,
    alpha: float,
    kappa: float,
) -> KktReport:
    """First-order residuals of a candidate continuous solution (pure report)."""
    x = np.asarray(x, dtype=np.float64)
    sv = s.values if hasattr(s, "values") else np.asarray(s, dtype=np.float64)
    deg = g.degrees
    ds = deg * sv
    primal = abs(float(x @ (deg * x)) - 1.0)
    slack = float(x @ ds) - kappa
    _, _, lmat = dense_operators(g)
    r = lmat @ x - alpha * (deg * x)
    mult = float(r @ ds) / float(ds @ ds)
    stationarity = float(np.linalg.norm(r - mult * ds))
    return KktReport(
        primal_norm_residual=primal,
        correlation_slack=slack,
        stationarity_residual=stationarity,
        complementary_slackness=abs(slack * mult),
        multiplier=mult,
    )


def verify_relaxation(
    g: SignedGraph,
    s1,
    s2,
    k: float,
    eps: float = 1e-6,
    solver_eps: float = 1e-6,
    cg_tol: float = 1e-10,
) -> RelaxationReport:
    """Check that the continuous optimum is at most four times the seeded
    discrete optimum, at correlation kappa = sqrt(1/k). Requires k > 1 so
    that kappa < 1."""
    if k <= 1:
        raise OracleError("relaxation check requires k > 1")
    cert = brute_force_cheeger(g, s1, s2, k)
    s = seed_vector(g, s1, s2)
    sol = solve_seeded(g, s, kappa=float(np.sqrt(1.0 / k)), eps=solver_eps, cg_tol=cg_tol)
    bound = 4.0 * cert.h_value + eps
    return RelaxationReport(
        lambda_value=sol.objective,
        h_value=cert.h_value,
        bound=bound,
        ok=sol.objective <= bound,
    )


def verify_approximation(
    g: SignedGraph,
    s1,
    s2,
    k: float,
    eps: float = 1e-6,
    solver_eps: float = 1e-6,
    cg_tol: float = 1e-10,
) -> ApproximationReport:
    """Run the full solve-then-round pipeline and check both guarantees:
    the rounded ratio is at most sqrt(2 * continuous objective) and at most
    sqrt(8 * discrete optimum), up to eps."""
    if k <= 1:
        raise OracleError("approximation check requires k > 1")
    cert = brute_force_cheeger(g, s1, s2, k)
    s = seed_vector(g, s1, s2)
    sol = solve_seeded(g, s, kappa=float(np.sqrt(1.0 / k)), eps=solver_eps, cg_tol=cg_tol)
    rounded = fast_sweep(g, sol.x)
    rq = rayleigh_quotient(g, sol.x)
    sweep_bound = float(np.sqrt(2.0 * rq))
    cheeger_bound = float(np.sqrt(8.0 * cert.h_value))
    ok = (rounded.beta <= sweep_bound + eps) and (rounded.beta <= cheeger_bound + eps)
    return ApproximationReport(
        beta_out=rounded.beta,
        sweep_bound=sweep_bound,
        cheeger_bound=cheeger_bound,
        h_value=cert.h_value,
        lambda_value=sol.objective,
        ok=ok,
    )
