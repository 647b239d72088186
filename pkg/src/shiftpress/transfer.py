"""Block-graph transfer operators, Perron data, and Markov equilibria.

The transfer model at block length n has one state per admissible n-word
and an edge u -> v whenever u and v overlap in n-1 symbols and the joined
(n+1)-word is admissible. Edge weights are e^phi evaluated at the first
fully visible site of the joined word, so a path of length l multiplies
weights over l consecutive sites. For a subshift of finite type whose
forbidden words fit inside the blocks, ln(Perron eigenvalue) is the
pressure of the weighted shift; for longer-range constraints the model is
the finite-type approximation and overestimates.

Perron data comes from plain power iteration with uniform start and
infinity-norm normalization; the iteration is deterministic, so repeated
runs give bitwise-identical eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .errors import (
    ConvergenceError,
    IdentityCheckError,
    InputError,
    ReducibleGraphError,
)
from .potentials import LocallyConstantPotential, Potential, ZeroPotential
from .subshifts import (
    DEFAULT_NODE_BUDGET,
    Exactness,
    SubshiftSpec,
    enumerate_language,
    word_admissible,
)
from .words import Word


@dataclass
class TransferModel:
    spec: SubshiftSpec
    pot: Potential
    n_state: int
    states: tuple[Word, ...]
    index: dict[Word, int]
    matrix: sparse.csr_matrix  # weights e^phi(edge)
    log_weights: sparse.csr_matrix  # phi(edge), same sparsity

    @property
    def state_count(self) -> int:
        return len(self.states)


def _edge_site(pot: Potential) -> int:
    if isinstance(pot, ZeroPotential):
        return 0
    if isinstance(pot, LocallyConstantPotential):
        return pot.radius
    raise InputError(
        "transfer models need a locally constant (or zero) potential; "
        "use pressure brackets for run-based potentials"
    )


def build_transfer(
    spec: SubshiftSpec,
    pot: Potential,
    n_state: int,
    budget: int = DEFAULT_NODE_BUDGET,
) -> TransferModel:
    """Assemble the weighted block graph at block length n_state.

    Requires an exact-language oracle and n_state >= 2r+1 so every edge
    weight is a determined value, and a strongly connected graph.
    """
    if spec.exactness is not Exactness.EXACT_LANGUAGE:
        raise InputError("transfer models need an exact language oracle")
    r = _edge_site(pot)
    if n_state < 2 * r + 1:
        raise InputError(
            f"n_state={n_state} too small for potential radius {r}; need >= {2 * r + 1}"
        )
    states = tuple(enumerate_language(spec, n_state, budget))
    if not states:
        raise InputError("no admissible states at this block length")
    index = {u: i for i, u in enumerate(states)}
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    logs: list[float] = []
    for i, u in enumerate(states):
        for s in range(spec.alphabet_size):
            joined = u + (s,)
            if not word_admissible(spec, joined):
                continue
            v = joined[1:]
            j = index.get(v)
            if j is None:
                # possible only for non-SFT exact oracles where the block
                # graph is an approximation anyway
                continue
            iv = pot.eval(joined, r)
            if iv.width != 0.0:
                raise InputError("edge weight not determined by the joined block")
            rows.append(i)
            cols.append(j)
            vals.append(math.exp(iv.lo))
            logs.append(iv.lo)
    n = len(states)
    matrix = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    log_weights = sparse.csr_matrix((logs, (rows, cols)), shape=(n, n))
    ncomp, _labels = connected_components(matrix, directed=True, connection="strong")
    if ncomp != 1:
        raise ReducibleGraphError(
            f"block graph at n_state={n_state} has {ncomp} strongly connected "
            "components; Perron data is not well defined"
        )
    return TransferModel(
        spec=spec,
        pot=pot,
        n_state=n_state,
        states=states,
        index=index,
        matrix=matrix,
        log_weights=log_weights,
    )


@dataclass
class PerronData:
    lam: float
    right: np.ndarray
    left: np.ndarray  # normalized so that <left, right> = 1
    residual: float
    iterations: int


def _power_iterate(mat: sparse.csr_matrix, tol: float, max_iter: int):
    n = mat.shape[0]
    v = np.ones(n)
    lam = 1.0
    for it in range(1, max_iter + 1):
        w = mat @ v
        lam = float(w.max())
        if lam <= 0.0:
            raise ConvergenceError("iterate collapsed to zero", 0.0, it)
        residual = float(np.abs(w - lam * v).max())
        v = w / lam
        if residual <= tol * lam:
            return lam, v, residual, it
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} steps "
        f"(residual {residual:.3e})",
        residual,
        max_iter,
    )


def perron(
    model: TransferModel,
    tol: float = 1e-12,
    max_iter: int = 200_000,
) -> PerronData:
    """Dominant eigenvalue and eigenvectors by power iteration."""
    if tol <= 0:
        raise InputError("tol must be positive")
    lam, right, res_r, it_r = _power_iterate(model.matrix, tol, max_iter)
    lam_l, left, res_l, it_l = _power_iterate(model.matrix.T.tocsr(), tol, max_iter)
    if abs(lam - lam_l) > 10 * tol * max(lam, lam_l):
        raise ConvergenceError(
            f"left/right eigenvalue mismatch: {lam} vs {lam_l}",
            abs(lam - lam_l),
            it_r + it_l,
        )
    scale = float(left @ right)
    left = left / scale
    return PerronData(
        lam=lam,
        right=right,
        left=left,
        residual=max(res_r, res_l),
        iterations=max(it_r, it_l),
    )


@dataclass
class MarkovMeasure:
    """Stationary Markov chain on block states built from Perron data.

    p(u, v) = M[u, v] r(v) / (lam r(u)); pi(u) = l(u) r(u). entropy and
    phi_integral satisfy entropy + phi_integral = ln(lam) up to rounding,
    which is checked at construction.
    """

    model: TransferModel
    lam: float
    pi: np.ndarray
    p: sparse.csr_matrix
    entropy: float
    phi_integral: float
    stationarity_gap: float
    identity_gap: float


def markov_equilibrium(
    model: TransferModel,
    perron_data: PerronData | None = None,
    *,
    identity_tol: float = 1e-8,
    stationarity_tol: float = 1e-10,
) -> MarkovMeasure:
    pd = perron_data if perron_data is not None else perron(model)
    lam = pd.lam
    r = pd.right
    pi = pd.left * pd.right
    pi = pi / pi.sum()
    mat = model.matrix.tocoo()
    data = mat.data * r[mat.col] / (lam * r[mat.row])
    p = sparse.csr_matrix((data, (mat.row, mat.col)), shape=mat.shape)
    row_sums = np.asarray(p.sum(axis=1)).ravel()
    if np.abs(row_sums - 1.0).max() > 1e-9:
        raise IdentityCheckError("transition rows do not sum to 1")
    stat_gap = float(np.abs(pi @ p - pi).sum())
    if stat_gap > stationarity_tol:
        raise IdentityCheckError(f"pi is not stationary: l1 gap {stat_gap:.3e}")
    pc = p.tocoo()
    with np.errstate(divide="ignore"):
        plogp = pc.data * np.log(pc.data)
    entropy = -float(np.sum(pi[pc.row] * plogp))
    lw = model.log_weights.tocoo()
    # identical sparsity pattern and ordering as the weight matrix
    phi_integral = float(np.sum(pi[pc.row] * pc.data * lw.data))
    identity_gap = abs(entropy + phi_integral - math.log(lam))
    if identity_gap > identity_tol:
        raise IdentityCheckError(
            f"entropy {entropy} + integral {phi_integral} != ln lam "
            f"{math.log(lam)} (gap {identity_gap:.3e})"
        )
    return MarkovMeasure(
        model=model,
        lam=lam,
        pi=pi,
        p=p,
        entropy=entropy,
        phi_integral=phi_integral,
        stationarity_gap=stat_gap,
        identity_gap=identity_gap,
    )


def cylinder_measure(mm: MarkovMeasure, word: Word) -> float:
    """Measure of the cylinder fixing `word` at the word's own positions."""
    word = tuple(word)
    model = mm.model
    ns = model.n_state
    if not word:
        return 1.0
    if len(word) <= ns:
        total = 0.0
        for u, i in model.index.items():
            if u[: len(word)] == word:
                total += float(mm.pi[i])
        return total
    start = word[:ns]
    i = model.index.get(start)
    if i is None:
        return 0.0
    prob = float(mm.pi[i])
    for t in range(len(word) - ns):
        u = word[t : t + ns]
        v = word[t + 1 : t + 1 + ns]
        iu = model.index.get(u)
        iv = model.index.get(v)
        if iu is None or iv is None:
            return 0.0
        step = mm.p[iu, iv]
        if step == 0.0:
            return 0.0
        prob *= float(step)
    return prob
