"""Root location, null spaces and the topological / non-topological split."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import InconsistentCounterpart, NotARoot
from .graph_core import incidence_s, incidence_t
from .model import MetricGraph
from .secular import (
    hat,
    is_pole,
    oracle_secular,
    phi_block,
    relative_sigma_min,
    reversal_operator,
    s_hat,
    tau_hat,
    vertex_secular_direct,
)
from .transfer import partial_transfer

NULL_TOL = 1e-8
ANGLE_TOL = 1e-8
# relative sigma_min at a refined minimum below which it counts as a root
ACCEPT_TOL = 1e-6


@dataclass
class ScanResult:
    graph: MetricGraph
    k: np.ndarray
    det_bond: np.ndarray
    det_one_plus_phi_tau: np.ndarray
    det_vertex: np.ndarray  # NaN where is_pole
    is_pole: np.ndarray
    det_oracle: np.ndarray
    sigma_bond: np.ndarray  # relative smallest singular value of I - Phi S_hat
    sigma_oracle: np.ndarray

    def __len__(self):
        return len(self.k)


@dataclass
class EigenvalueRecord:
    k: float
    residual: float = float("nan")
    multiplicity: int = 0
    kind: str = ""
    dim_topological: int = 0
    raw_nullity: int = 0
    oracle_multiplicity: int = 0
    basis: np.ndarray = field(default=None, repr=False)
    topological_basis: np.ndarray = field(default=None, repr=False)
    flags: list[str] = field(default_factory=list)


def _channels(mg: MetricGraph, k: float, shat, that, eye):
    blocks = mg.transfer_matrices(k)
    phi = phi_block(mg, k, blocks)
    bond = eye - phi @ shat
    sv = np.linalg.svd(bond, compute_uv=False)
    det_bond = np.linalg.det(bond)
    det_q = np.linalg.det(eye + phi @ that)
    pole = is_pole(mg, k, blocks=blocks)
    det_v = np.nan if pole else np.linalg.det(vertex_secular_direct(mg, k, blocks=blocks))
    orc = oracle_secular(mg, k)
    return det_bond, det_q, det_v, pole, np.linalg.det(orc), sv[-1] / sv[0], relative_sigma_min(orc)


def scan(mg: MetricGraph, kmin: float, kmax: float, samples: int) -> ScanResult:
    """Evaluate every secular channel on a uniform grid of ``samples`` points."""
    if not 0 < kmin < kmax:
        raise ValueError("need 0 < kmin < kmax")
    if samples < 2:
        raise ValueError("need at least 2 samples")
    ks = np.linspace(kmin, kmax, samples)
    shat, that = s_hat(mg), tau_hat(mg)
    eye = np.eye(4 * mg.m)
    rows = [_channels(mg, float(k), shat, that, eye) for k in ks]
    cols = list(zip(*rows))
    return ScanResult(
        graph=mg,
        k=ks,
        det_bond=np.array(cols[0]),
        det_one_plus_phi_tau=np.array(cols[1]),
        det_vertex=np.array(cols[2], dtype=float),
        is_pole=np.array(cols[3], dtype=bool),
        det_oracle=np.array(cols[4]),
        sigma_bond=np.array(cols[5]),
        sigma_oracle=np.array(cols[6]),
    )


def _bond_sigma(mg, shat, eye):
    def f(k):
        return relative_sigma_min(eye - phi_block(mg, k) @ shat)

    return f


def _bond_det(mg, shat, eye):
    def f(k):
        return np.linalg.det(eye - phi_block(mg, k) @ shat)

    return f


def _oracle_sigma(mg):
    return lambda k: relative_sigma_min(oracle_secular(mg, k))


def _oracle_det(mg):
    return lambda k: np.linalg.det(oracle_secular(mg, k))


def locate_roots(ks, dets, sigmas, det_fn, sigma_fn, refine_tol=1e-9, accept_tol=ACCEPT_TOL):
    """Refine sign changes of ``dets`` and local minima of ``sigmas``.

    Sign changes are bisected with Brent's method; minima, which catch roots
    of even order, are refined by golden-section search on the relative
    smallest singular value.  A candidate is kept when that value is at most
    ``accept_tol``; candidates closer than 10 * refine_tol are merged.
    """
    ks = np.asarray(ks)
    found = []
    for i in range(len(ks) - 1):
        a, b = dets[i], dets[i + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            r = scipy.optimize.brentq(det_fn, ks[i], ks[i + 1], xtol=refine_tol, rtol=1e-15)
            found.append(r)
    for i in range(1, len(ks) - 1):
        if sigmas[i] <= sigmas[i - 1] and sigmas[i] <= sigmas[i + 1]:
            brack = (ks[i - 1], ks[i], ks[i + 1])
            if not (sigmas[i] < sigmas[i - 1] or sigmas[i] < sigmas[i + 1]):
                continue
            r = scipy.optimize.golden(
                sigma_fn, brack=brack, tol=refine_tol / (10.0 * max(1.0, abs(ks[i])))
            )
            found.append(float(r))
    # minima squeezed against the window edges have no interior grid minimum
    if len(ks) > 1 and sigmas[0] < sigmas[1]:
        found.append(_bounded_min(sigma_fn, ks[0], ks[1], refine_tol))
    if len(ks) > 1 and sigmas[-1] < sigmas[-2]:
        found.append(_bounded_min(sigma_fn, ks[-2], ks[-1], refine_tol))
    kept = sorted(r for r in found if sigma_fn(r) <= accept_tol and ks[0] <= r <= ks[-1])
    merged = []
    for r in kept:
        if merged and r - merged[-1][-1] <= 10 * refine_tol:
            merged[-1].append(r)
        else:
            merged.append([r])
    return [min(group, key=sigma_fn) for group in merged]


def _bounded_min(sigma_fn, a, b, tol):
    res = scipy.optimize.minimize_scalar(sigma_fn, bounds=(a, b), method="bounded",
                                         options={"xatol": tol})
    return _polish(sigma_fn, float(res.x), a, b, 1e-12)


def _polish(sigma_fn, x, lo, hi, tol):
    """Golden-section refinement of a bounded-search minimum.

    Bounded Brent only resolves x to about sqrt(eps) * |x|, so the bracket
    is sized to that resolution.
    """
    width = 4.0 * np.sqrt(np.finfo(float).eps) * max(1.0, abs(x))
    left, right = max(lo, x - width), min(hi, x + width)
    fl, fx, fr = sigma_fn(left), sigma_fn(x), sigma_fn(right)
    if left < x < right and fx <= fl and fx <= fr:
        return float(scipy.optimize.golden(sigma_fn, brack=(left, x, right), tol=tol))
    # minimum pressed against a bound the search never evaluates exactly
    return float(min((fx, x), (fl, left), (fr, right))[1])


def find_roots(scan_result: ScanResult, refine_tol: float = 1e-9, channel: str = "bond"):
    """Refined roots of the bond determinant (or the oracle) inside the scan window.

    Returns EigenvalueRecords carrying only k and the residual |det|.
    """
    mg = scan_result.graph
    if refine_tol <= 0:
        raise ValueError("refine_tol must be positive")
    if channel == "bond":
        shat, eye = s_hat(mg), np.eye(4 * mg.m)
        det_fn, sigma_fn = _bond_det(mg, shat, eye), _bond_sigma(mg, shat, eye)
        dets, sigmas = scan_result.det_bond, scan_result.sigma_bond
    elif channel == "oracle":
        det_fn, sigma_fn = _oracle_det(mg), _oracle_sigma(mg)
        dets, sigmas = scan_result.det_oracle, scan_result.sigma_oracle
    else:
        raise ValueError(f"unknown channel {channel!r}")
    roots = locate_roots(scan_result.k, dets, sigmas, det_fn, sigma_fn, refine_tol)
    return [EigenvalueRecord(k=r, residual=abs(det_fn(r))) for r in roots]


def refine_near(sigma_fn, k0: float, half_width: float = 1e-3, tol: float = 1e-12) -> float:
    """Minimum of ``sigma_fn`` near k0.

    A bounded Brent search locates the basin, then golden-section search
    polishes it with a relative tolerance finer than the bounded search allows.
    """
    return _bounded_min(sigma_fn, k0 - half_width, k0 + half_width, tol)


# -- null spaces and classification ---------------------------------------


def null_space(mat: np.ndarray, tol: float = NULL_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of directions with singular value <= tol * sigma_max."""
    mat = np.asarray(mat)
    if not np.any(mat):
        return np.eye(mat.shape[1])
    return scipy.linalg.null_space(mat, rcond=tol)


def intersect(a: np.ndarray, b: np.ndarray, tol: float = ANGLE_TOL) -> np.ndarray:
    """Orthonormal basis of span(a) ∩ span(b) via principal angles.

    Directions with cos(angle) > 1 - tol count as common.
    """
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], 0))
    u, cosines, _ = np.linalg.svd(a.T @ b)
    keep = cosines > 1.0 - tol
    return a @ u[:, : int(np.count_nonzero(keep))]


def physical_part(mg: MetricGraph, k: float, basis: np.ndarray) -> np.ndarray:
    """Sub-basis of ``basis`` fixed by the reversal involution (genuine eigenfunctions).

    R restricted to span(basis) is an involution M, so (I + M) / 2 projects
    onto its +1 part.  The projector is oblique, but its singular values are
    either ~0 or >= 1, which makes the cut at 1/2 unambiguous.
    """
    if basis.shape[1] == 0:
        return basis
    restricted = basis.T @ reversal_operator(mg, k) @ basis
    proj = 0.5 * (np.eye(basis.shape[1]) + restricted)
    u, sv, _ = np.linalg.svd(proj)
    return basis @ u[:, sv > 0.5]


def classify(mg: MetricGraph, k: float, tol: float = NULL_TOL) -> EigenvalueRecord:
    """Multiplicity and topological dimension at a refined root k.

    N1 = null(I - Phi S_hat) restricted to genuine eigenfunctions, N2 =
    null(I + Phi tau_hat); the topological part is N1 ∩ N2.  The raw nullity
    of the bond matrix and the oracle nullity are reported alongside.
    """
    eye = np.eye(4 * mg.m)
    phi = phi_block(mg, k)
    bond = eye - phi @ s_hat(mg)
    raw = null_space(bond, tol)
    if raw.shape[1] == 0:
        raise NotARoot(f"k={k!r} is not a root of the bond determinant")
    n1 = physical_part(mg, k, raw)
    n2 = null_space(eye + phi @ tau_hat(mg), tol)
    topo = intersect(n1, n2)
    mult = n1.shape[1]
    dtop = topo.shape[1]
    oracle_mult = null_space(oracle_secular(mg, k), tol).shape[1]
    flags = []
    if mult == 0:
        kind = "twisted"
        flags.append("root carried only by the twisted partner problem")
    elif dtop == 0:
        kind = "non_topological"
    elif dtop == mult:
        kind = "topological"
    else:
        kind = "mixed"
    if oracle_mult != mult:
        flags.append(f"oracle multiplicity {oracle_mult} != counterpart multiplicity {mult}")
    # without a potential the twisted problem mirrors the physical one
    if mg.is_free() and raw.shape[1] != 2 * mult:
        flags.append(f"bond nullity {raw.shape[1]} != 2 x multiplicity")
    return EigenvalueRecord(
        k=float(k),
        residual=abs(float(np.linalg.det(bond))),
        multiplicity=mult,
        kind=kind,
        dim_topological=dtop,
        raw_nullity=raw.shape[1],
        oracle_multiplicity=oracle_mult,
        basis=n1,
        topological_basis=topo,
        flags=flags,
    )


def eigenvalues(mg: MetricGraph, kmin: float, kmax: float, samples: int | None = None,
                refine_tol: float = 1e-9, keep_twisted: bool = False):
    """Scan, refine and classify; returns records sorted by k.

    Roots of the bond determinant that carry no genuine eigenfunction (kind
    "twisted") are dropped unless ``keep_twisted``.
    """
    if samples is None:
        samples = max(2, int(np.ceil(1000 * (kmax - kmin))) + 1)
    result = scan(mg, kmin, kmax, samples)
    records = []
    for root in find_roots(result, refine_tol):
        try:
            rec = classify(mg, root.k)
        except NotARoot:
            continue
        if rec.kind != "twisted" or keep_twisted:
            records.append(rec)
    return records


# -- topological checks and eigenfunctions ---------------------------------


def verify_topological(x: np.ndarray, mg: MetricGraph, k: float) -> dict:
    """Residuals of the three properties every topological counterpart vector has.

    * ||(S_hat + tau_hat) x||
    * ||ds_hat D_hat^{-1} dt_hat* x||
    * max |value component|
    each compared against 1e-8 ||x||.
    """
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("zero vector cannot be a counterpart vector")
    g = mg.graph
    twisted = hat(incidence_s(g).T) @ hat(np.diag(1.0 / g.degrees)) @ hat(incidence_t(g)) @ x
    report = {
        "scattering_plus_reversal": float(np.linalg.norm((s_hat(mg) + tau_hat(mg)) @ x)),
        "twisted_laplacian": float(np.linalg.norm(twisted)),
        "max_vertex_value": float(np.abs(x[0::2]).max()),
        "bond_residual": float(np.linalg.norm(x - phi_block(mg, k) @ s_hat(mg) @ x)),
    }
    limit = 1e-8 * norm
    report["passed"] = all(report[key] <= limit for key in (
        "scattering_plus_reversal", "twisted_laplacian", "max_vertex_value"))
    return report


@dataclass
class Eigenfunction:
    coefficients: np.ndarray  # (m, 2): value and derivative at the source of each edge
    grids: list[np.ndarray]
    values: list[np.ndarray]
    continuity_residual: float
    kirchhoff_residual: float
    sup_norm: float


def reconstruct_eigenfunction(
    x: np.ndarray, mg: MetricGraph, k: float, samples_per_edge: int = 65, tol: float = 1e-7
) -> Eigenfunction:
    """Sample the eigenfunction encoded by counterpart vector x.

    S_hat x gives value and outgoing derivative at each source; the blocks of
    e and -e must describe the same function, otherwise
    InconsistentCounterpart is raised.
    """
    g = mg.graph
    m = g.m
    x = np.asarray(x, dtype=float)
    src = (s_hat(mg) @ x).reshape(2 * m, 2)
    term = x.reshape(2 * m, 2)
    scale = max(np.abs(x).max(), 1e-300)
    # terminal data of e seen from -e: same value, derivative sign flipped
    mismatch = np.abs(term[:m] - src[m:] * np.array([1.0, -1.0])).max()
    mismatch = max(mismatch, np.abs(term[m:] - src[:m] * np.array([1.0, -1.0])).max())
    if mismatch > tol * scale:
        raise InconsistentCounterpart(
            f"edge blocks disagree with their reversals by {mismatch:.3e}"
        )
    coeffs = src[:m]
    grids, values = [], []
    end_data = []
    for j in range(m):
        length = mg.lengths[j]
        grid = np.linspace(0.0, length, samples_per_edge)
        state = coeffs[j].copy()
        vals = [state[0]]
        for a, b in zip(grid[:-1], grid[1:]):
            state = partial_transfer(mg.potentials[j], length, a, b, k, mg.steps) @ state
            vals.append(state[0])
        grids.append(grid)
        values.append(np.array(vals))
        end_data.append(state)
    sup = max(float(np.abs(v).max()) for v in values)
    sup = sup if sup > 0 else 1.0
    # per vertex: values and outgoing derivatives of every incident end
    at_vertex = [[] for _ in range(g.n)]
    for j, (a, b) in enumerate(g.edges):
        at_vertex[a].append((coeffs[j][0], coeffs[j][1]))
        at_vertex[b].append((end_data[j][0], -end_data[j][1]))
    cont = kirch = 0.0
    for ends in at_vertex:
        vals = [v for v, _ in ends]
        cont = max(cont, max(vals) - min(vals))
        kirch = max(kirch, abs(sum(d for _, d in ends)))
    return Eigenfunction(coeffs, grids, values, cont / sup, kirch / sup, sup)


def counterpart_from_coefficients(mg: MetricGraph, k: float, coeffs: np.ndarray) -> np.ndarray:
    """Counterpart vector of the function with source data ``coeffs`` (m x 2)."""
    m = mg.m
    blocks = mg.transfer_matrices(k)
    x = np.zeros((2 * m, 2))
    for j in range(m):
        end = blocks[j] @ coeffs[j]
        x[j] = end
        x[j + m] = coeffs[j] * np.array([1.0, -1.0])
    return x.ravel()


__all__ = [
    "ScanResult",
    "EigenvalueRecord",
    "Eigenfunction",
    "scan",
    "find_roots",
    "locate_roots",
    "refine_near",
    "null_space",
    "intersect",
    "physical_part",
    "classify",
    "eigenvalues",
    "verify_topological",
    "reconstruct_eigenfunction",
    "counterpart_from_coefficients",
]
