"""Monte Carlo sampling of random graph states and their marginal spectra."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .graph_model import FattenedGraph
from .moment_engine import area

AMPLITUDE_CAP = 1 << 22
MASK64 = (1 << 64) - 1


class SimulationError(ValueError):
    pass


# --- rng streams -------------------------------------------------------------

def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, N: int, trial: int) -> int:
    """64-bit key for trial ``trial`` at dimension ``N``."""
    h = splitmix64(seed & MASK64)
    h = splitmix64(h ^ (N & MASK64))
    return splitmix64(h ^ (trial & MASK64))


def trial_rng(seed: int, N: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, N, trial)))


# --- sampling ----------------------------------------------------------------

def sample_haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))[None, :]


@dataclass
class StateVector:
    amplitudes: np.ndarray  # shape (N,) * 2m, half-edges vertex-major
    N: int
    vertex_of: tuple[int, ...]

    @property
    def n_half(self) -> int:
        return self.amplitudes.ndim

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes.ravel()))


def bell_network(g: FattenedGraph, N: int) -> np.ndarray:
    """Tensor product of maximally entangled pairs, one per edge."""
    pairs = g.half_edge_pairs()
    n_half = 2 * g.m
    pair_tensor = np.eye(N, dtype=complex) / math.sqrt(N)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if n_half > len(letters):
        raise SimulationError("too many half-edges")
    subs = [letters[a] + letters[b] for a, b in pairs]
    return np.einsum(",".join(subs) + "->" + letters[:n_half], *([pair_tensor] * len(pairs)))


def build_graph_state(g: FattenedGraph, N: int, rng: np.random.Generator | None = None,
                      unitaries: Sequence[np.ndarray | None] | None = None,
                      max_amplitudes: int = AMPLITUDE_CAP) -> StateVector:
    """Apply an independent Haar unitary of size ``N^{d_i}`` at every vertex.

    Entries of ``unitaries`` override the draw for that vertex (``None`` keeps
    the random one). Draw order is vertex order, so overriding one vertex does
    not change the others.
    """
    n_amp = N ** (2 * g.m)
    if n_amp > max_amplitudes:
        raise SimulationError(f"{n_amp} amplitudes exceed cap {max_amplitudes}")
    psi = bell_network(g, N).reshape([N ** d for d in g.degrees])
    for i, d in enumerate(g.degrees):
        u = None if unitaries is None else unitaries[i]
        if u is None:
            if rng is None:
                raise SimulationError("rng required when a unitary is not supplied")
            u = sample_haar_unitary(N ** d, rng)
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [i])), 0, i)
    vertex_of = tuple(i for i, d in enumerate(g.degrees) for _ in range(d))
    return StateVector(psi.reshape((N,) * (2 * g.m)), N, vertex_of)


def partial_trace(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the half-edges ``keep``."""
    keep = list(keep)
    drop = [h for h in range(state.n_half) if h not in keep]
    N = state.N
    mat = np.transpose(state.amplitudes, keep + drop).reshape(N ** len(keep), N ** len(drop))
    return mat @ mat.conj().T


def marginal(g: FattenedGraph, state: StateVector, keep: Sequence[int] | None = None) -> np.ndarray:
    return partial_trace(state, g.default_keep() if keep is None else keep)


# --- spectra -----------------------------------------------------------------

def jacobi_eigvalsh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi for a Hermitian matrix; eigenvalues in descending order.

    Sweeps visit ``(p, q)`` with ``p < q`` row by row and stop once the
    off-diagonal Frobenius mass falls below ``tol`` times the trace norm.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    scale = max(float(np.abs(np.diagonal(a)).sum()), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diagonal(a)) ** 2)), 0.0))
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                phase = apq / abs(apq)
                theta = 0.5 * math.atan2(2 * abs(apq), aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                # rotation J with J[p,p]=c, J[q,q]=c, J[p,q]=s*phase, J[q,p]=-s*conj(phase)
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * phase * rq
                a[q, :] = s * np.conj(phase) * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * np.conj(phase) * cq
                a[:, q] = s * phase * cp + c * cq
                a[p, q] = a[q, p] = 0.0
    return np.sort(np.diagonal(a).real)[::-1]


def spectrum_and_entropy(rho: np.ndarray, method: str = "lapack", herm_tol: float = 1e-8):
    """Descending eigenvalues and von Neumann entropy (nats)."""
    rho = np.asarray(rho)
    dev = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    if dev > herm_tol:
        raise SimulationError(f"matrix is not Hermitian (deviation {dev:.3g})")
    if method == "lapack":
        lam = np.linalg.eigvalsh(rho)[::-1]
    elif method == "jacobi":
        lam = jacobi_eigvalsh(rho)
    else:
        raise ValueError(f"unknown method {method!r}")
    pos = lam[lam > 1e-14]
    h = float(-np.sum(pos * np.log(pos)))
    return lam, max(h, 0.0)


# --- experiment --------------------------------------------------------------

@dataclass
class SpectralSample:
    graph: str
    name: str
    N: int
    trial: int
    seed: int
    eigenvalues: np.ndarray
    entropy: float
    offset: float
    moments: list[float]
    discarded_mass: float
    flagged: bool


def sample_once(g: FattenedGraph, N: int, trial: int, seed: int, n_max: int, X: int,
                label: str = "", max_amplitudes: int = AMPLITUDE_CAP, method: str = "lapack") -> SpectralSample:
    rng = trial_rng(seed, N, trial)
    state = build_graph_state(g, N, rng, max_amplitudes=max_amplitudes)
    rho = marginal(g, state)
    lam, h = spectrum_and_entropy(rho, method)
    top = N ** X
    head = np.clip(lam[:top], 0.0, None)
    discarded = float(np.clip(lam[top:], 0.0, None).sum())
    moments = [float(N ** (X * (p - 1)) * np.sum(head ** p)) for p in range(1, n_max + 1)]
    return SpectralSample(graph=g.name, name=label or g.name, N=N, trial=trial, seed=seed,
                          eigenvalues=lam, entropy=h, offset=h - X * math.log(N), moments=moments,
                          discarded_mass=discarded, flagged=discarded >= 1e-8)


@dataclass
class ExperimentConfig:
    Ns: tuple[int, ...] = (2, 4)
    trials: int = 100
    n_max: int = 3
    seed: int = 0
    threads: int = 1
    label: str = ""
    max_amplitudes: int = AMPLITUDE_CAP
    method: str = "lapack"


@dataclass
class Summary:
    graph: str
    area: int
    per_N: list[dict] = field(default_factory=list)
    variance_slopes: dict[str, float | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"graph": self.graph, "area": self.area, "per_N": self.per_N,
                "variance_slopes": self.variance_slopes}


def _mean_var(xs: np.ndarray) -> tuple[float, float]:
    # pairwise summation in numpy keeps the reduction order fixed
    mean = float(np.mean(xs))
    var = float(np.var(xs, ddof=1)) if len(xs) > 1 else 0.0
    return mean, var


def loglog_slope(Ns: Sequence[int], values: Sequence[float]) -> float | None:
    pts = [(math.log(n), math.log(v)) for n, v in zip(Ns, values) if v > 0]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def summarize(g: FattenedGraph, samples: Sequence[SpectralSample], n_max: int) -> Summary:
    X = area(g)
    summ = Summary(graph=g.name, area=X)
    Ns = sorted({s.N for s in samples})
    var_by_moment: dict[int, list[float]] = {p: [] for p in range(1, n_max + 1)}
    for N in Ns:
        rows = [s for s in samples if s.N == N]
        off = np.array([s.offset for s in rows])
        ent = np.array([s.entropy for s in rows])
        rec = {"N": N, "trials": len(rows), "entropy_mean": _mean_var(ent)[0],
               "offset_mean": _mean_var(off)[0], "offset_var": _mean_var(off)[1],
               "offset_stderr": math.sqrt(_mean_var(off)[1] / len(rows)) if len(rows) > 1 else 0.0,
               "flagged": sum(s.flagged for s in rows), "moments": []}
        for p in range(1, n_max + 1):
            mean, var = _mean_var(np.array([s.moments[p - 1] for s in rows]))
            rec["moments"].append({"order": p, "mean": mean, "var": var})
            var_by_moment[p].append(var)
        summ.per_N.append(rec)
    for p in range(2, n_max + 1):
        summ.variance_slopes[f"m{p}"] = loglog_slope(Ns, var_by_moment[p])
    return summ


def run_experiment(g: FattenedGraph, cfg: ExperimentConfig):
    """All (N, trial) samples in (N, trial) order plus the summary."""
    X = area(g)
    jobs = [(N, t) for N in sorted(cfg.Ns) for t in range(cfg.trials)]

    def work(job):
        N, t = job
        return sample_once(g, N, t, cfg.seed, cfg.n_max, X, cfg.label, cfg.max_amplitudes, cfg.method)

    with threadpool_limits(limits=1):
        if cfg.threads > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                samples = list(pool.map(work, jobs))
        else:
            samples = [work(j) for j in jobs]
    return samples, summarize(g, samples, cfg.n_max)


CSV_FIXED = ["graph", "name", "N", "trial", "entropy", "entropy_minus_XlogN"]


def csv_header(n_max: int) -> list[str]:
    return CSV_FIXED + [f"m{p}" for p in range(1, n_max + 1)] + ["discarded_mass", "seed"]


def to_csv(samples: Sequence[SpectralSample], n_max: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(csv_header(n_max))
    for s in sorted(samples, key=lambda r: (r.N, r.trial)):
        w.writerow([s.graph, s.name, s.N, s.trial, repr(s.entropy), repr(s.offset)]
                   + [repr(m) for m in s.moments] + [repr(s.discarded_mass), s.seed])
    return buf.getvalue()
