"""Lorenz system: fixed-step RK4 integration, L/R symbolic dynamics, periodic orbits,
phase-volume contraction, ensembles and SL(2, Z) word arithmetic.

The classifying section is the set of local maxima of ``Z`` (where
``XY - bZ`` changes sign from + to -); the symbol is the sign of ``X`` there.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.optimize import brentq

DEFAULT_DT = 1e-3


class LorenzError(ValueError):
    pass


class DivergenceError(LorenzError):
    pass


class EmptyWordError(LorenzError):
    pass


@dataclass(frozen=True)
class LorenzParams:
    sigma: float = 10.0
    r: float = 28.0
    b: float = 8.0 / 3.0

    def __post_init__(self):
        if not self.sigma > 0 or not self.b > 0:
            raise LorenzError(f"need sigma > 0 and b > 0, got sigma={self.sigma}, b={self.b}")
        if not math.isfinite(self.r):
            raise LorenzError("r must be finite")

    def as_tuple(self):
        return float(self.sigma), float(self.r), float(self.b)

    def equilibria(self) -> list[np.ndarray]:
        out = [np.zeros(3)]
        if self.r > 1:
            q = math.sqrt(self.b * (self.r - 1))
            out += [np.array([q, q, self.r - 1]), np.array([-q, -q, self.r - 1])]
        return out


def rhs(state, params: LorenzParams) -> np.ndarray:
    s, r, b = params.as_tuple()
    x, y, z = state
    return np.array([s * (y - x), x * (r - z) - y, x * y - b * z])


def jacobian(state, params: LorenzParams) -> np.ndarray:
    s, r, b = params.as_tuple()
    x, y, z = state
    return np.array([[-s, s, 0.0], [r - z, -1.0, -x], [y, x, -b]])


def divergence(params: LorenzParams) -> float:
    """Trace of the Jacobian, the same at every point: ``-(sigma + b + 1)``."""
    return -(params.sigma + params.b + 1)


# --- kernels -------------------------------------------------------------------


@njit(cache=True)
def _f(x, y, z, s, r, b):
    return s * (y - x), x * (r - z) - y, x * y - b * z


@njit(cache=True)
def _step(x, y, z, s, r, b, h):
    k1x, k1y, k1z = _f(x, y, z, s, r, b)
    k2x, k2y, k2z = _f(x + 0.5 * h * k1x, y + 0.5 * h * k1y, z + 0.5 * h * k1z, s, r, b)
    k3x, k3y, k3z = _f(x + 0.5 * h * k2x, y + 0.5 * h * k2y, z + 0.5 * h * k2z, s, r, b)
    k4x, k4y, k4z = _f(x + h * k3x, y + h * k3y, z + h * k3z, s, r, b)
    return (x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x),
            y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y),
            z + h / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z))


@njit(cache=True)
def _run(x, y, z, s, r, b, dt, n, out):
    out[0, 0], out[0, 1], out[0, 2] = x, y, z
    for k in range(n):
        x, y, z = _step(x, y, z, s, r, b, dt)
        if not (np.isfinite(x) and np.isfinite(y) and np.isfinite(z)):
            return k + 1
        out[k + 1, 0], out[k + 1, 1], out[k + 1, 2] = x, y, z
    return -1


@njit(cache=True)
def _next_maxima(x, y, z, s, r, b, dt, count, min_steps, max_steps, out_steps, out_states):
    """Step until ``count`` Z maxima are bracketed; record the step index and the state before it."""
    found = 0
    g = x * y - b * z
    for k in range(max_steps):
        nx, ny, nz = _step(x, y, z, s, r, b, dt)
        ng = nx * ny - b * nz
        if k >= min_steps and g > 0.0 and ng <= 0.0:
            out_steps[found] = k
            out_states[found, 0], out_states[found, 1], out_states[found, 2] = x, y, z
            found += 1
            if found == count:
                return found
        x, y, z, g = nx, ny, nz, ng
        if not np.isfinite(x + y + z):
            return -1
    return found


@njit(cache=True)
def _jv(x, y, z, M, s, r, b):
    out = np.empty_like(M)
    for j in range(M.shape[1]):
        u, v, w = M[0, j], M[1, j], M[2, j]
        out[0, j] = s * (v - u)
        out[1, j] = (r - z) * u - v - x * w
        out[2, j] = y * u + x * v - b * w
    return out


@njit(cache=True)
def _tangent_step(x, y, z, V, s, r, b, h):
    # RK4 on the state and the tangent vectors together
    k1 = _f(x, y, z, s, r, b)
    K1 = _jv(x, y, z, V, s, r, b)
    x2, y2, z2 = x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], z + 0.5 * h * k1[2]
    k2 = _f(x2, y2, z2, s, r, b)
    K2 = _jv(x2, y2, z2, V + 0.5 * h * K1, s, r, b)
    x3, y3, z3 = x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], z + 0.5 * h * k2[2]
    k3 = _f(x3, y3, z3, s, r, b)
    K3 = _jv(x3, y3, z3, V + 0.5 * h * K2, s, r, b)
    x4, y4, z4 = x + h * k3[0], y + h * k3[1], z + h * k3[2]
    k4 = _f(x4, y4, z4, s, r, b)
    K4 = _jv(x4, y4, z4, V + h * K3, s, r, b)
    nx = x + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
    ny = y + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    nz = z + h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return nx, ny, nz, V + h / 6.0 * (K1 + 2 * K2 + 2 * K3 + K4)


@njit(cache=True)
def _volume_log(x, y, z, V, s, r, b, dt, n, renorm):
    acc = 0.0
    for k in range(n):
        x, y, z, V = _tangent_step(x, y, z, V, s, r, b, dt)
        if (k + 1) % renorm == 0:
            Q, R = np.linalg.qr(V)
            for i in range(3):
                acc += math.log(abs(R[i, i]))
            V = Q
    Q, R = np.linalg.qr(V)
    for i in range(3):
        acc += math.log(abs(R[i, i]))
    return acc


@njit(cache=True)
def _lyap(x, y, z, vx, vy, vz, s, r, b, dt, n, renorm):
    V = np.zeros((3, 1))
    V[0, 0], V[1, 0], V[2, 0] = vx, vy, vz
    acc = 0.0
    for k in range(n):
        x, y, z, V = _tangent_step(x, y, z, V, s, r, b, dt)
        if (k + 1) % renorm == 0:
            nrm = math.sqrt(V[0, 0] ** 2 + V[1, 0] ** 2 + V[2, 0] ** 2)
            acc += math.log(nrm)
            V = V / nrm
    return acc


# --- integration ---------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    states: np.ndarray  # (n, 3)
    dt: float
    params: LorenzParams = field(default_factory=LorenzParams)

    def __len__(self):
        return len(self.t)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, every: int = 1) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "X", "Y", "Z"])
        for t, (x, y, z) in zip(self.t[::every], self.states[::every]):
            w.writerow([f"{t:.10g}", f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
        return buf.getvalue()


def _steps(T: float, dt: float) -> tuple[int, float]:
    n = int(math.floor(T / dt + 1e-9))
    rem = T - n * dt
    if rem < 1e-12 * max(1.0, T):
        rem = 0.0
    return n, rem


def integrate(state, params: LorenzParams | None = None, dt: float = DEFAULT_DT, T: float = 1.0) -> Trajectory:
    """Classical RK4 with fixed step ``dt``; a shorter last step lands exactly on ``T``."""
    params = params or LorenzParams()
    if not dt > 0 or not T > 0:
        raise LorenzError(f"need dt > 0 and T > 0, got dt={dt}, T={T}")
    x0 = np.asarray(state, dtype=float)
    if x0.shape != (3,) or not np.all(np.isfinite(x0)):
        raise LorenzError(f"state must be three finite numbers, got {state!r}")
    n, rem = _steps(T, dt)
    out = np.empty((n + 1 + (rem > 0), 3))
    s, r, b = params.as_tuple()
    bad = _run(x0[0], x0[1], x0[2], s, r, b, dt, n, out)
    if bad >= 0:
        raise DivergenceError(f"state became non-finite at step {bad}")
    t = np.arange(n + 1) * dt
    if rem > 0:
        out[-1] = _step(*out[n], s, r, b, rem)
        if not np.all(np.isfinite(out[-1])):
            raise DivergenceError("state became non-finite on the final step")
        t = np.append(t, T)
    return Trajectory(t, out, dt, params)


def flow(state, params: LorenzParams, T: float, dt: float = DEFAULT_DT) -> np.ndarray:
    return integrate(state, params, dt, T).final


# --- symbolic dynamics ---------------------------------------------------------


def section_indices(traj: Trajectory) -> np.ndarray:
    """Sample indices ``k`` with a Z maximum between samples ``k`` and ``k + 1``."""
    x, y, z = traj.states.T
    g = x * y - traj.params.b * z
    return np.nonzero((g[:-1] > 0) & (g[1:] <= 0))[0]


def _symbols(xs, prev: str | None = None) -> str:
    out = []
    for x in xs:
        if x < 0:
            prev = "L"
        elif x > 0:
            prev = "R"
        elif prev is None:
            prev = "R"
        out.append(prev)
    return "".join(out)


def symbolic_word(traj: Trajectory) -> str:
    idx = section_indices(traj)
    if len(idx) == 0:
        raise EmptyWordError("trajectory never reaches a Z maximum")
    return _symbols(traj.states[idx + 1, 0])


def cyclic_normal_form(word: str) -> str:
    _check_word(word)
    return min(word[k:] + word[:k] for k in range(len(word)))


def _check_word(word: str):
    if not word or set(word) - {"L", "R"}:
        raise LorenzError(f"word must be a nonempty string over L/R, got {word!r}")


def is_primitive(word: str) -> bool:
    n = len(word)
    return all(word != word[k:] + word[:k] for k in range(1, n) if n % k == 0)


# --- modular group -------------------------------------------------------------


@dataclass(frozen=True)
class ModularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise LorenzError("modular matrix must have determinant 1")

    def __matmul__(self, o: "ModularMatrix") -> "ModularMatrix":
        return ModularMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                             self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def to_list(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


GEN_L = ModularMatrix(1, 1, 0, 1)
GEN_R = ModularMatrix(1, 0, 1, 1)


def word_to_matrix(word: str) -> ModularMatrix:
    _check_word(word)
    m = ModularMatrix(1, 0, 0, 1)
    for ch in word:
        m = m @ (GEN_L if ch == "L" else GEN_R)
    return m


# --- periodic orbits -----------------------------------------------------------


@dataclass(frozen=True)
class Crossing:
    time: float
    state: np.ndarray
    symbol: str


def _refine(state, step_index: int, params: LorenzParams, dt: float) -> tuple[float, np.ndarray]:
    s, r, b = params.as_tuple()

    def g(h):
        x, y, z = _step(state[0], state[1], state[2], s, r, b, h)
        return x * y - b * z

    ga, gb = g(0.0), g(dt)
    if ga <= 0:
        h = 0.0
    elif gb >= 0:
        h = dt
    else:
        h = brentq(g, 0.0, dt, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return step_index * dt + h, np.array(_step(state[0], state[1], state[2], s, r, b, h))


def section_crossings(state, params: LorenzParams, count: int, dt: float = DEFAULT_DT,
                      min_time: float = 0.05, max_time: float = 200.0) -> list[Crossing]:
    """The next ``count`` Z maxima after ``state``, located to rounding accuracy."""
    x0 = np.asarray(state, dtype=float)
    s, r, b = params.as_tuple()
    steps = np.zeros(count, dtype=np.int64)
    states = np.zeros((count, 3))
    found = _next_maxima(x0[0], x0[1], x0[2], s, r, b, dt, count, int(min_time / dt),
                         int(max_time / dt), steps, states)
    if found < 0:
        raise DivergenceError("state became non-finite while seeking the section")
    out = []
    prev = None
    for k in range(found):
        t, st = _refine(states[k], int(steps[k]), params, dt)
        sym = _symbols([st[0]], prev)
        prev = sym
        out.append(Crossing(t, st, sym))
    return out


def on_section(xy, params: LorenzParams) -> np.ndarray:
    x, y = xy
    return np.array([x, y, x * y / params.b])


@dataclass(frozen=True)
class PeriodicOrbit:
    word: str
    initial_point: np.ndarray
    period: float
    closure: float
    newton_steps: int

    @property
    def normal_form(self) -> str:
        return cyclic_normal_form(self.word)

    def to_json(self) -> dict:
        return {
            "word": self.word,
            "normal_form": self.normal_form,
            "matrix": word_to_matrix(self.normal_form).to_list(),
            "period": float(self.period),
            "initial_point": [float(v) for v in self.initial_point],
            "closure": float(self.closure),
        }


@dataclass(frozen=True)
class UPOCatalogue:
    orbits: tuple[PeriodicOrbit, ...]
    exhausted: bool  # the search budget ran out before all candidates were tried
    candidates_tried: int

    def words(self) -> set[str]:
        return {o.normal_form for o in self.orbits}

    def to_json(self) -> dict:
        return {"orbits": [o.to_json() for o in self.orbits], "exhausted": self.exhausted,
                "candidates_tried": self.candidates_tried}


def _return(xy, params, p, dt):
    cr = section_crossings(on_section(xy, params), params, p, dt)
    if len(cr) < p:
        raise LorenzError("orbit left the attractor")
    return cr


def refine_orbit(xy0, p: int, params: LorenzParams, dt: float = DEFAULT_DT, tol: float = 1e-8,
                 max_iter: int = 40, fd: float = 1e-7) -> PeriodicOrbit | None:
    """Damped Newton on ``P**p(x) - x`` over section coordinates ``(X, Y)``."""
    xy = np.asarray(xy0, dtype=float)

    def resid(v):
        cr = _return(v, params, p, dt)
        return cr[-1].state[:2] - v, cr

    F, cr = resid(xy)
    for it in range(max_iter):
        start = on_section(xy, params)
        closure = float(np.linalg.norm(cr[-1].state - start))
        if closure < tol:
            word = "".join(c.symbol for c in cr)
            return PeriodicOrbit(word, start, cr[-1].time, closure, it)
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = fd * max(1.0, abs(xy[j]))
            J[:, j] = (resid(xy + e)[0] - F) / e[j]
        try:
            delta = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        norm0 = np.linalg.norm(F)
        while lam > 1e-4:
            try:
                F1, cr1 = resid(xy + lam * delta)
            except LorenzError:
                F1 = None
            if F1 is not None and np.linalg.norm(F1) < norm0:
                break
            lam /= 2
        else:
            return None
        xy, F, cr = xy + lam * delta, F1, cr1
    return None


def _itinerary_guess(word: str, pts: np.ndarray, syms: str, horizon: int = 48) -> np.ndarray | None:
    """Per orbit point, the recorded section point whose forward itinerary agrees longest with the word's."""
    p = len(word)
    reps = horizon // p + 2
    guess = np.empty((p, 2))
    for k in range(p):
        seq = ((word[k:] + word[:k]) * reps)[:horizon]
        lo, hi, best = 0, horizon, -1
        while lo < hi:  # longest matching prefix by bisection on its length
            mid = (lo + hi + 1) // 2
            i = syms.find(seq[:mid])
            if i >= 0 and i < len(pts):
                lo, best = mid, i
            else:
                hi = mid - 1
        if best < 0 or lo < min(p, 8):
            return None
        guess[k] = pts[best]
    return guess


def refine_orbit_multishoot(guess: np.ndarray, params: LorenzParams, dt: float = DEFAULT_DT,
                            tol: float = 1e-11, max_iter: int = 30, fd: float = 1e-8) -> np.ndarray | None:
    """Damped Newton on ``P(v_k) = v_{k+1}`` for all ``k`` at once, in section coordinates."""
    v = np.array(guess, dtype=float)
    p = len(v)

    def resid(v):
        out = np.empty((p, 2))
        for k in range(p):
            out[k] = _return(v[k], params, 1, dt)[-1].state[:2] - v[(k + 1) % p]
        return out

    F = resid(v)
    for _ in range(max_iter):
        norm0 = np.linalg.norm(F)
        if norm0 < tol:
            return v
        J = np.zeros((2 * p, 2 * p))
        for k in range(p):
            base = _return(v[k], params, 1, dt)[-1].state[:2]
            for j in range(2):
                e = np.zeros(2)
                e[j] = fd * max(1.0, abs(v[k, j]))
                J[2 * k:2 * k + 2, 2 * k + j] = (_return(v[k] + e, params, 1, dt)[-1].state[:2] - base) / e[j]
            n = (k + 1) % p
            J[2 * k:2 * k + 2, 2 * n:2 * n + 2] -= np.eye(2)
        try:
            delta = np.linalg.solve(J, -F.ravel()).reshape(p, 2)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-4:
            try:
                F1 = resid(v + lam * delta)
            except LorenzError:
                F1 = None
            if F1 is not None and np.linalg.norm(F1) < norm0:
                break
            lam /= 2
        else:
            return None
        v, F = v + lam * delta, F1
    return v if np.linalg.norm(F) < tol else None


def find_orbit_for_word(word: str, params: LorenzParams | None = None, dt: float = DEFAULT_DT,
                        record_length: int = 20000, seed: int = 0, search_budget: int = 50) -> PeriodicOrbit | None:
    """Periodic orbit with a prescribed cyclic word."""
    _check_word(word)
    nf = cyclic_normal_form(word)
    cat = find_upos(params, len(word), search_budget, seed, dt, record_length, words={nf})
    return next((o for o in cat.orbits if o.normal_form == nf), None)


def _record(params: LorenzParams, dt: float, record_length: int, seed: int) -> tuple[np.ndarray, str]:
    rng = np.random.default_rng(seed)
    x0 = np.array([1.0, 1.0, 20.0]) + rng.normal(scale=0.1, size=3)
    x0 = flow(x0, params, 20.0, dt)
    cr = section_crossings(x0, params, record_length, dt, max_time=record_length * 2.0)
    return np.array([c.state[:2] for c in cr]), "".join(c.symbol for c in cr)


def verify_orbit(orbit: PeriodicOrbit, params: LorenzParams, dt: float = DEFAULT_DT) -> tuple[float, str]:
    """Re-integrate for one period; return the closure error and the word read off the trajectory."""
    traj = integrate(orbit.initial_point, params, dt, orbit.period)
    # the start sits on a maximum itself: drop a trailing maximum at the very end
    idx = section_indices(traj)
    word = _symbols(traj.states[idx + 1, 0])
    if len(word) == len(orbit.word) - 1:
        word = word + _symbols([traj.final[0]], word[-1] if word else None)
    return float(np.linalg.norm(traj.final - orbit.initial_point)), word


def find_upos(params: LorenzParams | None = None, max_word_len: int = 5, search_budget: int = 200,
              seed: int = 0, dt: float = DEFAULT_DT, record_length: int = 3000,
              words: set[str] | None = None, max_attempts: int = 4) -> UPOCatalogue:
    """Close-return search on the section followed by Newton refinement.

    ``words`` restricts the search to the given cyclic classes.  Candidates
    are ranked by close-return distance; ``search_budget`` caps the number of
    refinements attempted, ``max_attempts`` the number per cyclic class.
    """
    params = params or LorenzParams()
    pts, syms = _record(params, dt, record_length, seed)
    wanted = {cyclic_normal_form(w) for w in words} if words else None

    cands = []
    for p in range(1, max_word_len + 1):
        for i in range(len(pts) - p):
            w = syms[i:i + p]
            nf = cyclic_normal_form(w)
            if not is_primitive(w) or (wanted is not None and nf not in wanted):
                continue
            cands.append((float(np.linalg.norm(pts[i + p] - pts[i])), p, i, nf))
    cands.sort()

    found: dict[str, PeriodicOrbit] = {}
    attempts: dict[str, int] = {}
    tried = 0
    for dist, p, i, nf in cands:
        if nf in found or attempts.get(nf, 0) >= max_attempts:
            continue
        attempts[nf] = attempts.get(nf, 0) + 1
        if wanted is not None and set(found) >= wanted:
            break
        if tried >= search_budget:
            return UPOCatalogue(_ordered(found), True, tried)
        tried += 1
        try:
            orb = refine_orbit(pts[i], p, params, dt)
        except LorenzError:
            continue
        if orb is None or not is_primitive(orb.word) or _near_equilibrium(orb.initial_point, params):
            continue
        closure, word = verify_orbit(orb, params, dt)
        if closure < 1e-6 and cyclic_normal_form(word) == orb.normal_form:
            found.setdefault(orb.normal_form, orb)
    # requested words with no close return in the record: seed from itineraries instead
    for nf in sorted(wanted - set(found)) if wanted else ():
        if tried >= search_budget:
            return UPOCatalogue(_ordered(found), True, tried)
        tried += 1
        guess = _itinerary_guess(nf, pts, syms)
        v = refine_orbit_multishoot(guess, params, dt) if guess is not None else None
        orb = refine_orbit(v[0], len(nf), params, dt, fd=1e-9) if v is not None else None
        if orb is None or orb.normal_form != nf:
            continue
        closure, word = verify_orbit(orb, params, dt)
        if closure < 1e-6 and cyclic_normal_form(word) == nf:
            found[nf] = orb
    return UPOCatalogue(_ordered(found), False, tried)


def _near_equilibrium(x, params: LorenzParams, tol: float = 1e-3) -> bool:
    # a collapsing spiral around C+ or C- closes up too, with a meaningless period
    return any(np.linalg.norm(x - e) < tol for e in params.equilibria())


def _ordered(found: dict) -> tuple[PeriodicOrbit, ...]:
    return tuple(found[k] for k in sorted(found, key=lambda w: (len(w), w)))


def upo_catalogue_json(cat: UPOCatalogue) -> str:
    return json.dumps(cat.to_json(), sort_keys=True, indent=2)


# --- volume contraction and Lyapunov exponent ------------------------------------


@dataclass(frozen=True)
class ContractionResult:
    measured: float
    expected: float

    @property
    def relative_error(self) -> float:
        return abs(self.measured - self.expected) / abs(self.expected)


def ellipsoid_contraction_check(params: LorenzParams | None = None, T: float = 5.0, dt: float = DEFAULT_DT,
                                state=(1.0, 1.0, 20.0), seed: int = 0, renorm: int = 10) -> ContractionResult:
    """Slope of the log-volume of a tangent parallelepiped carried by the linearised flow."""
    params = params or LorenzParams()
    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    x = np.asarray(state, dtype=float)
    n = int(round(T / dt))
    s, r, b = params.as_tuple()
    total = _volume_log(x[0], x[1], x[2], np.ascontiguousarray(V), s, r, b, dt, n, renorm)
    return ContractionResult(total / (n * dt), divergence(params))


def lyapunov_max(params: LorenzParams | None = None, T: float = 1000.0, renorm_interval: float = 0.01,
                 dt: float = DEFAULT_DT, state=(1.0, 1.0, 20.0), transient: float = 20.0, seed: int = 0) -> float:
    params = params or LorenzParams()
    x = flow(state, params, transient, dt) if transient > 0 else np.asarray(state, dtype=float)
    v = np.random.default_rng(seed).normal(size=3)
    v /= np.linalg.norm(v)
    renorm = max(1, int(round(renorm_interval / dt)))
    n = int(round(T / dt)) // renorm * renorm
    s, r, b = params.as_tuple()
    return _lyap(x[0], x[1], x[2], v[0], v[1], v[2], s, r, b, dt, n, renorm) / (n * dt)


# --- ensembles -------------------------------------------------------------------


def ring(center, radius: float, n: int, plane: tuple[int, int] = (0, 1)) -> np.ndarray:
    if n < 1:
        raise LorenzError("ring needs at least one member")
    c = np.asarray(center, dtype=float)
    pts = np.repeat(c[None, :], n, axis=0)
    if n == 1:
        return pts
    ang = 2 * np.pi * np.arange(n) / n
    pts[:, plane[0]] += radius * np.cos(ang)
    pts[:, plane[1]] += radius * np.sin(ang)
    return pts


@dataclass(frozen=True)
class EnsembleResult:
    initial: np.ndarray
    final: np.ndarray
    diverged: np.ndarray  # bool per member
    snapshots: np.ndarray  # (n_snap, members, 3)
    times: np.ndarray

    def __len__(self):
        return len(self.final)

    def spread_ratio(self) -> float:
        ok = ~self.diverged
        d0 = _diameter(self.initial[ok])
        return _diameter(self.final[ok]) / d0 if d0 > 0 else float("inf")

    def wing_fractions(self) -> tuple[float, float]:
        x = self.final[~self.diverged, 0]
        return float(np.mean(x < 0)), float(np.mean(x > 0))

    def snapshots_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "member", "X", "Y", "Z"])
        for t, snap in zip(self.times, self.snapshots):
            for m, (x, y, z) in enumerate(snap):
                w.writerow([f"{t:.10g}", m, f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"])
        return buf.getvalue()


def _diameter(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return 0.0
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d**2).sum(-1)).max())


def evolve_ensemble(states, params: LorenzParams | None = None, T: float = 1.0, dt: float = DEFAULT_DT,
                    snapshots: int = 5) -> EnsembleResult:
    """Integrate each member independently; a member that blows up is flagged and frozen."""
    params = params or LorenzParams()
    init = np.atleast_2d(np.asarray(states, dtype=float))
    if len(init) == 0:
        raise LorenzError("ensemble must be nonempty")
    times = np.linspace(0.0, T, snapshots + 1)
    snaps = np.empty((len(times), len(init), 3))
    snaps[0] = init
    diverged = np.zeros(len(init), dtype=bool)
    for m, x0 in enumerate(init):
        x = x0
        for j in range(1, len(times)):
            if not diverged[m]:
                try:
                    x = flow(x, params, times[j] - times[j - 1], dt)
                except (DivergenceError, LorenzError):
                    diverged[m] = True
            snaps[j, m] = x
    return EnsembleResult(init, snaps[-1].copy(), diverged, snaps, times)
