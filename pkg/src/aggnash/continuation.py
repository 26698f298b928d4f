"""Bonus-perturbed homotopy path following for Nash equilibria.

Strategies live in an unnormalized space ``w`` and are recovered by the
retraction ``R``, the Euclidean projection onto each agent's simplex. With a
bonus vector ``b`` the system

    F(w, lam) = w - R(w) - (V(R(w)) + lam * b)

has a known solution at ``lam = 1`` (every agent plays its bonus action) and
its solutions at ``lam = 0`` are Nash equilibria. The solution set is traced
from one end to the other with a predictor-corrector scheme.

The symmetric variant works on a single shared strategy of length ``|S|``.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .oracle import verify_nash
from .payoff import expected_payoffs, jacobian
from .symmetric import jacobian_symmetric, symmetric_expected_payoffs

log = logging.getLogger(__name__)

TIE_TOL = 1e-9
JITTER = 1e-9


class PathFollowingError(RuntimeError):
    """Path following stopped before reaching ``lam = 0``.

    Attributes
    ----------
    point : PathPoint
        Last accepted point on the path.
    steps : int
    """

    def __init__(self, message, point, steps):
        super().__init__(message)
        self.point = point
        self.steps = steps


class PathStall(PathFollowingError):
    """The step size underflowed while the corrector kept failing."""


class StepBudgetExceeded(PathFollowingError):
    """The maximum number of path steps was used up."""


@dataclass
class PathPoint:
    w: np.ndarray
    lam: float
    tangent: np.ndarray = None


@dataclass
class Bonus:
    """One rewarded action per agent with a positive magnitude."""

    actions: tuple
    magnitudes: tuple

    def vector(self, game):
        b = np.zeros(game.num_strats)
        for i, (a, mag) in enumerate(zip(self.actions, self.magnitudes)):
            b[game.agent_starts[i] + game.action_sets[i].index(a)] = mag
        return b

    def shared_vector(self, game):
        """Bonus over the common action set, for symmetric play."""
        if len(set(self.actions)) != 1 or len(set(self.magnitudes)) != 1:
            raise ValueError("symmetric play needs the same bonus for all")
        b = np.zeros(len(game.action_sets[0]))
        b[game.action_sets[0].index(self.actions[0])] = self.magnitudes[0]
        return b


@dataclass
class SolverOptions:
    eps: float = 1e-6
    corrector_tol: float = 1e-10
    initial_step: float = 0.1
    min_step: float = 1e-8
    max_step: float = 0.1
    max_steps: int = 100_000
    max_newton: int = 15
    corner_step: float = 1e-3
    method: str = "partitioned"
    payoff_method: str = "projected"
    threads: int = 1


@dataclass
class SolverResult:
    sigma: list
    w: np.ndarray
    lam: float
    steps: int
    regret: object
    lambda_trace: list = field(default_factory=list, repr=False)
    residual_trace: list = field(default_factory=list, repr=False)
    step_trace: list = field(default_factory=list, repr=False)

    def diagnostics_lines(self):
        """Per-step JSON lines with lambda, residual and step size."""
        for k, (lam, res, h) in enumerate(zip(
                self.lambda_trace, self.residual_trace, self.step_trace)):
            yield json.dumps({"step": k, "lambda": lam, "residual": res,
                              "h": h})


# retraction

def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    k = v.size
    if v.min() >= 0 and abs(v.sum() - 1.0) <= 4 * k * np.finfo(float).eps:
        return v.copy()
    return np.maximum(v - _threshold(v), 0.0)


def _sizes(action_sets):
    return [len(a) if not np.isscalar(a) else int(a) for a in action_sets]


def retract(w, action_sets):
    """Per-agent simplex projection of ``w``; returns a list of arrays."""
    w = np.asarray(w, dtype=float)
    out, st = [], 0
    for k in _sizes(action_sets):
        out.append(project_simplex(w[st:st + k]))
        st += k
    return out


def _threshold(v):
    """Shift ``theta`` with ``project_simplex(v) == max(v - theta, 0)``."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, v.size + 1) > css)[0][-1]
    return css[rho] / (rho + 1)


def _support_signature(w, sizes, tie_tol=TIE_TOL):
    sig, st = [], 0
    for k in sizes:
        sig.append(tuple(np.flatnonzero(project_simplex(w[st:st + k])
                                        > tie_tol)))
        st += k
    return tuple(sig)


def _support_jacobian(supports, sizes):
    m = sum(sizes)
    out = np.zeros((m, m))
    st = 0
    for T, k in zip(supports, sizes):
        T = st + np.asarray(T, dtype=int)
        out[np.ix_(T, T)] = np.eye(T.size) - 1.0 / T.size
        st += k
    return out


def retract_jacobian(w, action_sets, tie_tol=TIE_TOL):
    """Derivative of :func:`retract` at ``w``.

    Block diagonal; on each agent's support ``T`` the block is the centering
    matrix ``I - 1/|T|``, rows and columns of clipped coordinates are zero.
    Coordinates within ``tie_tol`` of being clipped count as clipped.
    """
    w = np.asarray(w, dtype=float)
    sizes = _sizes(action_sets)
    return _support_jacobian(_support_signature(w, sizes, tie_tol), sizes)


def _assemble(dV, dR, b):
    k = dV.shape[0]
    dF = np.eye(k) - (np.eye(k) + dV) @ dR
    return np.hstack([dF, -np.asarray(b, dtype=float)[:, None]])


# homotopy system

def residual_F(game, w, lam, b, payoff_method="projected"):
    """``w - R(w) - (V(R(w)) + lam b)`` for the full profile."""
    w = np.asarray(w, dtype=float)
    sigma = retract(w, game.action_sets)
    V = expected_payoffs(game, sigma, payoff_method)
    return w - np.concatenate(sigma) - V - lam * np.asarray(b)


def grad_F(game, w, lam, b, method="partitioned", threads=1):
    """``[I - (I + dV) dR | -b]``, an ``m x (m + 1)`` matrix."""
    w = np.asarray(w, dtype=float)
    sigma = retract(w, game.action_sets)
    J = jacobian(game, sigma, method, threads=threads).matrix
    return _assemble(J, retract_jacobian(w, game.action_sets), b)


def residual_F_symmetric(game, w, lam, b):
    """Reduced residual for a strategy shared by all agents."""
    w = np.asarray(w, dtype=float)
    sigma = project_simplex(w)
    V = symmetric_expected_payoffs(game, sigma)
    return w - sigma - V - lam * np.asarray(b)


def grad_F_symmetric(game, w, lam, b):
    """Reduced Jacobian; every opponent moves with the shared strategy."""
    w = np.asarray(w, dtype=float)
    sigma = project_simplex(w)
    dV = (game.num_agents - 1) * jacobian_symmetric(game, sigma).matrix
    return _assemble(dV, retract_jacobian(w, [w.size]), b)


# start point

def _bonus_magnitude(game):
    lo, hi = game.utility_bounds()
    n = game.num_agents
    return 2.0 * (n * hi - n * lo + 1.0)


def make_start(game, bonus="auto", symmetric=False, seed=0):
    """Starting point at ``lam = 1`` and the bonus that makes it one.

    Parameters
    ----------
    bonus : 'auto' or sequence of int
        Designated action per agent. ``auto`` picks each agent's best action
        against uniform play and jitters the magnitudes slightly (seeded)
        to stay clear of degenerate paths. In symmetric mode a single action
        or a list of identical actions is accepted.
    symmetric : bool
        Build the reduced start for a shared strategy.

    Returns
    -------
    (PathPoint, Bonus)
    """
    if any(len(a) == 0 for a in game.action_sets):
        raise ValueError("every agent needs at least one action")
    B = _bonus_magnitude(game)
    n = game.num_agents
    auto = isinstance(bonus, str)
    if auto and bonus != "auto":
        raise ValueError(f"unknown bonus mode {bonus!r}")
    rng = np.random.default_rng(seed)
    if symmetric:
        if not game.is_symmetric:
            raise ValueError("symmetric start needs a shared action set")
        aset = game.action_sets[0]
        if auto:
            unif = np.full(len(aset), 1.0 / len(aset))
            act = aset[int(np.argmax(symmetric_expected_payoffs(game, unif)))]
            mag = B + JITTER * rng.random()
        else:
            acts = [bonus] if np.isscalar(bonus) else list(bonus)
            if len(set(acts)) != 1:
                raise ValueError("symmetric mode needs one shared bonus action")
            act, mag = acts[0], B
        bon = Bonus((act,) * n, (mag,) * n)
        b = bon.shared_vector(game)
        sigma0 = np.zeros(len(aset))
        sigma0[aset.index(act)] = 1.0
        w = sigma0 + symmetric_expected_payoffs(game, sigma0) + b
        return PathPoint(w, 1.0), bon
    if auto:
        V = game.unflatten(expected_payoffs(game, game.uniform_profile()))
        acts = tuple(aset[int(np.argmax(v))]
                     for aset, v in zip(game.action_sets, V))
        mags = tuple(B + JITTER * rng.random(n))
    else:
        acts = tuple(int(a) for a in bonus)
        if len(acts) != n:
            raise ValueError(f"need one bonus action per agent ({n})")
        mags = (B,) * n
    bon = Bonus(acts, mags)
    b = bon.vector(game)
    sigma0 = game.pure_profile(acts)
    w = (game.flatten(sigma0) + expected_payoffs(game, sigma0) + b)
    return PathPoint(w, 1.0), bon


# path following

def _null_vector(DH):
    return np.linalg.svd(DH)[2][-1]


def _orient(t, ref):
    return -t if t @ ref < 0 else t


def _solve(A, rhs):
    try:
        return np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(A, rhs, rcond=None)[0]


class _Tracer:
    """Predictor-corrector follower for ``H(w, lam) = 0``.

    Parameters
    ----------
    residual : callable ``(w, lam) -> H``
    payoff_jac : callable ``w -> dV`` at ``R(w)``
    b : ndarray
        Bonus; ``dH/dlam = -b``.
    sizes : list of int
        Simplex block sizes of ``w``.
    """

    def __init__(self, residual, payoff_jac, b, sizes, opts):
        self.residual = residual
        self.payoff_jac = payoff_jac
        self.b = np.asarray(b, dtype=float)
        self.sizes = sizes
        self.opts = opts

    def F(self, z):
        return self.residual(z[:-1], z[-1])

    def jac(self, z, supports=None):
        w = z[:-1]
        if supports is None:
            supports = _support_signature(w, self.sizes)
        dR = _support_jacobian(supports, self.sizes)
        return _assemble(self.payoff_jac(w), dR, self.b)

    def correct(self, z, constraint):
        """Newton on ``[H(z); g(z)] = 0`` with backtracking.

        ``constraint(z)`` returns the scalar ``g(z)`` and its gradient.
        """
        opts = self.opts
        H = self.F(z)
        extra, row = constraint(z)
        support = _support_signature(z[:-1], self.sizes)
        restarts = 0
        it = 0
        while True:
            if (np.max(np.abs(H)) <= opts.corrector_tol
                    and abs(extra) <= opts.corrector_tol):
                return z, H
            if it >= opts.max_newton:
                return None, None
            A = np.vstack([self.jac(z, support), row])
            dz = _solve(A, -np.append(H, extra))
            g0 = np.linalg.norm(np.append(H, extra))
            alpha = 1.0
            while True:
                zn = z + alpha * dz
                Hn = self.F(zn)
                en, rn = constraint(zn)
                if np.linalg.norm(np.append(Hn, en)) < g0 or alpha < 1e-3:
                    break
                alpha /= 2
            if not np.all(np.isfinite(Hn)):
                return None, None
            z, H, extra, row = zn, Hn, en, rn
            it += 1
            new_support = _support_signature(z[:-1], self.sizes)
            if new_support != support and restarts < 3:
                # entered a different smooth piece of R
                support = new_support
                restarts += 1
                it = 0

    def step(self, y, t, h):
        """Predict along ``t`` and correct on the orthogonal hyperplane."""
        yp = y + h * t
        z, H = self.correct(yp, lambda z: (t @ (z - yp), t))
        if z is not None and np.linalg.norm(z - yp) <= 2 * h:
            return z, H
        return None, None

    def corner(self, y, t, h):
        """Step across a kink of the path near ``y``.

        Every combination of supports compatible with ``w`` up to a margin
        of ``10 h`` is a candidate smooth piece. Each piece's null direction
        is tried, most aligned with ``t`` first, skipping the way back.
        """
        w = y[:-1]
        delta = 10 * h
        choices, st = [], 0
        for k in self.sizes:
            v = w[st:st + k]
            margin = v - _threshold(v)
            sure = [int(j) for j in np.flatnonzero(margin > delta)]
            maybe = [int(j) for j in np.flatnonzero(np.abs(margin) <= delta)]
            opts = []
            for r in range(len(maybe) + 1):
                for extra in itertools.combinations(maybe, r):
                    T = tuple(sorted(sure + list(extra)))
                    if T:
                        opts.append(T)
            choices.append(opts)
            st += k
        if math.prod(len(c) for c in choices) > 512:
            return None, None, None
        dV = self.payoff_jac(w)
        old = _support_signature(w, self.sizes)
        cands = []
        for supports in itertools.product(*choices):
            DH = _assemble(dV, _support_jacobian(supports, self.sizes),
                           self.b)
            d = _null_vector(DH)
            for sgn in (1.0, -1.0):
                dd = sgn * d
                if supports == old and dd @ t < 0:
                    continue
                cands.append((float(dd @ t), dd, supports))
        cands.sort(key=lambda c: -c[0])
        for _, d, supports in cands:
            z, H = self.step(y, d, h)
            if z is None or (z - y) @ d <= 0:
                continue
            if (_support_signature(z[:-1], self.sizes) == old
                    and (z - y) @ t <= 0):
                continue
            return z, H, d
        return None, None, None

    def run(self, w0):
        opts = self.opts
        y = np.append(np.asarray(w0, dtype=float), 1.0)
        t = _null_vector(self.jac(y))
        if t[-1] > 0:
            t = -t
        h = opts.initial_step
        wins = 0
        lams, resids, hs = [1.0], [float(np.max(np.abs(self.F(y))))], [h]
        steps = 0
        e_lam = np.zeros_like(y)
        e_lam[-1] = 1.0
        while True:
            if steps >= opts.max_steps:
                raise StepBudgetExceeded(
                    f"no lam = 0 crossing within {opts.max_steps} steps",
                    PathPoint(y[:-1], y[-1], t), steps)
            z, H = self.step(y, t, h)
            ref = t
            if z is None and h <= opts.corner_step:
                z, H, ref = self.corner(y, t, h)
            if z is None:
                h /= 2
                wins = 0
                if h < opts.min_step:
                    raise PathStall(
                        f"corrector failed with step {h:.3g} at "
                        f"lam={y[-1]:.6g}", PathPoint(y[:-1], y[-1], t),
                        steps)
                continue
            steps += 1
            if z[-1] <= 0:
                theta = y[-1] / (y[-1] - z[-1])
                z0 = y + theta * (z - y)
                z0[-1] = 0.0
                zf, Hf = self.correct(z0, lambda z: (z[-1], e_lam))
                if zf is not None:
                    lams.append(0.0)
                    resids.append(float(np.max(np.abs(Hf))))
                    hs.append(h)
                    return zf, steps, lams, resids, hs
                h /= 2
                wins = 0
                if h < opts.min_step:
                    raise PathStall("final corrector at lam = 0 failed",
                                    PathPoint(y[:-1], y[-1], t), steps)
                continue
            t = _orient(_null_vector(self.jac(z)), z - y)
            y = z
            lams.append(float(y[-1]))
            resids.append(float(np.max(np.abs(H))))
            hs.append(h)
            wins += 1
            if wins >= 2:
                h = min(h * 1.5, opts.max_step)
                wins = 0


def trace_path(game, start, bonus, options=None):
    """Follow the homotopy from ``start`` to ``lam = 0``.

    Parameters
    ----------
    start : PathPoint
        From :func:`make_start`.
    bonus : Bonus
    options : SolverOptions, optional

    Returns
    -------
    SolverResult
        ``regret`` holds the oracle regret report at ``options.eps``.

    Raises
    ------
    PathStall, StepBudgetExceeded
    """
    opts = options or SolverOptions()
    b = bonus.vector(game)
    if opts.method == "symmetric":
        raise ValueError("use trace_path_symmetric for the symmetric method")

    def residual(w, lam):
        return residual_F(game, w, lam, b, opts.payoff_method)

    def payoff_jac(w):
        sigma = retract(w, game.action_sets)
        return jacobian(game, sigma, opts.method, threads=opts.threads).matrix

    res0 = np.max(np.abs(residual(start.w, start.lam)))
    if res0 > 1e-6:
        raise ValueError(f"start point is off the path (residual {res0:.3g})")
    tracer = _Tracer(residual, payoff_jac, b, _sizes(game.action_sets), opts)
    z, steps, lams, resids, hs = tracer.run(start.w)
    sigma = retract(z[:-1], game.action_sets)
    report = verify_nash(game, sigma, opts.eps)
    log.info("path reached lam=0 after %d steps, max regret %.3g",
             steps, report.max_regret)
    return SolverResult(sigma, z[:-1], float(z[-1]), steps, report,
                        lams, resids, hs)


def trace_path_symmetric(game, start, bonus, options=None):
    """Follow the reduced homotopy for a strategy shared by all agents.

    ``start`` must come from ``make_start(game, ..., symmetric=True)``.
    The returned ``sigma`` repeats the shared strategy for every agent.
    """
    opts = options or SolverOptions()
    if not game.is_symmetric:
        raise ValueError("symmetric path following needs a symmetric game")
    b = bonus.shared_vector(game)

    def residual(w, lam):
        return residual_F_symmetric(game, w, lam, b)

    def payoff_jac(w):
        J = jacobian_symmetric(game, project_simplex(w)).matrix
        return (game.num_agents - 1) * J

    res0 = np.max(np.abs(residual(start.w, start.lam)))
    if res0 > 1e-6:
        raise ValueError(f"start point is off the path (residual {res0:.3g})")
    tracer = _Tracer(residual, payoff_jac, b, [len(b)], opts)
    z, steps, lams, resids, hs = tracer.run(start.w)
    shared = project_simplex(z[:-1])
    sigma = [shared.copy() for _ in range(game.num_agents)]
    report = verify_nash(game, sigma, opts.eps)
    return SolverResult(sigma, z[:-1], float(z[-1]), steps, report,
                        lams, resids, hs)


def solve(game, bonus="auto", symmetric=False, options=None, seed=0):
    """Build the start point and trace the path.

    ``options.method == "symmetric"`` implies ``symmetric=True``.
    """
    symmetric = symmetric or (options is not None
                              and options.method == "symmetric")
    start, bon = make_start(game, bonus, symmetric=symmetric, seed=seed)
    if symmetric:
        return trace_path_symmetric(game, start, bon, options)
    return trace_path(game, start, bon, options)
