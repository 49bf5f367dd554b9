"""The discrete axis of a train-track automorphism and projections onto it.

The axis is the grid {T.phi^n} with log-linearly interpolated length
functions between consecutive powers: the slopes log||phi^{n+1}g|| -
log||phi^n g|| never exceed log(lambda), so consecutive grid points are at
distance exactly delta and the legal candidates realize it.  Everything
here reduces to translation-length tables k -> ||phi^k(g)||_T, built by
iterating the substitution on cyclically reduced representatives.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .core import GbsError
from .lipschitz import Candidate, enumerate_candidates, lipschitz_distance
from .marked import MarkedGraph, Substitution, random_loop, twist
from .moves import normalize_volume, random_deform
from .traintrack import TrainTrackMap
from .words import (CyclicWord, GroupWord, cyclic_reduce, cyclic_to_loop,
                    translation_length)


class WindowExhausted(GbsError):
    """The legality threshold was not crossed inside the search window."""


@dataclass
class AxisConfig:
    epsilon0: float | None = None    # estimated when absent
    delta: float | None = None       # grid step; default log(lambda)/8
    k_min: int = -24
    k_max: int = 24
    n_samples: int = 50
    eps_n_cap: int = 6               # N sweep bound for estimate_epsilon0
    window_pad: float = 3.0          # half-width of search windows, in log(lambda) units
    search_gap: int = 5              # tolerated below-threshold gap when walking down
    word_budget: int = 200000        # edge budget before declaring the window exhausted
    n_balls: int = 200
    x_per_ball: int = 2
    deform_steps: int = 5
    radius_fraction: float = 0.9     # ball radius as a fraction of d(Y, axis)
    seed: int = 0


@dataclass
class ExponentData:
    k_plus: int
    k_minus: int
    t0: float


@dataclass
class ThetaData:
    t_min: float
    t_max: float
    diameter: float
    value: float
    t0: float


@dataclass
class ProjectionData:
    t_x: float
    d_min: float
    theta_t_min: float
    theta_t_max: float
    pi_x: "AxisPoint | None" = None


class ElementTrack:
    """Cyclic representatives and lengths of phi^k(g) in the train-track tree."""

    def __init__(self, axis: "Axis", g: GroupWord):
        self.axis = axis
        c, _ = cyclic_reduce(axis.graph, g)
        if c.is_elliptic():
            raise GbsError("track: element is elliptic")
        self.cyclics: dict[int, CyclicWord] = {0: c}
        self.lo = 0
        self.hi = 0

    def ensure(self, k: int) -> None:
        while self.hi < k:
            self.cyclics[self.hi + 1] = self.axis._step(self.cyclics[self.hi], +1)
            self.hi += 1
        while self.lo > k:
            self.cyclics[self.lo - 1] = self.axis._step(self.cyclics[self.lo], -1)
            self.lo -= 1

    def cyclic(self, k: int) -> CyclicWord:
        self.ensure(k)
        return self.cyclics[k]

    def length(self, k: int) -> float:
        return translation_length(self.axis.graph, self.cyclic(k))

    def length_at(self, t: float) -> float:
        """Log-linear interpolation between consecutive powers."""
        s = t / self.axis.log_lam
        k = math.floor(s)
        u = s - k
        if u < 1e-12:
            return self.length(k)
        a, b = self.length(k), self.length(k + 1)
        return a ** (1.0 - u) * b ** u

    def leg_plus(self, k: int) -> float:
        return self.axis.tt.legality_ratio(self.cyclic(k))

    def leg_minus(self, k: int) -> float:
        loop = cyclic_to_loop(self.axis.graph, self.cyclic(k))
        based = self.axis._rebase(loop)
        w = self.axis.tt_minus.domain.concretize(based)
        c, _ = cyclic_reduce(self.axis.tt_minus.graph, w)
        return self.axis.tt_minus.legality_ratio(c)


class Axis:
    """L_phi through the train-track tree, with closest-point projection data."""

    def __init__(self, tt_plus: TrainTrackMap, tt_minus: TrainTrackMap,
                 phi: Substitution, phi_inv: Substitution):
        self.tt = tt_plus
        self.tt_minus = tt_minus
        self.phi = phi
        self.phi_inv = phi_inv
        self.lam = tt_plus.lam
        self.lam_minus = tt_minus.lam
        self.log_lam = math.log(self.lam)
        ref = tt_plus.domain.ref
        if set(ref.graph.edges) != set(tt_plus.graph.edges):
            raise GbsError("axis expects the train-track tree to be the reference")
        self._tracks: dict = {}
        self._cands: list[Candidate] | None = None
        self._cand_tracks: list[ElementTrack] | None = None

    @property
    def graph(self):
        return self.tt.graph

    def _rebase(self, loop: GroupWord) -> GroupWord:
        pres = self.tt.domain.pres
        if loop.base == pres.base:
            return loop
        from .words import concat, inverse
        tau = pres.tree_path[loop.base]
        return concat(self.graph, tau, loop, inverse(self.graph, tau))

    def _step(self, c: CyclicWord, sign: int) -> CyclicWord:
        loop = self._rebase(cyclic_to_loop(self.graph, c))
        sub = self.phi if sign > 0 else self.phi_inv
        return cyclic_reduce(self.graph, sub.apply(loop))[0]

    def track(self, g: GroupWord) -> ElementTrack:
        key = (g.base, g.letters)
        if key not in self._tracks:
            self._tracks[key] = ElementTrack(self, g)
        return self._tracks[key]

    def grid(self, cfg: AxisConfig, t_lo: float, t_hi: float) -> list[float]:
        delta = cfg.delta if cfg.delta else self.log_lam / 8.0
        n0 = math.floor(t_lo / delta)
        n1 = math.ceil(t_hi / delta)
        return [j * delta for j in range(n0, n1 + 1)]

    def point(self, t: float) -> "AxisPoint":
        n = round(t / self.log_lam)
        return AxisPoint(self, t, n, t - n * self.log_lam)

    def translate(self, n: int) -> MarkedGraph:
        """The marked graph T.phi^n (volume-1 PF metric throughout)."""
        m = self.tt.domain
        for _ in range(abs(n)):
            m = twist(m, self.phi if n > 0 else self.phi_inv,
                      self.phi_inv if n > 0 else self.phi)
        return m

    # -- exponents and element projection -----------------------------------

    def _extreme_good(self, good, size, cfg: AxisConfig, sign: int) -> int:
        """min (sign=-1) or max (sign=+1) k with good(k), searched outward from 0.

        Legality dies out in the `sign` direction (Britton growth), so after
        `search_gap` consecutive failures past the best hit, or once words
        exceed the budget, the extremum found is taken as the answer.
        """
        k = 0
        while not good(k):
            k -= sign
            if k < cfg.k_min or k > cfg.k_max:
                raise WindowExhausted("legality threshold not crossed in the window")
            if size(k) > cfg.word_budget:
                raise WindowExhausted("word budget exceeded before the threshold")
        best = k
        misses = 0
        k += sign
        while cfg.k_min <= k <= cfg.k_max and misses <= cfg.search_gap:
            if size(k) > cfg.word_budget:
                break
            if good(k):
                best = k
                misses = 0
            else:
                misses += 1
            k += sign
        return best

    def legality_exponents(self, g: GroupWord, cfg: AxisConfig) -> ExponentData:
        eps = self._eps0(cfg)
        tr = self.track(g)

        def size(k: int) -> int:
            return len(tr.cyclic(k).edges)

        k_plus = self._extreme_good(lambda k: tr.leg_plus(k) >= eps, size, cfg, -1)
        k_minus = self._extreme_good(lambda k: tr.leg_minus(k) >= eps, size, cfg, +1)
        return ExponentData(k_plus, k_minus, k_plus * self.log_lam)

    def theta_of_element(self, g: GroupWord, cfg: AxisConfig) -> ThetaData:
        exp = self.legality_exponents(g, cfg)
        tr = self.track(g)
        pad = cfg.window_pad * self.log_lam
        ts = self.grid(cfg, exp.t0 - pad, exp.t0 + pad)
        vals = [tr.length_at(t) for t in ts]
        vmin = min(vals)
        argmin = [t for t, v in zip(ts, vals) if v <= vmin * (1 + 1e-12)]
        return ThetaData(min(argmin), max(argmin), max(argmin) - min(argmin),
                         vmin, exp.t0)

    # -- tree projection ------------------------------------------------------

    def candidate_tracks(self) -> list[ElementTrack]:
        if self._cand_tracks is None:
            self._cands = enumerate_candidates(self.tt.domain)
            self._cand_tracks = [self.track(self._rebase(
                cyclic_to_loop(self.graph, c.cyclic))) for c in self._cands]
        return self._cand_tracks

    def pair_distance(self, dt: float) -> float:
        """d_lip(T_s, T_{s+dt}); translation-invariant along the axis."""
        if abs(dt) < 1e-15:
            return 0.0
        best = 0.0
        for tr in self.candidate_tracks():
            best = max(best, tr.length_at(dt) / tr.length(0))
        return math.log(best)

    def project_tree(self, x: MarkedGraph, cfg: AxisConfig) -> ProjectionData:
        x = normalize_volume(x)
        cands = enumerate_candidates(x)
        if not cands:
            raise GbsError("project_tree: no candidates")
        tracks = []
        for c in cands:
            tracks.append((self.track(c.abstract), c.length))
        seed_exp = self.legality_exponents(cands[0].abstract, cfg)
        pad = cfg.window_pad * self.log_lam
        ts = self.grid(cfg, seed_exp.t0 - pad, seed_exp.t0 + pad)

        def d_at(t: float) -> float:
            return math.log(max(tr.length_at(t) / lx for tr, lx in tracks))

        vals = [d_at(t) for t in ts]
        vmin = min(vals)
        argmin = [t for t, v in zip(ts, vals) if v <= vmin + 1e-12]
        t_x = argmin[len(argmin) // 2]
        return ProjectionData(t_x, vmin, min(argmin), max(argmin), self.point(t_x))

    # -- epsilon0 ---------------------------------------------------------------

    def estimate_epsilon0(self, cfg: AxisConfig, sample: list[GroupWord] | None = None):
        """Largest eps with min_g max(LEG_f(phi^N g, T), LEG_f-(phi^-N g, T-)) >= eps,
        over N up to the cap; returns (eps0, N)."""
        if sample is None:
            rng = random.Random(cfg.seed)
            sample = sample_loxodromics(self, rng, cfg.n_samples)
        best = (0.0, 0)
        for n in range(cfg.eps_n_cap + 1):
            eps = min(max(self.track(g).leg_plus(n), self.track(g).leg_minus(-n))
                      for g in sample)
            if eps > best[0]:
                best = (eps, n)
        return best

    def _eps0(self, cfg: AxisConfig) -> float:
        if cfg.epsilon0 is None:
            cfg.epsilon0 = max(1e-6, self.estimate_epsilon0(cfg)[0])
        return cfg.epsilon0


@dataclass
class AxisPoint:
    axis: Axis
    t: float
    n: int
    offset: float      # t - n log(lambda)

    def realize(self) -> MarkedGraph:
        return self.axis.translate(self.n)

    def length_of(self, g: GroupWord) -> float:
        return self.axis.track(g).length_at(self.t)


def sample_loxodromics(axis: Axis, rng, count: int, size: int = 5) -> list[GroupWord]:
    ref = axis.tt.domain.ref
    out = []
    guard = 0
    while len(out) < count and guard < 40 * count:
        guard += 1
        w = random_loop(ref, rng, rng.randint(2, size + 2))
        if translation_length(axis.graph, w) > 0:
            out.append(w)
    if len(out) < count:
        raise GbsError("could not sample enough loxodromic classes")
    return out


# -- experiment harness ---------------------------------------------------------


@dataclass
class BallRow:
    ball: int
    radius: float
    d_axis: float
    n_points: int
    t_low: float
    t_high: float
    diam: float


@dataclass
class ExperimentReport:
    rows: list[BallRow]
    defect_c1: float
    defect_c2: float
    sandwich_c: float
    sandwich_residuals: list[float]
    params: dict

    def to_csv(self) -> str:
        head = "ball,radius,d_axis,n_points,t_low,t_high,diam"
        lines = [head]
        for r in self.rows:
            lines.append(f"{r.ball},{r.radius:.9g},{r.d_axis:.9g},{r.n_points},"
                         f"{r.t_low:.9g},{r.t_high:.9g},{r.diam:.9g}")
        return "\n".join(lines) + "\n"


def sandwich_fit(axis: Axis, cfg: AxisConfig, sample: list[GroupWord] | None = None):
    """Fit one constant C making both floor-power estimates hold over the window."""
    rng = random.Random(cfg.seed + 101)
    if sample is None:
        sample = sample_loxodromics(axis, rng, cfg.n_samples)
    log_lam = axis.log_lam
    c_fit = 1.0
    residuals = []
    for g in sample:
        exp = axis.legality_exponents(g, cfg)
        tr = axis.track(g)
        base = tr.length_at(exp.t0)
        for t in axis.grid(cfg, exp.t0 - 6 * log_lam, exp.t0 + 6 * log_lam):
            if t >= exp.t0:
                expo = math.floor((t - exp.t0) / log_lam)
                expect = (axis.lam ** expo) * base
            else:
                expo = math.floor((exp.t0 - t) / log_lam)
                expect = (axis.lam_minus ** expo) * base
            ratio = tr.length_at(t) / expect
            residuals.append(math.log(ratio))
            c_fit = max(c_fit, ratio, 1.0 / ratio)
    return c_fit, residuals


def _one_ball(axis: Axis, cfg: AxisConfig, b: int):
    """One outward ball: (row or None, c1 contribution, c2 contribution)."""
    base = axis.tt.domain
    pad = cfg.window_pad * axis.log_lam
    y = random_deform(base, cfg.deform_steps, cfg.seed * 7919 + b)
    try:
        proj_y = axis.project_tree(y, cfg)
    except (WindowExhausted, GbsError):
        return None, 0.0, 0.0
    if proj_y.d_min <= 1e-9:
        return None, 0.0, 0.0          # on the axis: outward ball never disjoint
    radius = cfg.radius_fraction * proj_y.d_min
    ts = [proj_y.t_x]
    c1 = c2 = 0.0
    for i in range(cfg.x_per_ball):
        x = random_deform(y, 2, cfg.seed * 104729 + 31 * b + i)
        try:
            d_yx = lipschitz_distance(y, x).d_lip
            if d_yx >= radius:
                continue
            proj_x = axis.project_tree(x, cfg)
        except (WindowExhausted, GbsError):
            continue
        ts.append(proj_x.t_x)
        # defect of the reverse projection inequality: d(Y,X) >= d(Y, pi(X)) - c
        d_y_pix = _distance_to_point(axis, y, proj_x.t_x, cfg)
        c2 = max(c2, d_y_pix - d_yx)
    # defect of the additive projection inequality, sampled beyond the window
    for dt in (1.5 * pad, -1.5 * pad, 2.5 * pad, -2.5 * pad):
        t = proj_y.t_x + dt
        d_y_t = _distance_to_point(axis, y, t, cfg)
        gap = proj_y.d_min + axis.pair_distance(t - proj_y.t_x) - d_y_t
        c1 = max(c1, gap)
    row = BallRow(b, radius, proj_y.d_min, len(ts),
                  min(ts), max(ts), max(ts) - min(ts))
    return row, c1, c2


_POOL_STATE: dict = {}


def _pool_init(axis: Axis, cfg: AxisConfig) -> None:
    _POOL_STATE["axis"] = axis
    _POOL_STATE["cfg"] = cfg


def _pool_ball(b: int):
    return _one_ball(_POOL_STATE["axis"], _POOL_STATE["cfg"], b)


def contraction_experiment(axis: Axis, cfg: AxisConfig,
                           workers: int = 1) -> ExperimentReport:
    """Projected-diameter statistics for outward balls disjoint from the axis,
    plus empirical defect constants for the two projection inequalities.

    Balls are independently seeded, so results are deterministic for any
    worker count; workers > 1 fans them out over a process pool.
    """
    eps = axis._eps0(cfg)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                                 initargs=(axis, cfg)) as pool:
            outcomes = list(pool.map(_pool_ball, range(cfg.n_balls),
                                     chunksize=max(1, cfg.n_balls // (4 * workers))))
    else:
        outcomes = [_one_ball(axis, cfg, b) for b in range(cfg.n_balls)]
    rows = [row for row, _, _ in outcomes if row is not None]
    c1 = max((x for _, x, _ in outcomes), default=0.0)
    c2 = max((x for _, _, x in outcomes), default=0.0)
    c_fit, resid = sandwich_fit(axis, cfg)
    params = {"epsilon0": eps, "delta": cfg.delta or axis.log_lam / 8,
              "n_balls": cfg.n_balls, "x_per_ball": cfg.x_per_ball,
              "seed": cfg.seed, "lambda": axis.lam, "lambda_minus": axis.lam_minus}
    return ExperimentReport(rows, c1, c2, c_fit, resid, params)


def _distance_to_point(axis: Axis, x: MarkedGraph, t: float, cfg: AxisConfig) -> float:
    cands = enumerate_candidates(x)
    best = 0.0
    for c in cands:
        best = max(best, axis.track(c.abstract).length_at(t) / c.length)
    return math.log(best)
