"""Ellipsoid geometry and seeded layout placement for the stream generators.

Minority class regions are axis-aligned ellipsoids in the unit hypercube
[0,1]^5 (equal radii by default, so they are balls).  The old generator keeps
minority ellipsoids pairwise disjoint and lets the majority fill the
complement of their (1-beta) cores; the new generator gives every class an
ellipsoid and places the minorities so that each one overlaps the majority
and the minorities overlap pairwise.  All placement is rejection sampling driven by the config seed, with
bounded budgets that raise LayoutError (reporting the attempt count) instead
of looping forever.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import (
    N_ATTRIBUTES,
    ROLE_MAJORITY,
    ROLE_MINORITY,
    ValidatedConfig,
)

# island geometry for rare examples; anchors live in the shell between
# RARE_DMIN_FACTOR and RARE_DMAX_FACTOR own-radii beyond the cluster surface.
# The outer bound keeps the shell wide enough that islands never pile up into
# a dense learnable ring of their own
RARE_ISLAND_RADIUS = 0.02
RARE_GROUP_SIZES = (1, 2, 3)
RARE_DMIN_FACTOR = 1.5
RARE_DMAX_FACTOR = 4.0

# heterogeneous (multi-sub-cluster) minority layouts draw their sub-clusters
# from one shared territory ball around the minority centers; initial layouts
# keep every pair of sub-clusters disjoint, while drift targets only enforce
# same-class disjointness, so fragmenting classes may crowd each other there
POCKET_RADIUS_FACTOR = 1.75

# split targets land two to four sub-cluster radii out from the center they
# fragment, and inside a tighter shared pocket than moves use: the pocket
# selects the part of each offset band that faces the sibling minority, so
# fragments of different classes interleave deeply enough that single trees
# shed whole minority classes while the bagging vote keeps both partly covered
SPLIT_OFFSET_MIN = 2.0
SPLIT_OFFSET_MAX = 4.0
SPLIT_POCKET_FACTOR = 1.36

# new-generator constants
NEW_MAJORITY_RADIUS = 0.40
NEW_MINORITY_RING = 0.6  # minority centers sit at 0.6 * radius from the cube center

_PLACEMENT_BUDGET = 20_000
_PATH_STEPS = 101  # 1% progress increments for trajectory checks


class LayoutError(RuntimeError):
    """Placement rejection budget exhausted or impossible layout."""


@dataclass(frozen=True)
class Ellipsoid:
    """Axis-aligned ellipsoid: inside iff sum(((p - c) / r)^2) <= 1."""

    center: np.ndarray
    radii: np.ndarray

    def scaled_norm(self, points: np.ndarray) -> np.ndarray:
        d = (np.asarray(points, dtype=float) - self.center) / self.radii
        return np.sqrt(np.sum(d * d, axis=-1))

    def contains(self, points: np.ndarray, scale: float = 1.0) -> np.ndarray:
        return self.scaled_norm(points) <= scale

    def surface_distance(self, point: np.ndarray) -> float:
        """Signed distance to the surface; exact for balls, scaled otherwise."""
        return float((self.scaled_norm(point) - 1.0) * np.min(self.radii))

    def volume(self) -> float:
        # unit 5-ball volume is 8*pi^2/15
        return float(8.0 * np.pi**2 / 15.0 * np.prod(self.radii))


# ── sampling primitives ─────────────────────────────────────────────────────


def sample_unit_ball(rng: np.random.Generator, n: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    """Uniform points in the spherical shell lo <= |z| <= hi of the unit ball.

    Direction from a normalized Gaussian draw, radius from the inverse-CDF of
    the shell volume: s = (lo^5 + u * (hi^5 - lo^5))^(1/5).
    """
    z = rng.standard_normal((n, N_ATTRIBUTES))
    norms = np.linalg.norm(z, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    z /= norms
    u = rng.random(n)
    s = (lo**N_ATTRIBUTES + u * (hi**N_ATTRIBUTES - lo**N_ATTRIBUTES)) ** (1.0 / N_ATTRIBUTES)
    return z * s[:, None]


GAUSSIAN_ATTEMPT_CAP = 1000


def sample_gaussian_in_ellipsoid(
    e: Ellipsoid, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, int]:
    """Gaussian(center, radii/3) truncated to the ellipsoid by resampling.

    Points still outside after GAUSSIAN_ATTEMPT_CAP redraws fall back to the
    center; the second return value counts those fallbacks.
    """
    pts = e.center + rng.standard_normal((n, N_ATTRIBUTES)) * (e.radii / 3.0)
    bad = ~e.contains(pts)
    attempts = 0
    while bad.any() and attempts < GAUSSIAN_ATTEMPT_CAP:
        k = int(bad.sum())
        pts[bad] = e.center + rng.standard_normal((k, N_ATTRIBUTES)) * (e.radii / 3.0)
        bad = ~e.contains(pts)
        attempts += 1
    fallbacks = int(bad.sum())
    if fallbacks:
        pts[bad] = e.center
    return pts, fallbacks


def sample_in_ellipsoid(
    e: Ellipsoid, rng: np.random.Generator, distribution: str = "uniform"
) -> np.ndarray:
    """One point from the ellipsoid under the given distribution."""
    if distribution == "gaussian":
        pts, _ = sample_gaussian_in_ellipsoid(e, rng, 1)
        return pts[0]
    return e.center + sample_unit_ball(rng, 1)[0] * e.radii


# ── layouts ─────────────────────────────────────────────────────────────────


@dataclass
class ClassGeometry:
    """Current sub-cluster set of one class: (k,5) centers/radii, (k,) weights."""

    role: str
    centers: np.ndarray
    radii: np.ndarray
    weights: np.ndarray

    def ellipsoid(self, j: int) -> Ellipsoid:
        return Ellipsoid(self.centers[j], self.radii[j])

    @property
    def n_clusters(self) -> int:
        return self.centers.shape[0]


@dataclass
class Layout:
    """Seeded stationary geometry plus drift targets drawn at config time."""

    generator: str
    distribution: str
    beta: float
    classes: tuple[ClassGeometry, ...]
    split_targets: dict[int, np.ndarray] = field(default_factory=dict)
    move_targets: dict[int, np.ndarray] = field(default_factory=dict)
    placement_attempts: int = 0

    def minority_indices(self) -> list[int]:
        return [i for i, c in enumerate(self.classes) if c.role == ROLE_MINORITY]


def _balls_disjoint(c1, r1: float, c2, r2: float) -> bool:
    return float(np.linalg.norm(np.asarray(c1) - np.asarray(c2))) >= r1 + r2


def subcluster_radius(radius: float, n_subclusters: int) -> float:
    """Volume-preserving decomposition: each of n parts keeps total 5-d volume."""
    return radius * n_subclusters ** (-1.0 / N_ATTRIBUTES)


def _place_disjoint(
    rng: np.random.Generator,
    r: float,
    placed: list[tuple[np.ndarray, float]],
    budget_state: list[int],
) -> np.ndarray:
    """Draw one ball center uniformly in the cube, disjoint from placed balls.

    Early attempts demand a comfortable gap to every placed ball; the demand
    decays to plain disjointness as rejections accumulate, so generous
    separation comes first and tight layouts still resolve.  Raises
    LayoutError when the shared budget runs out.
    """
    lo, hi = r, 1.0 - r
    if lo >= hi:
        raise LayoutError(f"radius {r:g} does not fit inside the unit cube")
    attempt = 0
    while True:
        if budget_state[0] >= _PLACEMENT_BUDGET:
            raise LayoutError(
                f"placement rejection budget exhausted after {budget_state[0]} attempts"
            )
        budget_state[0] += 1
        attempt += 1
        if attempt <= 400:
            margin = r
        elif attempt <= 1200:
            margin = 0.5 * r
        else:
            margin = 0.0
        c = rng.uniform(lo, hi, N_ATTRIBUTES)
        if all(_balls_disjoint(c, r + margin, pc, pr) for pc, pr in placed):
            return c


def _random_orthonormal_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    u = rng.standard_normal(N_ATTRIBUTES)
    u /= np.linalg.norm(u)
    v = rng.standard_normal(N_ATTRIBUTES)
    v -= u * (u @ v)
    v /= np.linalg.norm(v)
    return u, v


def _place_ring(rng: np.random.Generator, m: int, r: float, budget_state: list[int]) -> list[np.ndarray]:
    """Centers of m mutually disjoint balls on a ring around the cube center.

    The ring radius makes adjacent balls just clear of each other (5% margin),
    which keeps the minority regions adjacent in the middle of the attribute
    space; the random plane and phase come from the seed.  Rejected until all
    balls fit inside the cube.
    """
    s = 1.05 * r / np.sin(np.pi / m)
    while True:
        if budget_state[0] >= _PLACEMENT_BUDGET:
            raise LayoutError(
                f"placement rejection budget exhausted after {budget_state[0]} attempts "
                f"(ring of {m} radius-{r:g} regions does not fit)"
            )
        budget_state[0] += 1
        u, v = _random_orthonormal_pair(rng)
        th0 = rng.uniform(0.0, 2.0 * np.pi)
        centers = []
        ok = True
        for j in range(m):
            th = th0 + 2.0 * np.pi * j / m
            c = 0.5 + s * (np.cos(th) * u + np.sin(th) * v)
            if not np.all((c >= r) & (c <= 1.0 - r)):
                ok = False
                break
            centers.append(c)
        if ok:
            return centers


def _place_old_minorities(
    cfg: ValidatedConfig,
    rng: np.random.Generator,
    budget: list[int],
    placed: list[tuple[np.ndarray, float]],
) -> dict[int, np.ndarray]:
    """Sub-cluster centers for every minority class, keyed by class index.

    One full-radius parent region per class is placed first (independent
    rejection placement; a symmetric ring around the cube center is the
    fallback when the cube cannot keep the parents apart).  Single-cluster
    classes live at their parent.  Classes born as several sub-clusters draw
    them from the shared pocket around the parent centroid instead; birth
    sub-clusters stay disjoint from everything already placed, including
    other classes.
    """
    minos = [(i, cfg.classes[i]) for i in cfg.minority_indices]
    r_parent = cfg.radius
    parents: list[np.ndarray] = []
    trial_budget = [0]
    try:
        for _ in minos:
            c = _place_disjoint(rng, r_parent, [(p, r_parent) for p in parents], trial_budget)
            parents.append(c)
        budget[0] += trial_budget[0]
    except LayoutError:
        # the exhausted trial budget stays out of the shared counter so the
        # fallback gets a real allowance; total work is still bounded
        if len(minos) < 2:
            raise
        parents = _place_ring(rng, len(minos), r_parent, budget)

    pocket_c = np.mean(np.stack(parents), axis=0)
    pocket_r = POCKET_RADIUS_FACTOR * cfg.radius
    centers: dict[int, np.ndarray] = {}
    for (i, spec), parent in zip(minos, parents):
        n_sub = spec.n_subclusters
        r = subcluster_radius(cfg.radius, n_sub)
        if n_sub == 1:
            centers[i] = parent[None, :]
            placed.append((parent, r))
            continue
        arr = np.empty((n_sub, N_ATTRIBUTES))
        for j in range(n_sub):
            arr[j] = _pocket_draw(rng, pocket_c, pocket_r, r, placed, budget)
            placed.append((arr[j], r))
        centers[i] = arr
    return centers


def _pocket_draw(
    rng: np.random.Generator,
    pocket_c: np.ndarray,
    pocket_r: float,
    r: float,
    clear_of: list[tuple[np.ndarray, float]],
    budget: list[int],
) -> np.ndarray:
    """One sub-cluster center inside the shared pocket, clear of `clear_of`."""
    while True:
        if budget[0] >= _PLACEMENT_BUDGET:
            raise LayoutError(
                f"placement rejection budget exhausted after {budget[0]} attempts"
            )
        budget[0] += 1
        c = pocket_c + sample_unit_ball(rng, 1)[0] * pocket_r
        if not np.all((c >= r) & (c <= 1.0 - r)):
            continue
        if all(_balls_disjoint(c, r, oc, orr) for oc, orr in clear_of):
            return c


def build_layout(cfg: ValidatedConfig, rng: np.random.Generator | None = None) -> Layout:
    """Stationary layout plus split/move targets, purely from config + seed."""
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed).spawn(2)[0]))

    budget = [0]
    placed: list[tuple[np.ndarray, float]] = []
    geoms: list[ClassGeometry] = []

    if cfg.generator == "new":
        majority_e = Ellipsoid(
            np.full(N_ATTRIBUTES, 0.5), np.full(N_ATTRIBUTES, NEW_MAJORITY_RADIUS)
        )
        u, v = _random_orthonormal_pair(rng)
        theta0 = rng.uniform(0.0, 2.0 * np.pi)
        ring = NEW_MINORITY_RING * cfg.radius
        minority_centers = []
        m = len(cfg.minority_indices)
        for j in range(m):
            th = theta0 + 2.0 * np.pi * j / max(m, 1)
            minority_centers.append(majority_e.center + ring * (np.cos(th) * u + np.sin(th) * v))

    old_centers: dict[int, np.ndarray] = {}
    if cfg.generator == "old":
        old_centers = _place_old_minorities(cfg, rng, budget, placed)

    mino_seen = 0
    for i, spec in enumerate(cfg.classes):
        if spec.role == ROLE_MAJORITY:
            if cfg.generator == "old":
                geoms.append(
                    ClassGeometry(
                        role=ROLE_MAJORITY,
                        centers=np.empty((0, N_ATTRIBUTES)),
                        radii=np.empty((0, N_ATTRIBUTES)),
                        weights=np.empty((0,)),
                    )
                )
            else:
                geoms.append(
                    ClassGeometry(
                        role=ROLE_MAJORITY,
                        centers=majority_e.center[None, :].copy(),
                        radii=majority_e.radii[None, :].copy(),
                        weights=np.ones(1),
                    )
                )
            continue

        n_sub = spec.n_subclusters
        r = subcluster_radius(cfg.radius, n_sub)
        centers = np.empty((n_sub, N_ATTRIBUTES))
        if cfg.generator == "old":
            centers[:] = old_centers[i]
        else:
            base = minority_centers[mino_seen]
            mino_seen += 1
            if n_sub == 1:
                centers[0] = base
            else:
                own = []
                for j in range(n_sub):
                    attempt = 0
                    while True:
                        if budget[0] >= _PLACEMENT_BUDGET:
                            raise LayoutError(
                                f"placement rejection budget exhausted after {budget[0]} attempts"
                            )
                        budget[0] += 1
                        attempt += 1
                        c = base + rng.uniform(-1.5 * cfg.radius, 1.5 * cfg.radius, N_ATTRIBUTES)
                        inside_cube = np.all((c >= r) & (c <= 1.0 - r))
                        inside_majority = majority_e.contains(c, scale=0.9)
                        if (
                            inside_cube
                            and inside_majority
                            and all(_balls_disjoint(c, r, pc, pr) for pc, pr in own)
                        ):
                            own.append((c, r))
                            centers[j] = c
                            break
        geoms.append(
            ClassGeometry(
                role=ROLE_MINORITY,
                centers=centers,
                radii=np.full((n_sub, N_ATTRIBUTES), r),
                weights=np.full(n_sub, 1.0 / n_sub),
            )
        )

    layout = Layout(
        generator=cfg.generator,
        distribution=cfg.distribution,
        beta=cfg.borderline_width,
        classes=tuple(geoms),
    )

    # geometric drift targets are drawn here, at config time, from the same rng
    for d in cfg.drifts:
        targets = _drift_targets(d.target, cfg)
        if d.kind == "split":
            for ci in targets:
                layout.split_targets[ci] = _place_split_targets(
                    rng, layout, cfg, ci, d.to_value["n_subclusters"], budget
                )
        elif d.kind == "move":
            for ci in targets:
                layout.move_targets[ci] = _place_move_targets(rng, layout, cfg, ci, budget)
    layout.placement_attempts = budget[0]
    return layout


def _drift_targets(target: str, cfg: ValidatedConfig) -> list[int]:
    if target == "all_minority":
        return list(cfg.minority_indices)
    return [i for i, c in enumerate(cfg.classes) if c.name == target]


def _minority_pocket(layout: Layout, cfg: ValidatedConfig) -> tuple[np.ndarray, float]:
    """Center and radius of the shared territory heterogeneous layouts draw from."""
    minos = layout.minority_indices()
    all_centers = np.concatenate([layout.classes[i].centers for i in minos], axis=0)
    return all_centers.mean(axis=0), POCKET_RADIUS_FACTOR * cfg.radius


def _place_split_targets(
    rng: np.random.Generator,
    layout: Layout,
    cfg: ValidatedConfig,
    class_idx: int,
    n_sub: int,
    budget: list[int],
) -> np.ndarray:
    """Final sub-cluster centers for a split, drawn from the shared pocket.

    Targets keep a distance of 2-4 sub-cluster radii from the origin center
    they fragment. Only same-class disjointness is enforced: every
    fragmenting class crowds into the territory around the original minority
    regions, so sub-clusters of different classes may end up touching there.
    """
    pocket_c, _ = _minority_pocket(layout, cfg)
    pocket_r = SPLIT_POCKET_FACTOR * cfg.radius
    origins = layout.classes[class_idx].centers
    r_sub = subcluster_radius(cfg.radius, n_sub)
    targets: list[tuple[np.ndarray, float]] = []
    for j in range(n_sub):
        while True:
            if budget[0] >= _PLACEMENT_BUDGET:
                raise LayoutError(
                    f"placement rejection budget exhausted after {budget[0]} attempts"
                )
            budget[0] += 1
            c = pocket_c + sample_unit_ball(rng, 1)[0] * pocket_r
            if not np.all((c >= r_sub) & (c <= 1.0 - r_sub)):
                continue
            d = min(float(np.linalg.norm(c - o)) for o in origins)
            if not (SPLIT_OFFSET_MIN * r_sub <= d <= SPLIT_OFFSET_MAX * r_sub):
                continue
            if all(_balls_disjoint(c, r_sub, oc, orr) for oc, orr in targets):
                targets.append((c, r_sub))
                break
    return np.stack([c for c, _ in targets])


def _place_move_targets(
    rng: np.random.Generator,
    layout: Layout,
    cfg: ValidatedConfig,
    class_idx: int,
    budget: list[int],
) -> np.ndarray:
    """New centers for every sub-cluster, drawn from the shared pocket.

    Sub-clusters move synchronously along straight lines, so same-class
    disjointness is checked at matching 1% progress increments along the
    paths, not just at the endpoints.
    """
    g = layout.classes[class_idx]
    k = g.n_clusters
    r = float(np.max(g.radii[0])) if k else 0.0
    pocket_c, pocket_r = _minority_pocket(layout, cfg)
    ps = np.linspace(0.0, 1.0, _PATH_STEPS)[:, None]
    targets: list[np.ndarray] = []
    for j in range(k):
        src = g.centers[j]
        while True:
            if budget[0] >= _PLACEMENT_BUDGET:
                raise LayoutError(
                    f"placement rejection budget exhausted after {budget[0]} attempts"
                )
            budget[0] += 1
            dst = pocket_c + sample_unit_ball(rng, 1)[0] * pocket_r
            if not np.all((dst >= r) & (dst <= 1.0 - r)):
                continue
            path = src[None, :] + ps * (dst - src)[None, :]
            ok = True
            for jj in range(len(targets)):
                other = g.centers[jj][None, :] + ps * (targets[jj] - g.centers[jj])[None, :]
                if np.min(np.linalg.norm(path - other, axis=1)) < 2.0 * r:
                    ok = False
                    break
            if ok:
                targets.append(dst)
                break
    return np.stack(targets) if targets else np.empty((0, N_ATTRIBUTES))
