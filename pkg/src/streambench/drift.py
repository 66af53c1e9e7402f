"""Incremental drift: deterministic linear interpolation of stream parameters.

Every supported drift is linear in the progress p(t) = clip((t - t_start) /
(t_end - t_start), 0, 1), so the whole time-varying scenario reduces to a set
of (value_at_0, delta, window) triples per parameter group:

  imbalance_ratio  : the class ratio vector
  type_proportion  : each target class's safe/borderline/rare mix
  split            : sub-cluster centers move outward from the origin center
                     while sampling weight shifts from the original cluster to
                     the emerging sub-clusters
  move             : sub-cluster centers interpolate to redrawn targets

``build_plan`` computes that parameterization once from config + layout;
``effective_state`` evaluates it at a scalar t with exact endpoint equality,
and the generator evaluates the same parameterization vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ROLE_MAJORITY, TypeMix, ValidatedConfig, config_hash
from .geometry import Layout, build_layout, subcluster_radius


def progress(t: int | float, t_start: int, t_end: int) -> float:
    """Drift progress in [0, 1]; 0 before the window, 1 from t_end onward."""
    if t <= t_start:
        return 0.0
    if t >= t_end:
        return 1.0
    return (t - t_start) / (t_end - t_start)


def progress_array(ts: np.ndarray, t_start: int, t_end: int) -> np.ndarray:
    return np.clip((ts - t_start) / float(t_end - t_start), 0.0, 1.0)


@dataclass
class LinearGroup:
    """value(t) = base + progress(t) * delta, exact at both endpoints."""

    base: np.ndarray
    delta: np.ndarray
    t_start: int
    t_end: int
    static: bool

    def at(self, t: float) -> np.ndarray:
        if self.static:
            return self.base
        p = progress(t, self.t_start, self.t_end)
        if p == 0.0:
            return self.base
        if p == 1.0:
            return self.base + self.delta
        return self.base + p * self.delta

    def at_array(self, ts: np.ndarray) -> np.ndarray:
        if self.static:
            return np.broadcast_to(self.base, (len(ts),) + self.base.shape)
        p = progress_array(ts, self.t_start, self.t_end)
        return self.base + p.reshape((-1,) + (1,) * self.base.ndim) * self.delta


@dataclass
class ClusterPlan:
    """Time-varying sub-cluster set of one class (fixed radii per cluster)."""

    centers: LinearGroup  # (k, 5)
    radii: np.ndarray  # (k, 5), constant
    weights: LinearGroup  # (k,)


@dataclass
class Plan:
    ratios: LinearGroup  # (n_classes,)
    mixes: tuple[LinearGroup, ...]  # per class, (3,)
    clusters: tuple[ClusterPlan, ...]  # per class


def _static(v: np.ndarray) -> LinearGroup:
    return LinearGroup(base=np.asarray(v, dtype=float), delta=np.zeros_like(v, dtype=float), t_start=0, t_end=1, static=True)


def build_plan(cfg: ValidatedConfig, layout: Layout) -> Plan:
    ratios = _static(np.array([c.ratio for c in cfg.classes]))
    mixes: list[LinearGroup] = [
        _static(np.array(c.type_proportions.as_tuple())) for c in cfg.classes
    ]
    clusters: list[ClusterPlan] = []
    for g in layout.classes:
        clusters.append(
            ClusterPlan(
                centers=_static(g.centers.copy()),
                radii=g.radii.copy(),
                weights=_static(g.weights.copy()),
            )
        )

    for d in cfg.drifts:
        if d.kind == "imbalance_ratio":
            base = np.asarray(d.from_value, dtype=float)
            ratios = LinearGroup(
                base=base,
                delta=np.asarray(d.to_value, dtype=float) - base,
                t_start=d.t_start,
                t_end=d.t_end,
                static=False,
            )
        elif d.kind == "type_proportion":
            base = np.array(d.from_value.as_tuple())
            delta = np.array(d.to_value.as_tuple()) - base
            for ci in _targets(d.target, cfg):
                mixes[ci] = LinearGroup(
                    base=base.copy(), delta=delta.copy(), t_start=d.t_start, t_end=d.t_end, static=False
                )
        elif d.kind == "split":
            n_sub = d.to_value["n_subclusters"]
            for ci in _targets(d.target, cfg):
                g = layout.classes[ci]
                targets = layout.split_targets[ci]
                origin = g.centers[0]
                r_sub = subcluster_radius(cfg.radius, n_sub)
                c0 = np.vstack([origin[None, :], np.tile(origin, (n_sub, 1))])
                dc = np.vstack([np.zeros((1, c0.shape[1])), targets - origin[None, :]])
                radii = np.vstack(
                    [g.radii[0][None, :], np.full((n_sub, c0.shape[1]), r_sub)]
                )
                w0 = np.zeros(n_sub + 1)
                w0[0] = 1.0
                dw = np.full(n_sub + 1, 1.0 / n_sub)
                dw[0] = -1.0
                clusters[ci] = ClusterPlan(
                    centers=LinearGroup(c0, dc, d.t_start, d.t_end, static=False),
                    radii=radii,
                    weights=LinearGroup(w0, dw, d.t_start, d.t_end, static=False),
                )
        elif d.kind == "move":
            for ci in _targets(d.target, cfg):
                g = layout.classes[ci]
                targets = layout.move_targets[ci]
                clusters[ci] = ClusterPlan(
                    centers=LinearGroup(
                        g.centers.copy(), targets - g.centers, d.t_start, d.t_end, static=False
                    ),
                    radii=g.radii.copy(),
                    weights=_static(g.weights.copy()),
                )
    return Plan(ratios=ratios, mixes=tuple(mixes), clusters=tuple(clusters))


def _targets(target: str, cfg: ValidatedConfig) -> list[int]:
    if target == "all_minority":
        return list(cfg.minority_indices)
    return [i for i, c in enumerate(cfg.classes) if c.name == target]


# ── scalar evaluation ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class EffectiveState:
    """Stream parameters in force at one position t (zero-weight clusters pruned)."""

    t: int
    ratios: tuple[float, ...]
    mixes: tuple[TypeMix, ...]
    clusters: tuple[tuple[tuple[tuple[float, ...], tuple[float, ...], float], ...], ...]


_plan_cache: dict[str, tuple[Layout, Plan]] = {}


def plan_for(cfg: ValidatedConfig) -> tuple[Layout, Plan]:
    """Layout + linear plan for a config, cached by config hash."""
    key = config_hash(cfg)
    hit = _plan_cache.get(key)
    if hit is None:
        layout = build_layout(cfg)
        hit = (layout, build_plan(cfg, layout))
        _plan_cache[key] = hit
    return hit


def effective_state(cfg: ValidatedConfig, t: int) -> EffectiveState:
    """Parameters governing example t; exact from/to values at the window edges."""
    _, plan = plan_for(cfg)
    ratios = plan.ratios.at(t)
    s = ratios.sum()
    if abs(s - 1.0) > 1e-12:  # keep window-edge values bit-exact
        ratios = ratios / s
    mixes = tuple(TypeMix(*(float(v) for v in m.at(t))) for m in plan.mixes)
    classes = []
    for cp in plan.clusters:
        centers = cp.centers.at(t)
        weights = cp.weights.at(t)
        entries = []
        for j in range(centers.shape[0]):
            w = float(weights[j])
            if w <= 0.0:
                continue
            entries.append(
                (tuple(float(v) for v in centers[j]), tuple(float(v) for v in cp.radii[j]), w)
            )
        classes.append(tuple(entries))
    return EffectiveState(
        t=t,
        ratios=tuple(float(v) for v in ratios),
        mixes=mixes,
        clusters=tuple(classes),
    )
