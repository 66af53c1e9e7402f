"""Synthetic stream generation.

Examples are drawn chunk-by-chunk with a fixed draw order (class, then type,
then sub-cluster, then coordinates grouped by class and type), so a seed fully
determines the stream.  Coordinates come from the drift plan's linear cluster
parameterization, which makes drifting geometry vectorizable: every center is
base + progress(t) * delta per example.

Example types for minority classes:
  safe        uniform in the (1-beta)-scaled core of a weight-chosen sub-cluster
  borderline  uniform in the band between the (1-beta) core and the (1+beta)
              inflation of the sub-cluster
  rare        small islands (radius RARE_ISLAND_RADIUS) around anchors placed in
              majority territory, in the shell d_min-d_max beyond an own
              sub-cluster's surface; an island holds 1-3 examples before a new
              anchor is drawn

The old generator's majority fills the hypercube complement of the active
minority cores (the (1-beta)-scaled regions), so it presses directly against
the safe zones and floods the borderline bands; the new generator's majority
is an ellipsoid of its own and overlaps the minorities by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .config import (
    LabeledExample,
    N_ATTRIBUTES,
    StreamConfig,
    ValidatedConfig,
    validate_config,
)
from .drift import plan_for
from .geometry import (
    Ellipsoid,
    RARE_DMAX_FACTOR,
    RARE_DMIN_FACTOR,
    RARE_GROUP_SIZES,
    RARE_ISLAND_RADIUS,
    sample_unit_ball,
)

CHUNK = 8192

TYPE_SAFE, TYPE_BORDERLINE, TYPE_RARE = 0, 1, 2
TYPE_NAMES = ("safe", "borderline", "rare")

_REJECT_ROUNDS = 200
_ANCHOR_BUDGET = 100_000
_GAUSS_ROUNDS = 1000


@dataclass
class StreamArrays:
    """Materialized stream: row i is example t = i + 1."""

    x: np.ndarray  # (n, 5) float64
    y: np.ndarray  # (n,) int8 class index
    gen_type: np.ndarray  # (n,) int8, indexes TYPE_NAMES
    class_names: tuple[str, ...]
    stats: dict


def generate_stream_arrays(cfg: ValidatedConfig) -> StreamArrays:
    return _Sampler(cfg).run()


def generate_stream(config: StreamConfig | ValidatedConfig) -> Iterator[LabeledExample]:
    """Single-pass iterator of exactly config.length labeled examples."""
    cfg = config if isinstance(config, ValidatedConfig) else validate_config(config)
    arrays = generate_stream_arrays(cfg)
    x, y, g = arrays.x, arrays.y, arrays.gen_type
    for i in range(len(y)):
        yield LabeledExample(
            t=i + 1,
            x=tuple(float(v) for v in x[i]),
            y=int(y[i]),
            gen_type=TYPE_NAMES[g[i]],
        )


class _Sampler:
    def __init__(self, cfg: ValidatedConfig):
        self.cfg = cfg
        self.layout, self.plan = plan_for(cfg)
        self.rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(cfg.seed).spawn(2)[1])
        )
        self.majority_idx = cfg.majority_index
        self.minority = list(cfg.minority_indices)
        self.beta = cfg.borderline_width
        # rare island state per class: [anchor, examples left on the island]
        self.islands: dict[int, list] = {k: [None, 0] for k in self.minority}
        self.stats = {
            "class_counts": np.zeros(cfg.n_classes, dtype=np.int64),
            "type_counts": np.zeros((cfg.n_classes, 3), dtype=np.int64),
            "gaussian_fallbacks": 0,
            "reject_overflows": 0,
            "anchors_drawn": 0,
        }
        if cfg.generator == "new":
            g = self.layout.classes[self.majority_idx]
            self.majority_e = Ellipsoid(g.centers[0], g.radii[0])
        else:
            self.majority_e = None

    # ── top level ──────────────────────────────────────────────────────

    def run(self) -> StreamArrays:
        n = self.cfg.length
        X = np.empty((n, N_ATTRIBUTES))
        Y = np.empty(n, dtype=np.int8)
        G = np.zeros(n, dtype=np.int8)
        for start in range(0, n, CHUNK):
            m = min(CHUNK, n - start)
            ts = np.arange(start + 1, start + m + 1, dtype=np.float64)
            self._chunk(ts, X[start : start + m], Y[start : start + m], G[start : start + m])
        stats = dict(self.stats)
        stats["class_counts"] = stats["class_counts"].tolist()
        stats["type_counts"] = stats["type_counts"].tolist()
        return StreamArrays(X, Y, G, self.cfg.class_names, stats)

    def _chunk(self, ts, Xo, Yo, Go):
        rng = self.rng
        m = len(ts)
        K = self.cfg.n_classes

        ratios = self.plan.ratios.at_array(ts)
        ratios = ratios / ratios.sum(axis=1, keepdims=True)
        u_class = rng.random(m)
        u_type = rng.random(m)
        u_cluster = rng.random(m)
        y = np.minimum((u_class[:, None] >= np.cumsum(ratios, axis=1)).sum(axis=1), K - 1)

        mix = np.zeros((m, 3))
        mix[:, 0] = 1.0
        for k in self.minority:
            mask = y == k
            if mask.any():
                mix[mask] = self.plan.mixes[k].at_array(ts[mask])
        types = np.minimum((u_type[:, None] >= np.cumsum(mix, axis=1)).sum(axis=1), 2)
        types[y == self.majority_idx] = TYPE_SAFE

        Yo[:] = y.astype(np.int8)
        Go[:] = types.astype(np.int8)
        self.stats["class_counts"] += np.bincount(y, minlength=K)
        for k in range(K):
            self.stats["type_counts"][k] += np.bincount(types[y == k], minlength=3)

        for k in range(K):
            idx = np.nonzero(y == k)[0]
            if len(idx) == 0:
                continue
            if k == self.majority_idx:
                Xo[idx] = self._sample_majority(ts[idx])
                continue
            cp = self.plan.clusters[k]
            tk = ts[idx]
            weights = cp.weights.at_array(tk)  # (g, kc)
            kc = weights.shape[1]
            if kc == 1:
                cl = np.zeros(len(idx), dtype=np.int64)
            else:
                wsum = weights.sum(axis=1, keepdims=True)
                cum = np.cumsum(weights / wsum, axis=1)
                cl = np.minimum((u_cluster[idx][:, None] >= cum).sum(axis=1), kc - 1)
            centers = cp.centers.at_array(tk)[np.arange(len(idx)), cl]  # (g, 5)
            radii = cp.radii[cl]  # (g, 5)
            for typ in (TYPE_SAFE, TYPE_BORDERLINE, TYPE_RARE):
                sel = np.nonzero(types[idx] == typ)[0]
                if len(sel) == 0:
                    continue
                rows = idx[sel]
                if typ == TYPE_SAFE:
                    Xo[rows] = self._sample_safe(k, tk[sel], centers[sel], radii[sel])
                elif typ == TYPE_BORDERLINE:
                    Xo[rows] = self._sample_borderline(k, tk[sel], centers[sel], radii[sel])
                else:
                    Xo[rows] = self._sample_rare(k, tk[sel])

    # ── region sampling ────────────────────────────────────────────────

    def _active_minority_membership(self, pts, ts_rows, scale, skip_class=None):
        """Row mask: point inside any positive-weight minority cluster at its t."""
        bad = np.zeros(len(pts), dtype=bool)
        for k in self.minority:
            if k == skip_class:
                continue
            cp = self.plan.clusters[k]
            C = cp.centers.at_array(ts_rows)  # (g, kc, 5)
            W = cp.weights.at_array(ts_rows)  # (g, kc)
            d = (pts[:, None, :] - C) / cp.radii[None, :, :]
            nrm2 = np.einsum("gkd,gkd->gk", d, d)
            bad |= ((nrm2 <= scale * scale) & (W > 0.0)).any(axis=1)
        return bad

    def _sample_majority(self, tk):
        g = len(tk)
        if self.cfg.generator == "new":
            if self.cfg.distribution == "gaussian":
                return self._gaussian_batch(
                    np.tile(self.majority_e.center, (g, 1)),
                    np.tile(self.majority_e.radii, (g, 1)),
                    scale=1.0,
                )
            ball = sample_unit_ball(self.rng, g)
            return self.majority_e.center + ball * self.majority_e.radii
        # old generator: uniform over the cube minus the active minority cores;
        # exclusion stops at the (1-beta) surface so the borderline band lies
        # in majority territory and safe cores get no protective margin
        core = 1.0 - self.beta
        pts = self.rng.random((g, N_ATTRIBUTES))
        bad = self._active_minority_membership(pts, tk, scale=core)
        rounds = 0
        while bad.any() and rounds < _REJECT_ROUNDS:
            nb = int(bad.sum())
            pts[bad] = self.rng.random((nb, N_ATTRIBUTES))
            bad[bad] = self._active_minority_membership(pts[bad], tk[bad], scale=core)
            rounds += 1
        if bad.any():
            self.stats["reject_overflows"] += int(bad.sum())
        return pts

    def _sample_safe(self, k, tk, centers, radii):
        g = len(tk)
        core = 1.0 - self.beta
        if self.cfg.distribution == "gaussian":
            pts = self._gaussian_batch(centers, radii, scale=core)
        else:
            pts = centers + sample_unit_ball(self.rng, g, 0.0, core) * radii
        # keep safe points out of other minority classes' cores (new generator
        # overlap; also split/move trajectories brushing another class)
        bad = self._active_minority_membership(pts, tk, scale=core, skip_class=k)
        rounds = 0
        while bad.any() and rounds < _REJECT_ROUNDS:
            nb = int(bad.sum())
            if self.cfg.distribution == "gaussian":
                pts[bad] = self._gaussian_batch(centers[bad], radii[bad], scale=core)
            else:
                pts[bad] = centers[bad] + sample_unit_ball(self.rng, nb, 0.0, core) * radii[bad]
            bad[bad] = self._active_minority_membership(
                pts[bad], tk[bad], scale=core, skip_class=k
            )
            rounds += 1
        if bad.any():
            self.stats["reject_overflows"] += int(bad.sum())
        return pts

    def _sample_borderline(self, k, tk, centers, radii):
        g = len(tk)
        lo, hi = 1.0 - self.beta, 1.0 + self.beta
        pts = centers + sample_unit_ball(self.rng, g, lo, hi) * radii
        bad = self._borderline_bad(pts, tk, k)
        rounds = 0
        while bad.any() and rounds < _REJECT_ROUNDS:
            nb = int(bad.sum())
            pts[bad] = centers[bad] + sample_unit_ball(self.rng, nb, lo, hi) * radii[bad]
            bad[bad] = self._borderline_bad(pts[bad], tk[bad], k)
            rounds += 1
        if bad.any():
            self.stats["reject_overflows"] += int(bad.sum())
            pts = np.clip(pts, 0.0, 1.0)
        return pts

    def _borderline_bad(self, pts, tk, k):
        outside_cube = ((pts < 0.0) | (pts > 1.0)).any(axis=1)
        in_foreign_core = self._active_minority_membership(
            pts, tk, scale=1.0 - self.beta, skip_class=k
        )
        return outside_cube | in_foreign_core

    def _gaussian_batch(self, centers, radii, scale):
        """Gaussian(center, scale*radii/3) truncated to the scaled ellipsoid."""
        sigma = radii * (scale / 3.0)
        pts = centers + self.rng.standard_normal(centers.shape) * sigma
        d = (pts - centers) / radii
        bad = np.einsum("gd,gd->g", d, d) > scale * scale
        rounds = 0
        while bad.any() and rounds < _GAUSS_ROUNDS:
            pts[bad] = centers[bad] + self.rng.standard_normal((int(bad.sum()), N_ATTRIBUTES)) * sigma[bad]
            d = (pts - centers) / radii
            bad = np.einsum("gd,gd->g", d, d) > scale * scale
            rounds += 1
        if bad.any():
            self.stats["gaussian_fallbacks"] += int(bad.sum())
            pts[bad] = centers[bad]
        return pts

    # ── rare islands ───────────────────────────────────────────────────

    def _sample_rare(self, k, tk):
        rng = self.rng
        out = np.empty((len(tk), N_ATTRIBUTES))
        state = self.islands[k]
        for i in range(len(tk)):
            if state[1] <= 0:
                state[0] = self._draw_anchor(k, tk[i])
                state[1] = int(rng.integers(RARE_GROUP_SIZES[0], RARE_GROUP_SIZES[-1] + 1))
                self.stats["anchors_drawn"] += 1
            z = rng.standard_normal(N_ATTRIBUTES)
            z /= np.linalg.norm(z)
            s = rng.random() ** (1.0 / N_ATTRIBUTES)
            out[i] = state[0] + z * (s * RARE_ISLAND_RADIUS)
            state[1] -= 1
        return out

    def _draw_anchor(self, k, t):
        """Island anchor in the shell around a weight-chosen own sub-cluster.

        Anchors are volume-uniform in the shell whose surface distance to the
        chosen cluster spans [d_min, d_max] (radius-uniform draws would pile
        the islands against the inner wall, turning them into one dense ring),
        which keeps them in majority territory but bounded to the neighborhood
        of the class they belong to.  The anchor must also keep d_min
        clearance from every other own sub-cluster and stay out of foreign
        minority regions.
        """
        rng = self.rng
        rho = RARE_ISLAND_RADIUS
        cp = self.plan.clusters[k]
        own_w = cp.weights.at(t)
        active = own_w > 0.0
        own_c = cp.centers.at(t)[active]
        own_r = cp.radii[active]
        w = own_w[active]
        r_ref = float(own_r.max()) if own_r.size else 0.0
        d_min = RARE_DMIN_FACTOR * r_ref
        d_max = RARE_DMAX_FACTOR * r_ref
        probs = w / w.sum()
        for _ in range(_ANCHOR_BUDGET):
            j = int(rng.choice(len(probs), p=probs)) if len(probs) > 1 else 0
            z = rng.standard_normal(N_ATTRIBUTES)
            z /= np.linalg.norm(z)
            lo = float(own_r[j].min()) + d_min
            hi = float(own_r[j].min()) + d_max
            s = (lo**N_ATTRIBUTES + rng.random() * (hi**N_ATTRIBUTES - lo**N_ATTRIBUTES)) ** (
                1.0 / N_ATTRIBUTES
            )
            a = own_c[j] + z * s
            if np.any((a < rho) | (a > 1.0 - rho)):
                continue
            if self.majority_e is not None and not self.majority_e.contains(a):
                continue
            # clear of every own cluster surface by d_min
            d = (a - own_c) / own_r
            nrm = np.sqrt(np.einsum("kd,kd->k", d, d))
            if np.any((nrm - 1.0) * own_r.min(axis=1) < d_min):
                continue
            # outside other minority classes (with an island-radius margin)
            clear = True
            for j in self.minority:
                if j == k:
                    continue
                cpj = self.plan.clusters[j]
                Wj = cpj.weights.at(t)
                Cj = cpj.centers.at(t)[Wj > 0.0]
                Rj = cpj.radii[Wj > 0.0]
                dj = (a - Cj) / Rj
                nj = np.sqrt(np.einsum("kd,kd->k", dj, dj))
                if np.any((nj - 1.0) * Rj.min(axis=1) < rho):
                    clear = False
                    break
            if clear:
                return a
        raise RuntimeError(
            f"rare-anchor rejection budget exhausted ({_ANCHOR_BUDGET} attempts, class {k}, t={int(t)})"
        )
