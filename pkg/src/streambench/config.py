"""Scenario configuration: types, validation, and JSON round-trip.

A stream scenario is described by a ``StreamConfig``: an ordered list of
``ClassSpec`` (class 0 is the majority by convention), an optional list of
``DriftSpec`` entries, the generator family, the per-region distribution,
stream length and seed.  ``validate_config`` checks every rule, collects the
complete list of violations, and returns a normalized, frozen config that the
rest of the package consumes.  ``parse`` / ``serialize`` give a canonical JSON
form whose field names mirror the dataclasses one-to-one.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

# ── enumerations ────────────────────────────────────────────────────────────

ROLE_MAJORITY = "majority"
ROLE_MINORITY = "minority"
ROLES = (ROLE_MAJORITY, ROLE_MINORITY)

GENERATORS = ("old", "new")
DISTRIBUTIONS = ("uniform", "gaussian")

DRIFT_KINDS = ("imbalance_ratio", "type_proportion", "split", "move")
# reserved in the kind space but not implemented; validation refuses them
RESERVED_DRIFT_KINDS = ("class_swap", "merge")

TARGET_ALL_MINORITY = "all_minority"

DEFAULT_STATIONARY_LENGTH = 200_000
DEFAULT_DRIFTING_LENGTH = 250_000
DEFAULT_DRIFT_START = 70_000
DEFAULT_DRIFT_END = 100_000
DEFAULT_RADIUS = 0.15
DEFAULT_BORDERLINE_WIDTH = 0.3

N_ATTRIBUTES = 5

_SUM_TOL = 1e-9


class ConfigError(ValueError):
    """Raised by validate_config with the complete list of violations."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config: " + "; ".join(self.errors))


# ── value types ─────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class TypeMix:
    """Proportions of example types generated for one class (sum to 1)."""

    safe: float = 1.0
    borderline: float = 0.0
    rare: float = 0.0

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.safe, self.borderline, self.rare)

    def normalized(self) -> "TypeMix":
        s = self.safe + self.borderline + self.rare
        return TypeMix(self.safe / s, self.borderline / s, self.rare / s)


@dataclass(frozen=True)
class ClassSpec:
    """One class of the stream.

    ratio is the sampling probability of the class; type_proportions controls
    how minority examples are placed (safe core / borderline band / rare
    islands); n_subclusters decomposes the class region into that many
    disjoint ellipsoids from the start of the stream.
    """

    name: str
    role: str
    ratio: float
    type_proportions: TypeMix = field(default_factory=TypeMix)
    n_subclusters: int = 1


@dataclass(frozen=True)
class DriftSpec:
    """One incremental drift applied over [t_start, t_end].

    kind-specific payloads:
      imbalance_ratio : from_value/to_value are full per-class ratio vectors
      type_proportion : from_value/to_value are TypeMix for each target class
      split           : to_value is {"n_subclusters": n}
      move            : no payload (targets are redrawn from the seed)
    """

    kind: str
    target: str = TARGET_ALL_MINORITY
    from_value: object = None
    to_value: object = None
    t_start: int = DEFAULT_DRIFT_START
    t_end: int = DEFAULT_DRIFT_END


@dataclass(frozen=True)
class StreamConfig:
    """Full stream scenario description (see module docstring)."""

    classes: tuple[ClassSpec, ...]
    drifts: tuple[DriftSpec, ...] = ()
    generator: str = "old"
    distribution: str = "uniform"
    length: int | None = None
    seed: int = 0
    radius: float = DEFAULT_RADIUS
    borderline_width: float = DEFAULT_BORDERLINE_WIDTH


@dataclass(frozen=True)
class ValidatedConfig:
    """Normalized, validated scenario; produced only by validate_config."""

    classes: tuple[ClassSpec, ...]
    drifts: tuple[DriftSpec, ...]
    generator: str
    distribution: str
    length: int
    seed: int
    radius: float
    borderline_width: float

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def class_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.classes)

    @property
    def majority_index(self) -> int:
        for i, c in enumerate(self.classes):
            if c.role == ROLE_MAJORITY:
                return i
        raise AssertionError("validated config without majority class")

    @property
    def minority_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.classes) if c.role == ROLE_MINORITY)

    @property
    def has_drift(self) -> bool:
        return len(self.drifts) > 0

    @property
    def drift_window(self) -> tuple[int, int] | None:
        """Envelope of all drift windows, or None for stationary streams."""
        if not self.drifts:
            return None
        return (min(d.t_start for d in self.drifts), max(d.t_end for d in self.drifts))


@dataclass(frozen=True)
class LabeledExample:
    """One stream element: 1-based position, attributes, class, generated type."""

    t: int
    x: tuple[float, ...]
    y: int
    gen_type: str | None = None


# ── validation ──────────────────────────────────────────────────────────────


def _as_ratio_vector(value, n: int, errors: list[str], ctx: str) -> tuple[float, ...] | None:
    if not isinstance(value, (list, tuple)) or len(value) != n:
        errors.append(f"{ctx}: expected a ratio vector of length {n}")
        return None
    try:
        vec = [float(v) for v in value]
    except (TypeError, ValueError):
        errors.append(f"{ctx}: ratio vector has non-numeric entries")
        return None
    return _normalize_ratios(vec, errors, ctx)


def _normalize_ratios(vec: list[float], errors: list[str], ctx: str) -> tuple[float, ...] | None:
    total = sum(vec)
    # percentage shorthand: 80/10/10 means 0.8/0.1/0.1
    if abs(total - 100.0) <= 1e-6 * 100.0:
        vec = [v / 100.0 for v in vec]
        total = sum(vec)
    if any(v <= 0.0 for v in vec):
        errors.append(f"{ctx}: ratios must be positive")
        return None
    if abs(total - 1.0) > _SUM_TOL:
        errors.append(f"{ctx}: ratios sum to {total:g}")
        return None
    return tuple(v / total for v in vec)


def _as_type_mix(value, errors: list[str], ctx: str) -> TypeMix | None:
    if isinstance(value, TypeMix):
        mix = value
    elif isinstance(value, dict):
        extra = set(value) - {"safe", "borderline", "rare"}
        if extra:
            errors.append(f"{ctx}: unknown type keys {sorted(extra)}")
            return None
        try:
            mix = TypeMix(
                float(value.get("safe", 0.0)),
                float(value.get("borderline", 0.0)),
                float(value.get("rare", 0.0)),
            )
        except (TypeError, ValueError):
            errors.append(f"{ctx}: type proportions must be numeric")
            return None
    else:
        errors.append(f"{ctx}: expected a safe/borderline/rare mapping")
        return None
    vals = mix.as_tuple()
    if any(v < 0.0 for v in vals):
        errors.append(f"{ctx}: type proportions must be non-negative")
        return None
    total = sum(vals)
    if abs(total - 100.0) <= 1e-4:
        mix = TypeMix(*(v / 100.0 for v in vals))
        total = sum(mix.as_tuple())
    if abs(total - 1.0) > _SUM_TOL:
        errors.append(f"{ctx}: type proportions sum to {total:g}")
        return None
    return mix.normalized()


def validate_config(config: StreamConfig | dict) -> ValidatedConfig:
    """Check every rule of the scenario description.

    Returns the normalized config; raises ConfigError carrying the complete
    list of violations otherwise.  Pure: identical inputs give identical
    outputs, no global state is read or written.
    """
    if isinstance(config, dict):
        config = parse(json.dumps(config))
    errors: list[str] = []

    classes = tuple(config.classes)
    n = len(classes)
    if n < 2:
        errors.append("at least one majority and one minority class required")

    names = [c.name for c in classes]
    if len(set(names)) != len(names):
        errors.append("duplicate class names")
    if any(not c.name for c in classes):
        errors.append("empty class name")

    majorities = [i for i, c in enumerate(classes) if c.role == ROLE_MAJORITY]
    minorities = [i for i, c in enumerate(classes) if c.role == ROLE_MINORITY]
    for i, c in enumerate(classes):
        if c.role not in ROLES:
            errors.append(f"class {c.name!r}: unknown role {c.role!r}")
    if len(majorities) != 1:
        errors.append(f"exactly one majority class required, found {len(majorities)}")
    if not minorities:
        errors.append("zero minority classes")

    ratios = _normalize_ratios([float(c.ratio) for c in classes], errors, "classes")

    norm_classes: list[ClassSpec] = []
    for i, c in enumerate(classes):
        mix = _as_type_mix(c.type_proportions, errors, f"class {c.name!r}")
        if mix is not None and c.role == ROLE_MAJORITY:
            if mix.borderline > 0.0 or mix.rare > 0.0:
                errors.append(f"class {c.name!r}: majority classes use safe examples only")
        if not isinstance(c.n_subclusters, int) or c.n_subclusters < 1:
            errors.append(f"class {c.name!r}: n_subclusters must be a positive integer")
        if c.role == ROLE_MAJORITY and config.generator == "old" and c.n_subclusters != 1:
            errors.append(f"class {c.name!r}: old-generator majority has no sub-clusters")
        norm_classes.append(
            ClassSpec(
                name=c.name,
                role=c.role,
                ratio=ratios[i] if ratios is not None else float(c.ratio),
                type_proportions=mix if mix is not None else TypeMix(),
                n_subclusters=int(c.n_subclusters) if isinstance(c.n_subclusters, int) else 1,
            )
        )

    if config.generator not in GENERATORS:
        errors.append(f"unknown generator {config.generator!r}")
    if config.distribution not in DISTRIBUTIONS:
        errors.append(f"unknown distribution {config.distribution!r}")
    if config.generator == "old" and config.distribution == "gaussian":
        errors.append("gaussian distribution unsupported with the old generator")

    length = config.length
    if length is None:
        length = DEFAULT_DRIFTING_LENGTH if config.drifts else DEFAULT_STATIONARY_LENGTH
    elif not isinstance(length, int) or length < 1:
        errors.append(f"length must be a positive integer, got {length!r}")
        length = DEFAULT_STATIONARY_LENGTH

    if not isinstance(config.seed, int) or config.seed < 0:
        errors.append(f"seed must be a non-negative integer, got {config.seed!r}")

    radius = float(config.radius)
    if not 0.0 < radius <= 0.5:
        errors.append(f"radius must lie in (0, 0.5], got {radius:g}")
    beta = float(config.borderline_width)
    if not 0.0 <= beta < 1.0:
        errors.append(f"borderline_width must lie in [0, 1), got {beta:g}")

    norm_drifts: list[DriftSpec] = []
    for d in config.drifts:
        norm = _validate_drift(d, norm_classes, minorities, names, length, errors)
        if norm is not None:
            norm_drifts.append(norm)

    # two drifts of the same kind on overlapping targets and windows conflict
    for a in range(len(norm_drifts)):
        for b in range(a + 1, len(norm_drifts)):
            da, db = norm_drifts[a], norm_drifts[b]
            if da.kind != db.kind:
                continue
            if set(_resolve_target(da.target, norm_classes)) & set(
                _resolve_target(db.target, norm_classes)
            ):
                if da.t_start < db.t_end and db.t_start < da.t_end:
                    errors.append(f"conflicting drifts: two {da.kind!r} drifts overlap")

    if errors:
        raise ConfigError(errors)

    return ValidatedConfig(
        classes=tuple(norm_classes),
        drifts=tuple(norm_drifts),
        generator=config.generator,
        distribution=config.distribution,
        length=length,
        seed=int(config.seed),
        radius=radius,
        borderline_width=beta,
    )


def _resolve_target(target: str, classes: list[ClassSpec]) -> tuple[int, ...]:
    if target == TARGET_ALL_MINORITY:
        return tuple(i for i, c in enumerate(classes) if c.role == ROLE_MINORITY)
    return tuple(i for i, c in enumerate(classes) if c.name == target)


def _validate_drift(
    d: DriftSpec,
    classes: list[ClassSpec],
    minorities: list[int],
    names: list[str],
    length: int,
    errors: list[str],
) -> DriftSpec | None:
    ctx = f"drift {d.kind!r}"
    if d.kind in RESERVED_DRIFT_KINDS:
        errors.append(f"{ctx}: unsupported drift kind")
        return None
    if d.kind not in DRIFT_KINDS:
        errors.append(f"{ctx}: unknown drift kind")
        return None

    t_start = DEFAULT_DRIFT_START if d.t_start is None else d.t_start
    t_end = DEFAULT_DRIFT_END if d.t_end is None else d.t_end
    if not (isinstance(t_start, int) and isinstance(t_end, int)) or not 0 < t_start < t_end:
        errors.append(f"{ctx}: invalid window [{t_start}, {t_end}]")
        return None
    if t_end > length:
        errors.append(f"{ctx}: drift window exceeds stream (t_end {t_end} > length {length})")
        return None

    target_idx = _resolve_target(d.target, classes)
    if d.kind != "imbalance_ratio":
        if not target_idx:
            errors.append(f"{ctx}: unknown target {d.target!r}")
            return None
        if any(classes[i].role != ROLE_MINORITY for i in target_idx):
            errors.append(f"{ctx}: drift targets must be minority classes")
            return None

    from_value = d.from_value
    to_value = d.to_value
    n = len(classes)

    if d.kind == "imbalance_ratio":
        if from_value is None:
            from_value = tuple(c.ratio for c in classes)
        else:
            from_value = _as_ratio_vector(from_value, n, errors, f"{ctx} from_value")
        to_value = _as_ratio_vector(to_value, n, errors, f"{ctx} to_value")
        if from_value is None or to_value is None:
            return None
    elif d.kind == "type_proportion":
        if from_value is None:
            base = {classes[i].type_proportions for i in target_idx}
            if len(base) != 1:
                errors.append(f"{ctx}: targets have differing type proportions; give from_value")
                return None
            from_value = next(iter(base))
        else:
            from_value = _as_type_mix(from_value, errors, f"{ctx} from_value")
        to_value = _as_type_mix(to_value, errors, f"{ctx} to_value")
        if from_value is None or to_value is None:
            return None
    elif d.kind == "split":
        if from_value is not None:
            errors.append(f"{ctx}: split drift takes no from_value")
            return None
        if not isinstance(to_value, dict) or set(to_value) != {"n_subclusters"}:
            errors.append(f"{ctx}: to_value must be {{'n_subclusters': n}}")
            return None
        n_sub = to_value["n_subclusters"]
        if not isinstance(n_sub, int) or n_sub < 2:
            errors.append(f"{ctx}: n_subclusters must be an integer >= 2")
            return None
        if any(classes[i].n_subclusters != 1 for i in target_idx):
            errors.append(f"{ctx}: split drift requires a single initial cluster")
            return None
        to_value = {"n_subclusters": n_sub}
    elif d.kind == "move":
        if from_value is not None or to_value is not None:
            errors.append(f"{ctx}: move drift takes no payload")
            return None

    return DriftSpec(
        kind=d.kind,
        target=d.target,
        from_value=from_value,
        to_value=to_value,
        t_start=t_start,
        t_end=t_end,
    )


# ── JSON round-trip ─────────────────────────────────────────────────────────


def _mix_to_dict(m: TypeMix) -> dict:
    return {"safe": m.safe, "borderline": m.borderline, "rare": m.rare}


def _drift_payload_to_json(kind: str, value):
    if value is None:
        return None
    if kind == "type_proportion" and isinstance(value, TypeMix):
        return _mix_to_dict(value)
    if kind == "imbalance_ratio":
        return list(value)
    return value


def serialize(config: StreamConfig | ValidatedConfig) -> str:
    """Canonical JSON (sorted keys); parse(serialize(c)) round-trips."""
    doc = {
        "classes": [
            {
                "name": c.name,
                "role": c.role,
                "ratio": c.ratio,
                "type_proportions": _mix_to_dict(
                    c.type_proportions
                    if isinstance(c.type_proportions, TypeMix)
                    else TypeMix(**c.type_proportions)
                ),
                "n_subclusters": c.n_subclusters,
            }
            for c in config.classes
        ],
        "drifts": [
            {
                "kind": d.kind,
                "target": d.target,
                "from_value": _drift_payload_to_json(d.kind, d.from_value),
                "to_value": _drift_payload_to_json(d.kind, d.to_value),
                "t_start": d.t_start,
                "t_end": d.t_end,
            }
            for d in config.drifts
        ],
        "generator": config.generator,
        "distribution": config.distribution,
        "length": config.length,
        "seed": config.seed,
        "radius": config.radius,
        "borderline_width": config.borderline_width,
    }
    return json.dumps(doc, sort_keys=True, indent=2)


def parse(text: str) -> StreamConfig:
    """Parse the JSON form back into a StreamConfig (no validation)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"malformed JSON: {e}"]) from e
    if not isinstance(doc, dict):
        raise ConfigError(["top-level JSON value must be an object"])

    def mix(v):
        if v is None:
            return TypeMix()
        if isinstance(v, dict):
            known = {k: float(v[k]) for k in ("safe", "borderline", "rare") if k in v}
            if len(known) == len(v):
                return TypeMix(**known)
        return v  # left as-is; validate_config reports it

    classes = tuple(
        ClassSpec(
            name=c.get("name", ""),
            role=c.get("role", ""),
            ratio=c.get("ratio", 0.0),
            type_proportions=mix(c.get("type_proportions")),
            n_subclusters=c.get("n_subclusters", 1),
        )
        for c in doc.get("classes", [])
    )
    drifts = tuple(
        DriftSpec(
            kind=d.get("kind", ""),
            target=d.get("target", TARGET_ALL_MINORITY),
            from_value=(
                mix(d.get("from_value"))
                if d.get("kind") == "type_proportion" and d.get("from_value") is not None
                else (
                    tuple(d["from_value"])
                    if d.get("kind") == "imbalance_ratio" and d.get("from_value") is not None
                    else d.get("from_value")
                )
            ),
            to_value=(
                mix(d.get("to_value"))
                if d.get("kind") == "type_proportion" and d.get("to_value") is not None
                else (
                    tuple(d["to_value"])
                    if d.get("kind") == "imbalance_ratio" and d.get("to_value") is not None
                    else d.get("to_value")
                )
            ),
            t_start=d.get("t_start", DEFAULT_DRIFT_START),
            t_end=d.get("t_end", DEFAULT_DRIFT_END),
        )
        for d in doc.get("drifts", [])
    )
    return StreamConfig(
        classes=classes,
        drifts=drifts,
        generator=doc.get("generator", "old"),
        distribution=doc.get("distribution", "uniform"),
        length=doc.get("length"),
        seed=doc.get("seed", 0),
        radius=doc.get("radius", DEFAULT_RADIUS),
        borderline_width=doc.get("borderline_width", DEFAULT_BORDERLINE_WIDTH),
    )


def load_config(path) -> ValidatedConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(parse(fh.read()))


def config_hash(config: ValidatedConfig) -> str:
    """Stable identity of a validated config (cache key)."""
    return hashlib.sha256(serialize(config).encode()).hexdigest()[:16]
