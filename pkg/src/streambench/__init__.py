"""Multi-class imbalanced data stream benchmark.

Synthesizes streams with controllable class imbalance, local difficulty
(borderline and rare minority examples, sub-cluster splits and moves) and
incremental drift, and evaluates online classifiers prequentially with
windowed per-class recall and G-mean.
"""

from .config import (
    ClassSpec,
    ConfigError,
    DriftSpec,
    LabeledExample,
    StreamConfig,
    TypeMix,
    ValidatedConfig,
    config_hash,
    load_config,
    parse,
    serialize,
    validate_config,
)
from .drift import EffectiveState, effective_state, progress
from .generator import StreamArrays, generate_stream, generate_stream_arrays
from .geometry import Ellipsoid, Layout, LayoutError, build_layout, sample_in_ellipsoid

__version__ = "0.1.0"

from .classifiers import (  # noqa: E402  (classifiers import nothing above this line)
    ClassSizeTracker,
    OnlineBagging,
    Vfdt,
    bagging_lambda,
    hoeffding_bound,
    make_classifier,
)
from .evaluation import (  # noqa: E402
    EvalSeries,
    WindowedConfusion,
    gmean,
    prequential_run,
    recall_per_class,
)
from .labeler import TypeHistogram, knn, label_types, label_windows, type_distribution  # noqa: E402
from .runner import run_grid  # noqa: E402

__all__ = [
    "ClassSizeTracker",
    "ClassSpec",
    "ConfigError",
    "DriftSpec",
    "EffectiveState",
    "Ellipsoid",
    "EvalSeries",
    "LabeledExample",
    "Layout",
    "LayoutError",
    "OnlineBagging",
    "StreamArrays",
    "StreamConfig",
    "TypeHistogram",
    "TypeMix",
    "ValidatedConfig",
    "Vfdt",
    "WindowedConfusion",
    "__version__",
    "bagging_lambda",
    "build_layout",
    "config_hash",
    "effective_state",
    "generate_stream",
    "generate_stream_arrays",
    "gmean",
    "hoeffding_bound",
    "knn",
    "label_types",
    "label_windows",
    "load_config",
    "make_classifier",
    "parse",
    "prequential_run",
    "progress",
    "recall_per_class",
    "run_grid",
    "sample_in_ellipsoid",
    "serialize",
    "type_distribution",
    "validate_config",
]
