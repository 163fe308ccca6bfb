"""priorlift: class prior estimation from labeled plus unlabeled data.

Fits a logistic conditional-probability model per class on the labeled
rows, averages it over every row (labeled or not) to estimate each class
prior, and reports asymptotic standard errors, confidence intervals, and
the variance saved by the unlabeled rows. Also included: subclass
(region-conditional) estimates, an exact estimator for finite-valued
features, benefit diagnostics, and a subsample MSE benchmark harness.
"""

from .dataset import (
    RECIPES,
    ColumnSpec,
    Dataset,
    LabelRule,
    Recipe,
    load_csv,
    load_spec_file,
    partition,
    save_csv,
)
from .diagnostics import DiagnosticsReport, Recommendation, diagnose, eta, recommend, sigma
from .discrete import (
    DiscretePriorEstimate,
    DiscreteTable,
    estimate_discrete,
    save_table_csv,
    tabulate,
)
from .estimators import PriorEstimator
from .exceptions import (
    ConfigError,
    ConvergenceError,
    CoverageError,
    CsvParseError,
    DataError,
    DegenerateClassError,
    DegeneratePriorError,
    EmptyRegionError,
    EstimationError,
    InvalidDatasetError,
    PriorLiftError,
    SchemaError,
    ShapeError,
    SingularDesignError,
    SingularInformationError,
)
from .harness import (
    CLASSICAL,
    SEMI_SUPERVISED,
    MseCell,
    MseCurve,
    SubsampleConfig,
    run_grid,
    smooth_curve,
)
from .logistic import (
    ClassFit,
    FittedModel,
    add_intercept,
    fit_class,
    fit_model,
    g,
    g_prime,
    logistic,
    weight,
)
from .priors import (
    InfluenceComponents,
    PriorEstimate,
    classical_prior,
    estimate_prior,
    influence_components,
    labeled_only_avar,
    variance_reduction,
)
from .subclass import (
    Constraint,
    Region,
    SubclassEstimate,
    classical_subclass,
    estimate_subclass,
)

__version__ = "0.1.0"

__all__ = [
    "RECIPES",
    "ColumnSpec",
    "Dataset",
    "LabelRule",
    "Recipe",
    "load_csv",
    "load_spec_file",
    "partition",
    "save_csv",
    "DiagnosticsReport",
    "Recommendation",
    "diagnose",
    "eta",
    "recommend",
    "sigma",
    "DiscretePriorEstimate",
    "DiscreteTable",
    "estimate_discrete",
    "save_table_csv",
    "tabulate",
    "PriorEstimator",
    "ConfigError",
    "ConvergenceError",
    "CoverageError",
    "CsvParseError",
    "DataError",
    "DegenerateClassError",
    "DegeneratePriorError",
    "EmptyRegionError",
    "EstimationError",
    "InvalidDatasetError",
    "PriorLiftError",
    "SchemaError",
    "ShapeError",
    "SingularDesignError",
    "SingularInformationError",
    "CLASSICAL",
    "SEMI_SUPERVISED",
    "MseCell",
    "MseCurve",
    "SubsampleConfig",
    "run_grid",
    "smooth_curve",
    "ClassFit",
    "FittedModel",
    "add_intercept",
    "fit_class",
    "fit_model",
    "g",
    "g_prime",
    "logistic",
    "weight",
    "InfluenceComponents",
    "PriorEstimate",
    "classical_prior",
    "estimate_prior",
    "influence_components",
    "labeled_only_avar",
    "variance_reduction",
    "Constraint",
    "Region",
    "SubclassEstimate",
    "classical_subclass",
    "estimate_subclass",
]
