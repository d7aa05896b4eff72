"""mutloc: mutation-based fault localisation with ahead-of-time analysis.

Build a kill matrix once, against a reference version of the program;
when a failure shows up later, rank methods by suspiciousness using
counting models or trained classifiers -- no fresh mutation analysis
needed at debugging time.

The package ships a small imperative language plus mutation engine so
whole pipelines can run at desk scale, but matrices produced by any
external tool can be imported through the CSV/JSON formats in
:mod:`mutloc.matrix`.
"""

from .classifiers import (
    ClassifierModel,
    Dataset,
    TrainConfig,
    build_dataset,
    build_query_vector,
    load_model,
    predict_scores,
    save_model,
    train,
    train_lr,
    train_mlp,
)
from .errors import (
    EmptyDataset,
    EmptyStratum,
    FormatError,
    InvalidConfig,
    InvalidObservation,
    MutlocError,
    NotFound,
    NothingToEvaluate,
    ParseError,
    PreconditionFailed,
    ShapeError,
    UnresolvedName,
)
from .matrix import (
    FailureObservation,
    KillMatrix,
    MutantRecord,
    load_matrix,
    load_observation,
    save_matrix,
    save_observation,
)
from .metrics import (
    EvalReport,
    FaultSpec,
    acc_at_n,
    average_precision,
    best_rank,
    mean_average_precision,
    planted_fault_eval,
    wef,
)
from .ranking import (
    ModelFamily,
    ModelSpec,
    RankedMethod,
    RankerConfig,
    Scope,
    localize,
    rank,
    save_ranking,
    score_em,
    score_pm_plus,
    score_pm_star,
)
from .sampling import SampleKind, SamplePlan, sample, sample_stratified, sample_uniform

__version__ = "0.1.0"
