"""reformlab: modeling, optimization, and explanation of catalytic steam
reforming from tabular experiment data and digitized diffraction curves."""

from .data import (DEFAULT_SCHEMA, DataError, Dataset, FeatureSchema, FoldPlan,
                   OutlierPolicy, Sample, ScalingSpec, denormalize, kfold_split,
                   normalize, parse_dataset, remove_outliers, serialize_dataset)
from .metrics import EvalReport, evaluate_cv, mae, r2, rmse
from .models import (GprConfig, LsBoostConfig, MlpConfig, load_artifact, predict,
                     predict_many, save_artifact, train)
from .swarm import (MopsoParams, ParetoSolution, PsoParams, dominates, mopso,
                    pso_minimize)
from .xrd import (GaussianPeak, PeakWindow, XrdCurve, analyze_curve,
                  crystallinity_index, fit_gaussian, fwhm, scherrer_size)

__version__ = "0.1.0"
