"""GLMs whose categorical predictors are reduced by clustering consecutive categories."""

import json

from ._core import (
    ClusteringError,
    DataError,
    Dataset,
    Family,
    FittedGlm,
    GlmError,
    GraspError,
    GraspResult,
    Schema,
    ccr,
    count_feasible_clusterings,
    eligible_predictors,
    enumerate_feasible_clusterings,
    fit_one_hot,
    grasp_run,
    load_csv,
    load_schema,
    parse_family,
    predict_one_hot,
    relative_complexity,
    rmse,
    split,
)
from ._core import run_benchmark as _run_benchmark

__all__ = [
    "ClusteringError", "DataError", "Dataset", "Family", "FittedGlm", "GlmError", "GraspError",
    "GraspResult", "Schema", "ccr", "count_feasible_clusterings", "eligible_predictors",
    "enumerate_feasible_clusterings", "fit_one_hot", "grasp_run", "load", "load_csv", "load_schema",
    "parse_family", "predict_one_hot", "relative_complexity", "rmse", "run_benchmark", "split",
]


def load(data_path, schema_path):
    """Schema and dataset in one call."""
    schema = load_schema(schema_path)
    return schema, load_csv(data_path, schema)


def run_benchmark(name, data, schema, **kwargs):
    """Original vs clustered model over the reshuffles; returns the report as a dict."""
    return json.loads(_run_benchmark(name, data, schema, **kwargs))
