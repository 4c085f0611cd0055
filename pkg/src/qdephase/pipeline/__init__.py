"""Datasets, experiment runners and the command line interface."""

from .datasets import Channel, Dataset, LabeledSample, build_dataset, export_dataset, import_dataset
from .experiments import (
    ExperimentReport,
    histogram_misclassified,
    run_classification_experiment,
    run_cross_evaluation,
    run_regression_experiment,
    split_dataset,
)

__all__ = [
    "Channel", "Dataset", "LabeledSample", "build_dataset", "export_dataset", "import_dataset",
    "ExperimentReport", "histogram_misclassified", "run_classification_experiment",
    "run_cross_evaluation", "run_regression_experiment", "split_dataset",
]
