"""libotda.eval: classifiers, metrics, synthetic data and experiment protocols"""
from ._classifiers import LinearSVM, knn_predict, train_linear_svm
from ._experiment import ExperimentResult, run_da_experiment
from ._experiment_config import ExperimentConfig, fraction_feature_counts
from ._metrics import accuracy, auc
from ._synthetic import generate_shifted_dataset
