from .classifiers import (
    CLASSIFIER_KINDS,
    Classifier,
    ClassifierError,
    DecisionTreeClassifier,
    GaussianNBClassifier,
    LogisticClassifier,
    LogitBoostClassifier,
    RandomForestClassifier,
    classifier_from_params,
    cost_sensitive_predict,
    train_classifier,
)
from .model_io import ModelIOError, TrainedModel
from .regression import (
    LassoFit,
    RegressionError,
    RidgeFit,
    ScheduleResult,
    fit_lasso,
    fit_ols,
    fit_ridge,
    lasso_vif_schedule,
    standardize,
    vif,
)

__all__ = [
    "CLASSIFIER_KINDS",
    "Classifier",
    "ClassifierError",
    "DecisionTreeClassifier",
    "GaussianNBClassifier",
    "LogisticClassifier",
    "LogitBoostClassifier",
    "RandomForestClassifier",
    "classifier_from_params",
    "cost_sensitive_predict",
    "train_classifier",
    "ModelIOError",
    "TrainedModel",
    "LassoFit",
    "RegressionError",
    "RidgeFit",
    "ScheduleResult",
    "fit_lasso",
    "fit_ols",
    "fit_ridge",
    "lasso_vif_schedule",
    "standardize",
    "vif",
]
