from .dataset import Dataset, stratified_split, stratified_take
from .forest import ForestModel, ForestParams, forest_predict, forest_train, gini
from .lbfgs import LbfgsResult, lbfgs_minimize
from .logreg import LogRegModel, LogRegParams, logreg_predict, logreg_scores, logreg_train
from .mlp import MlpModel, MlpParams, mlp_predict, mlp_scores, mlp_train
from .models import KINDS, DetectorModel, ModelFormatError, train_model
from .svc import SvcModel, SvcParams, rbf, svc_decision, svc_predict, svc_train
from .vote import VotingModel, vote, vote_predict

__all__ = [
    "KINDS",
    "Dataset",
    "DetectorModel",
    "ForestModel",
    "ForestParams",
    "LbfgsResult",
    "LogRegModel",
    "LogRegParams",
    "MlpModel",
    "MlpParams",
    "ModelFormatError",
    "SvcModel",
    "SvcParams",
    "VotingModel",
    "forest_predict",
    "forest_train",
    "gini",
    "lbfgs_minimize",
    "logreg_predict",
    "logreg_scores",
    "logreg_train",
    "mlp_predict",
    "mlp_scores",
    "mlp_train",
    "rbf",
    "stratified_split",
    "stratified_take",
    "svc_decision",
    "svc_predict",
    "svc_train",
    "train_model",
    "vote",
    "vote_predict",
]
