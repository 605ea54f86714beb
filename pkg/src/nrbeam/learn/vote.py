"""Hard majority vote over the four trained classifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forest import ForestModel, forest_predict, plurality
from .logreg import LogRegModel, logreg_predict
from .mlp import MlpModel, mlp_predict
from .svc import SvcModel, svc_predict


@dataclass
class VotingModel:
    mlp: MlpModel
    logreg: LogRegModel
    svc: SvcModel
    forest: ForestModel

    @property
    def n_classes(self) -> int:
        return self.forest.n_classes

    def member_predictions(self, X: np.ndarray) -> np.ndarray:
        return np.stack([
            mlp_predict(self.mlp, X),
            logreg_predict(self.logreg, X),
            svc_predict(self.svc, X),
            forest_predict(self.forest, X),
        ])


def vote(predictions, n_classes: int) -> np.ndarray:
    """Majority over rows of ``predictions`` (n_models, n); ties to the lowest class.

    A 1-D input is read as the models' predictions for a single vector.
    """
    p = np.asarray(predictions)
    if p.ndim == 1:
        return int(plurality(p[:, None], n_classes)[0])
    return plurality(p, n_classes)


def vote_predict(model: VotingModel, X: np.ndarray) -> np.ndarray:
    return vote(model.member_predictions(X), model.n_classes)
