"""Uniform train/predict wrapper over the learned detectors, plus persistence.

Model files are ``.npz`` archives (no pickles). The entry ``meta`` holds UTF-8
JSON with the format tag, version, model kind, class count, hyperparameters,
normalization factor and training provenance. Parameters are stored under
``<member>.<name>`` keys:

* ``mlp.W{l}``, ``mlp.b{l}`` for each layer l
* ``logreg.theta``
* ``svc.support``, ``svc.dual_coef``, ``svc.intercept`` (gamma lives in meta)
* ``forest.feature``, ``forest.threshold``, ``forest.left``, ``forest.right``,
  ``forest.counts`` with every tree concatenated, and ``forest.offsets``
  giving each tree's node range

A voting model stores its four members under the same member prefixes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..detect.features import NormalizationState
from .forest import ForestModel, ForestParams, Tree, forest_predict, forest_train
from .logreg import LogRegModel, LogRegParams, logreg_predict, logreg_train
from .mlp import MlpModel, MlpParams, mlp_predict, mlp_train
from .svc import SvcModel, SvcParams, svc_predict, svc_train
from .vote import VotingModel, vote_predict

FORMAT = "nrbeam-model"
VERSION = 1
KINDS = ("mlp", "logreg", "svc", "forest", "vote")
_PARAMS = {"mlp": MlpParams, "logreg": LogRegParams, "svc": SvcParams, "forest": ForestParams}


class ModelFormatError(ValueError):
    pass


@dataclass
class DetectorModel:
    kind: str
    model: object
    n_classes: int
    normalization: NormalizationState | None = None
    provenance: dict = field(default_factory=dict)

    def prepare(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.normalization is None:
            return X
        return X / np.sqrt(self.normalization.np_factor)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predicted SSB indices for raw feature rows."""
        return _PREDICT[self.kind](self.model, self.prepare(X))

    def save(self, path) -> None:
        arrays = {}
        hyper = {}
        if self.kind == "vote":
            for name in ("mlp", "logreg", "svc", "forest"):
                hyper[name] = _pack(name, getattr(self.model, name), arrays)
        else:
            hyper[self.kind] = _pack(self.kind, self.model, arrays)
        meta = {
            "format": FORMAT,
            "version": VERSION,
            "kind": self.kind,
            "n_classes": self.n_classes,
            "hyperparams": hyper,
            "normalization": None if self.normalization is None else self.normalization.to_dict(),
            "provenance": self.provenance,
        }
        arrays["meta"] = np.frombuffer(json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8)
        with open(path, "wb") as fh:
            np.savez(fh, **arrays)

    @classmethod
    def load(cls, path) -> "DetectorModel":
        try:
            with np.load(Path(path), allow_pickle=False) as z:
                arrays = {k: z[k] for k in z.files}
            meta = json.loads(arrays.pop("meta").tobytes().decode())
        except (OSError, ValueError, KeyError) as exc:
            raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
        if meta.get("format") != FORMAT or meta.get("version") != VERSION:
            raise ModelFormatError(f"{path} is not a version-{VERSION} {FORMAT} file")
        kind = meta["kind"]
        if kind not in KINDS:
            raise ModelFormatError(f"unknown model kind {kind!r}")
        hyper = meta["hyperparams"]
        if kind == "vote":
            model = VotingModel(*(_unpack(n, hyper[n], arrays) for n in ("mlp", "logreg", "svc", "forest")))
        else:
            model = _unpack(kind, hyper[kind], arrays)
        norm = meta.get("normalization")
        state = None if norm is None else NormalizationState(norm["np_factor"], norm["count"])
        return cls(kind, model, int(meta["n_classes"]), state, meta.get("provenance", {}))


def _params_dict(params) -> dict:
    d = asdict(params)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def _pack(name: str, model, arrays: dict) -> dict:
    if name == "mlp":
        for i, (W, b) in enumerate(zip(model.weights, model.biases)):
            arrays[f"mlp.W{i}"] = W
            arrays[f"mlp.b{i}"] = b
        return {"params": _params_dict(model.params), "layers": len(model.weights)}
    if name == "logreg":
        arrays["logreg.theta"] = model.theta
        return {"params": _params_dict(model.params)}
    if name == "svc":
        arrays["svc.support"] = model.support
        arrays["svc.dual_coef"] = model.dual_coef
        arrays["svc.intercept"] = model.intercept
        return {"params": _params_dict(model.params), "gamma": model.gamma}
    if name == "forest":
        sizes = [t.feature.size for t in model.trees]
        arrays["forest.offsets"] = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        for attr in ("feature", "threshold", "left", "right", "counts"):
            arrays[f"forest.{attr}"] = np.concatenate([getattr(t, attr) for t in model.trees])
        return {"params": _params_dict(model.params), "n_features": model.n_features,
                "n_classes": model.n_classes, "oob_score": model.oob_score}
    raise ModelFormatError(f"cannot pack {name!r}")


def _make_params(name: str, d: dict):
    d = dict(d)
    if name == "mlp":
        d["hidden"] = tuple(d["hidden"])
    return _PARAMS[name](**d)


def _unpack(name: str, hyper: dict, arrays: dict):
    params = _make_params(name, hyper["params"])
    if name == "mlp":
        n = hyper["layers"]
        return MlpModel([arrays[f"mlp.W{i}"] for i in range(n)], [arrays[f"mlp.b{i}"] for i in range(n)], params)
    if name == "logreg":
        return LogRegModel(arrays["logreg.theta"], params)
    if name == "svc":
        return SvcModel(arrays["svc.support"], arrays["svc.dual_coef"], arrays["svc.intercept"],
                        float(hyper["gamma"]), params)
    if name == "forest":
        off = arrays["forest.offsets"]
        trees = []
        for a, b in zip(off[:-1], off[1:]):
            trees.append(Tree(*(arrays[f"forest.{k}"][a:b] for k in ("feature", "threshold", "left", "right", "counts"))))
        return ForestModel(trees, int(hyper["n_classes"]), int(hyper["n_features"]), params, hyper.get("oob_score"))
    raise ModelFormatError(f"cannot unpack {name!r}")


_PREDICT = {
    "mlp": mlp_predict,
    "logreg": logreg_predict,
    "svc": svc_predict,
    "forest": forest_predict,
    "vote": vote_predict,
}


def train_model(
    kind: str,
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    *,
    normalized: bool = True,
    seed: int = 0,
    hyperparams: dict | None = None,
    provenance: dict | None = None,
) -> DetectorModel:
    """Train one detector on raw features ``X``.

    ``hyperparams`` maps a member name ("mlp", "svc", ...) to keyword
    overrides for its parameter dataclass. With ``normalized`` the training
    set's N_p is stored and applied at prediction time.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {KINDS}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    hyperparams = hyperparams or {}
    norm = None
    if normalized:
        norm = NormalizationState()
        norm.update(X)
        Xn = X / np.sqrt(norm.np_factor)
    else:
        Xn = X

    def params_for(name):
        overrides = dict(hyperparams.get(name, {}))
        if name in ("mlp", "forest"):
            overrides.setdefault("seed", seed)
        return _make_params(name, {**_params_dict(_PARAMS[name]()), **overrides})

    def fit(name):
        p = params_for(name)
        if name == "mlp":
            return mlp_train(Xn, y, n_classes, p)
        if name == "logreg":
            return logreg_train(Xn, y, n_classes, p)
        if name == "svc":
            return svc_train(Xn, y, n_classes, p)
        return forest_train(Xn, y, n_classes, p)

    if kind == "vote":
        model = VotingModel(*(fit(n) for n in ("mlp", "logreg", "svc", "forest")))
    else:
        model = fit(kind)
    prov = {"training_size": int(X.shape[0]), "seed": seed, "normalized": normalized}
    prov.update(provenance or {})
    return DetectorModel(kind, model, n_classes, norm, prov)
