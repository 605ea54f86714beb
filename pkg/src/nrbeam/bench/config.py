"""Experiment configuration: JSON files with command-line overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..chansim import MODES, ChannelScenario, scenario_build
from ..phy.frame import FrameConfig
from ..sequences import CellIdentity

MODEL_NAMES = ("corr", "mlp", "logreg", "svc", "forest", "vote")


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 1)."""


@dataclass(frozen=True)
class ScenarioSpec:
    mode: str = "beam_signature"
    taps: int = 4
    seed: int = 1
    timing_offset: int = 0
    cfo_hz: float = 0.0

    def build(self, frame: FrameConfig, snr_db: float) -> ChannelScenario:
        return scenario_build(self.seed, frame.lmax, self.mode, snr_db, self.taps,
                              timing_offset=self.timing_offset, cfo_hz=self.cfo_hz,
                              fft_size=frame.fft_size, cp_len=frame.cp_len)


@dataclass(frozen=True)
class ExperimentConfig:
    frame: FrameConfig = field(default_factory=lambda: FrameConfig(ssb_period_ms=5.0, buffer_duration=0.005))
    scenario: ScenarioSpec = field(default_factory=ScenarioSpec)
    pci: int = 301
    sweep: tuple[float, ...] = (-6.0, -5.0, -4.0, -3.0, -2.0)
    training_sizes: tuple[int, ...] = (70, 700, 1400, 14000)
    trials_per_point: int = 1000
    models: tuple[str, ...] = ("corr", "mlp", "logreg", "svc", "forest", "vote")
    seed: int = 2024
    normalized: bool = True
    timing: str = "genie"               # "genie" or "search"
    labeling: str = "truth"             # "truth" (simulation) or "crc" (capture mode)
    power_scales: tuple[float, ...] = (1.0,)
    hyperparams: dict = field(default_factory=dict)
    # selector simulation
    # (train SNR, test SNR) environments; the defaults are the paper's
    # low-train/high-test and high-train/low-test pairs.
    selector_envs: tuple[tuple[float, float], ...] = ((-3.8, 6.42), (9.56, 4.7))
    selector_training_size: int = 700
    selector_steps: int = 1000
    selector_window: int = 100
    selector_threshold: float = 0.95
    selector_hysteresis: float = 0.05
    selector_feedback: str = "crc"      # shadow PBCH CRC ("crc") or ground truth ("truth")
    selector_model: str = "svc"

    def __post_init__(self):
        self.validate()

    @property
    def cell(self) -> CellIdentity:
        return CellIdentity.from_pci(self.pci)

    def validate(self) -> None:
        if not self.models:
            raise ConfigError("at least one model is required")
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad:
            raise ConfigError(f"unknown models {bad}; choose from {MODEL_NAMES}")
        if self.trials_per_point < 100:
            raise ConfigError("trials_per_point must be at least 100")
        if any(t < 1 for t in self.training_sizes):
            raise ConfigError("training sizes must be positive")
        if self.scenario.mode not in MODES:
            raise ConfigError(f"unknown channel mode {self.scenario.mode!r}")
        if self.timing not in ("genie", "search"):
            raise ConfigError("timing must be 'genie' or 'search'")
        if self.labeling not in ("truth", "crc"):
            raise ConfigError("labeling must be 'truth' or 'crc'")
        if self.selector_feedback not in ("truth", "crc"):
            raise ConfigError("selector_feedback must be 'truth' or 'crc'")
        if self.selector_model not in MODEL_NAMES[1:]:
            raise ConfigError(f"selector_model must be one of {MODEL_NAMES[1:]}")
        if not 0 <= self.pci <= 1007:
            raise ConfigError("pci must lie in [0, 1007]")
        if any(p <= 0 for p in self.power_scales):
            raise ConfigError("power scales must be positive")
        if any(len(env) != 2 for env in self.selector_envs):
            raise ConfigError("selector_envs entries must be [train_snr, test_snr] pairs")
        if self.selector_training_size < 1 or self.selector_steps < 1:
            raise ConfigError("selector training size and steps must be positive")
        if self.scenario.taps > self.frame.cp_len:
            raise ConfigError("scenario taps exceed the cyclic prefix")

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "frame":
                v = v.to_dict()
            elif f.name == "scenario":
                v = asdict(v)
            elif isinstance(v, tuple):
                v = [list(e) if isinstance(e, tuple) else e for e in v]
            d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "frame" in d:
                d["frame"] = FrameConfig.from_dict(d["frame"])
            if "scenario" in d:
                d["scenario"] = ScenarioSpec(**d["scenario"])
            for key in ("sweep", "training_sizes", "models", "power_scales"):
                if key in d:
                    d[key] = tuple(d[key])
            if "selector_envs" in d:
                d["selector_envs"] = tuple(tuple(float(v) for v in env) for env in d["selector_envs"])
            return cls(**d)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        scen = {k[len("scenario_"):]: kw.pop(k) for k in list(kw) if k.startswith("scenario_")}
        try:
            out = replace(self, **kw)
            if scen:
                out = replace(out, scenario=replace(out.scenario, **scen))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return out


def load_config(path: str | Path | None) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return ExperimentConfig.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def dump_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
