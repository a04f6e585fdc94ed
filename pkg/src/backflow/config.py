"""Declarative scenario configuration.

A scenario is a YAML mapping; `load_config` parses and validates it into a
ScenarioConfig. Validation reports the first violated constraint by name so
the CLI can exit 1 with a single actionable line.

Example (qubit chain, both initializations, windowed run):

    model: dv
    theta_sa: 0.0785398163397448
    theta_aa: 1.4137166941154069
    steps: 120
    window: 2            # or "full" to retain every ancilla
    metric: bures
    dv:
      alpha1: 0.0        # trajectory 1 system state
      alpha2: 1.0        # trajectory 2 system state
      ancilla_excitation: 0.0
    output_dir: out/dv_run
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import yaml

from .cv_model import CVParams
from .dv_model import DVParams

__all__ = ["ConfigError", "DVBlock", "CVBlock", "ScenarioConfig", "load_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DVBlock:
    alpha1: float
    alpha2: float
    ancilla_excitation: float = 0.0


@dataclass(frozen=True)
class CVBlock:
    nbar1: float
    r1: float
    nbar2: float
    r2: float
    ancilla_nbar: float = 0.0


_TOP_KEYS = {
    "model",
    "theta_sa",
    "theta_aa",
    "steps",
    "window",
    "hierarchy_levels",
    "metric",
    "erase_correlations",
    "dv",
    "cv",
    "revival_eps",
    "output_dir",
}


@dataclass
class ScenarioConfig:
    model: str
    theta_sa: float
    theta_aa: float
    steps: int
    window: object = 2  # positive integer or the string "full"
    hierarchy_levels: Optional[list] = None
    metric: str = "bures"
    erase_correlations: bool = False
    dv: Optional[DVBlock] = None
    cv: Optional[CVBlock] = None
    revival_eps: float = 1e-9
    output_dir: str = "out"

    # -- resolution ---------------------------------------------------------

    @property
    def full_history(self):
        return self.window == "full"

    @property
    def resolved_window(self):
        return self.steps if self.full_history else self.window

    def resolved_levels(self):
        if self.hierarchy_levels is not None:
            return list(self.hierarchy_levels)
        if self.full_history:
            return [0]
        return list(range(self.resolved_window + 1))

    def validate(self):
        if self.model not in ("dv", "cv"):
            raise ConfigError(f"model must be 'dv' or 'cv', got {self.model!r}")
        if self.model == "dv" and (self.dv is None or self.cv is not None):
            raise ConfigError("model 'dv' requires exactly the dv block")
        if self.model == "cv" and (self.cv is None or self.dv is not None):
            raise ConfigError("model 'cv' requires exactly the cv block")
        if not isinstance(self.steps, int) or self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.window != "full":
            if not isinstance(self.window, int) or self.window < 2:
                raise ConfigError("window must be >= 2 (or 'full')")
        levels = self.resolved_levels()
        if not levels or any(
            not isinstance(k, int) or k < 0 or k > self.resolved_window
            for k in levels
        ):
            raise ConfigError(
                f"hierarchy_levels must be integers in [0, {self.resolved_window}]"
            )
        if self.metric not in ("bures", "trace"):
            raise ConfigError(f"metric must be 'bures' or 'trace', got {self.metric!r}")
        if self.metric == "trace" and self.model == "cv":
            raise ConfigError("metric 'trace' is only available for model 'dv'")
        if not self.revival_eps > 0.0:
            raise ConfigError("revival_eps must be > 0")
        try:
            self.params(1)
            self.params(2)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def params(self, which):
        """Model parameters for trajectory 1 or 2 (they differ only in the
        initial system state)."""
        if which not in (1, 2):
            raise ValueError("trajectory selector must be 1 or 2")
        common = dict(
            theta_sa=self.theta_sa,
            theta_aa=self.theta_aa,
            window=self.resolved_window,
            steps=self.steps,
            full_history=self.full_history,
        )
        if self.model == "dv":
            blk = self.dv
            return DVParams(
                alpha=blk.alpha1 if which == 1 else blk.alpha2,
                ancilla_excitation=blk.ancilla_excitation,
                **common,
            )
        blk = self.cv
        return CVParams(
            nbar=blk.nbar1 if which == 1 else blk.nbar2,
            r=blk.r1 if which == 1 else blk.r2,
            ancilla_nbar=blk.ancilla_nbar,
            **common,
        )

    def resolved(self):
        """Every knob the run will actually use, defaults materialized."""
        out = {
            "model": self.model,
            "theta_sa": self.theta_sa,
            "theta_aa": self.theta_aa,
            "steps": self.steps,
            "window": self.resolved_window,
            "full_history": self.full_history,
            "hierarchy_levels": self.resolved_levels(),
            "metric": self.metric,
            "erase_correlations": self.erase_correlations,
            "revival_eps": self.revival_eps,
            "output_dir": self.output_dir,
        }
        if self.dv is not None:
            out["dv"] = {
                "alpha1": self.dv.alpha1,
                "alpha2": self.dv.alpha2,
                "ancilla_excitation": self.dv.ancilla_excitation,
            }
        if self.cv is not None:
            out["cv"] = {
                "nbar1": self.cv.nbar1,
                "r1": self.cv.r1,
                "nbar2": self.cv.nbar2,
                "r2": self.cv.r2,
                "ancilla_nbar": self.cv.ancilla_nbar,
            }
        return out


def _check_keys(mapping, allowed, where):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(sorted(unknown))}")


def from_mapping(data):
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    _check_keys(data, _TOP_KEYS, "top-level")
    for key in ("model", "theta_sa", "theta_aa", "steps"):
        if key not in data:
            raise ConfigError(f"missing required key: {key}")
    kwargs = dict(data)
    if kwargs.get("dv") is not None:
        blk = kwargs["dv"]
        if not isinstance(blk, dict):
            raise ConfigError("dv block must be a mapping")
        _check_keys(blk, {"alpha1", "alpha2", "ancilla_excitation"}, "dv")
        try:
            kwargs["dv"] = DVBlock(**blk)
        except TypeError as exc:
            raise ConfigError(f"dv block: {exc}") from exc
    if kwargs.get("cv") is not None:
        blk = kwargs["cv"]
        if not isinstance(blk, dict):
            raise ConfigError("cv block must be a mapping")
        _check_keys(blk, {"nbar1", "r1", "nbar2", "r2", "ancilla_nbar"}, "cv")
        try:
            kwargs["cv"] = CVBlock(**blk)
        except TypeError as exc:
            raise ConfigError(f"cv block: {exc}") from exc
    return ScenarioConfig(**kwargs).validate()


def load_config(path):
    try:
        with open(path, "r") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return from_mapping(data)
