"""Link networks, technology settings and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class NetworkError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Network:
    """A set of ``n`` links ``(s_i, r_i)`` in the physical (SINR) model.

    ``dist[i, j]`` is the distance from sender ``s_i`` to receiver ``r_j``.
    """

    dist: np.ndarray
    alpha: float
    noise: float
    beta: float
    p_max: int
    senders: Optional[np.ndarray] = None
    receivers: Optional[np.ndarray] = None
    gain: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dist = np.array(self.dist, dtype=float)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or dist.shape[0] == 0:
            raise NetworkError(f"dist must be a non-empty square matrix, got shape {dist.shape}")
        if not np.all(np.isfinite(dist)) or np.any(dist <= 0):
            raise NetworkError("all distances must be positive and finite")
        if not self.alpha > 0:
            raise NetworkError(f"alpha must be positive, got {self.alpha}")
        if not self.noise >= 0:
            raise NetworkError(f"noise must be nonnegative, got {self.noise}")
        if not self.beta > 1:
            raise NetworkError(f"beta must exceed 1, got {self.beta}")
        if int(self.p_max) != self.p_max or self.p_max < 1:
            raise NetworkError(f"p_max must be a positive integer, got {self.p_max}")
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "noise", float(self.noise))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "p_max", int(self.p_max))
        # received power of s_i at r_j is P_i / gain[i, j]; both the scalar and
        # the batch code paths divide by this same array
        gain = dist**self.alpha
        gain.setflags(write=False)
        object.__setattr__(self, "gain", gain)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def embedded(self) -> bool:
        return self.senders is not None

    @classmethod
    def from_points(cls, senders, receivers, *, alpha, noise, beta, p_max) -> "Network":
        s = np.asarray(senders, dtype=float)
        r = np.asarray(receivers, dtype=float)
        if s.shape != r.shape or s.ndim != 2 or s.shape[1] != 2:
            raise NetworkError("senders and receivers must be matching (n, 2) arrays")
        dist = np.sqrt(((s[:, None, :] - r[None, :, :]) ** 2).sum(axis=2))
        s.setflags(write=False)
        r.setflags(write=False)
        return cls(dist, alpha, noise, beta, p_max, senders=s, receivers=r)

    def replace(self, **changes) -> "Network":
        """Copy with some constants changed; geometry is kept."""
        dist = changes.pop("dist", None)
        params = dict(alpha=self.alpha, noise=self.noise, beta=self.beta, p_max=self.p_max)
        params.update(changes)
        if dist is not None:
            return Network(dist, **params)
        if self.embedded:
            return Network.from_points(self.senders, self.receivers, **params)
        return Network(self.dist, **params)

    def check_index(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"link index {i} out of range for n={self.n}")
        return i

    def check_profile(self, powers: Sequence[int]) -> tuple:
        powers = tuple(int(p) for p in powers)
        if len(powers) != self.n:
            raise NetworkError(f"profile has {len(powers)} entries, network has {self.n} links")
        for p in powers:
            if not 0 <= p <= self.p_max:
                raise NetworkError(f"power {p} outside [0, {self.p_max}]")
        return powers

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        doc = dict(n=self.n, alpha=self.alpha, noise=self.noise, beta=self.beta, p_max=self.p_max)
        if self.embedded:
            doc["points"] = dict(senders=self.senders.tolist(), receivers=self.receivers.tolist())
        else:
            doc["dist"] = self.dist.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Network":
        has_dist, has_points = "dist" in doc, "points" in doc
        if has_dist == has_points:
            raise NetworkError("network document needs exactly one of 'dist' or 'points'")
        try:
            params = dict(alpha=doc["alpha"], noise=doc["noise"], beta=doc["beta"], p_max=doc["p_max"])
        except KeyError as exc:
            raise NetworkError(f"network document missing field {exc}") from None
        if has_points:
            pts = doc["points"]
            net = cls.from_points(pts["senders"], pts["receivers"], **params)
        else:
            net = cls(np.asarray(doc["dist"], dtype=float), **params)
        if "n" in doc and doc["n"] != net.n:
            raise NetworkError(f"declared n={doc['n']} but geometry has {net.n} links")
        return net

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path) -> "Network":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise NetworkError(f"{path}: not valid JSON ({exc})") from None
        return cls.from_dict(doc)


@dataclass(frozen=True)
class TechSetting:
    """Which technologies are on: power control, interference cancellation,
    and an optional override of the network's SINR threshold."""

    power_control: bool = False
    ic: bool = False
    beta_override: Optional[float] = None

    def __post_init__(self):
        if self.beta_override is not None and not self.beta_override > 1:
            raise ValueError(f"beta_override must exceed 1, got {self.beta_override}")

    def threshold(self, net: Network) -> float:
        return net.beta if self.beta_override is None else float(self.beta_override)

    def levels(self, net: Network) -> tuple:
        if self.power_control:
            return tuple(range(net.p_max + 1))
        return (0, net.p_max)

    @property
    def name(self) -> str:
        base = {(False, False): "vanilla", (True, False): "pc",
                (False, True): "ic", (True, True): "pic"}[(self.power_control, self.ic)]
        if self.beta_override is not None:
            return f"{base}@{self.beta_override:g}"
        return base

    @classmethod
    def parse(cls, text: str) -> "TechSetting":
        """Parse ``vanilla``, ``pc``, ``ic``, ``pic``, optionally ``@<beta>``."""
        base, at, beta = text.strip().lower().partition("@")
        flags = SETTINGS.get(base)
        if flags is None:
            raise ValueError(f"unknown setting {text!r}; expected one of {', '.join(SETTINGS)}")
        override = None
        if at:
            try:
                override = float(beta)
            except ValueError:
                raise ValueError(f"bad threshold in setting {text!r}") from None
            if not math.isfinite(override):
                raise ValueError(f"bad threshold in setting {text!r}")
        return cls(*flags, beta_override=override)


SETTINGS = {
    "vanilla": (False, False),
    "pc": (True, False),
    "ic": (False, True),
    "pic": (True, True),
}

VANILLA = TechSetting()
PC = TechSetting(power_control=True)
IC = TechSetting(ic=True)
PIC = TechSetting(power_control=True, ic=True)
