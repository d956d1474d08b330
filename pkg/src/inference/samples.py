"""Posterior samples: storage, thinning and persistence"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from src.errors import ConfigError, DataError
from src.priors.layout import ParameterLayout, ParamVector

logger = logging.getLogger(__name__)

SAMPLER_COLUMNS = ["log_posterior", "accept_stat", "treedepth", "n_leapfrog", "divergent"]


@dataclass
class ChainOutput:
    """Raw post-warmup output of one chain in unconstrained coordinates"""
    u: np.ndarray
    log_density: np.ndarray
    accept_stats: np.ndarray
    treedepths: np.ndarray
    n_leapfrogs: np.ndarray
    divergent: np.ndarray
    step_size: float
    inv_metric: np.ndarray
    max_treedepth: int
    sampler: str


@dataclass(eq=False)
class PosteriorSample:
    layout: ParameterLayout
    draws: np.ndarray
    log_posts: np.ndarray
    accept_stats: np.ndarray
    treedepths: np.ndarray
    n_leapfrogs: np.ndarray
    divergent: np.ndarray
    step_size: float = float("nan")
    max_treedepth: int = 10
    sampler: str = "nuts"

    def __post_init__(self):
        self.draws = np.atleast_2d(np.asarray(self.draws, dtype=float))
        m = self.draws.shape[0]
        if self.draws.shape[1] != self.layout.size:
            raise DataError(f"Draws have {self.draws.shape[1]} columns, layout has {self.layout.size}")
        for name in ("log_posts", "accept_stats", "treedepths", "n_leapfrogs", "divergent"):
            if np.asarray(getattr(self, name)).shape != (m,):
                raise DataError(f"Sampler statistic '{name}' does not have {m} entries")
        self.divergent = np.asarray(self.divergent, dtype=bool)
        self.treedepths = np.asarray(self.treedepths, dtype=int)
        self.n_leapfrogs = np.asarray(self.n_leapfrogs, dtype=int)

    @classmethod
    def from_chain(cls, layout: ParameterLayout, chain: ChainOutput) -> "PosteriorSample":
        """Map draws to constrained space; stored log posterior excludes the log Jacobian"""
        draws = np.array([layout.to_constrained(u) for u in chain.u])
        log_jacobians = np.array([layout.log_jacobian(u) for u in chain.u])
        return cls(layout, draws, chain.log_density - log_jacobians, chain.accept_stats,
                   chain.treedepths, chain.n_leapfrogs, chain.divergent, chain.step_size,
                   chain.max_treedepth, chain.sampler)

    @property
    def M(self) -> int:
        return int(self.draws.shape[0])

    @property
    def divergences(self) -> int:
        return int(self.divergent.sum())

    @property
    def treedepth_hits(self) -> int:
        if self.sampler != "nuts":
            return 0
        return int(np.sum(self.treedepths >= self.max_treedepth))

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.layout.index(name)]

    def param_vector(self, i: int) -> ParamVector:
        return ParamVector(self.layout, self.draws[i])

    def mean_params(self) -> ParamVector:
        return ParamVector(self.layout, self.draws.mean(axis=0))

    def subset(self, index: np.ndarray) -> "PosteriorSample":
        index = np.asarray(index, dtype=int)
        return PosteriorSample(self.layout, self.draws[index], self.log_posts[index],
                               self.accept_stats[index], self.treedepths[index],
                               self.n_leapfrogs[index], self.divergent[index],
                               self.step_size, self.max_treedepth, self.sampler)

    def thin(self, n_thin: int, method: str = "systematic", batch_size: int = 150,
             rng: Optional[np.random.Generator] = None) -> "PosteriorSample":
        """
        Thin the chain to n_thin draws

        "systematic" keeps the last draw of each of n_thin consecutive blocks of
        length M // n_thin. "batch" splits the chain into batches of batch_size
        iterations and draws the same number of iterations without replacement from
        each batch.
        """
        if self.M == 0:
            raise ConfigError("Cannot thin an empty posterior sample")
        if not 1 <= n_thin <= self.M:
            raise ConfigError(f"Thinned size must be in [1, {self.M}], got {n_thin}")
        if method == "systematic":
            stride = self.M // n_thin
            index = stride * (np.arange(n_thin) + 1) - 1
        elif method == "batch":
            if rng is None:
                raise ConfigError("Batch thinning needs a random generator")
            n_batches = max(self.M // batch_size, 1)
            per_batch = int(np.ceil(n_thin / n_batches))
            if per_batch > min(batch_size, self.M):
                raise ConfigError(f"Cannot draw {per_batch} per batch from batches of {batch_size}")
            chosen = []
            for b in range(n_batches):
                lo = b * batch_size
                hi = self.M if b == n_batches - 1 else lo + batch_size
                chosen.append(lo + rng.choice(hi - lo, size=per_batch, replace=False))
            index = np.concatenate(chosen)
            if index.size > n_thin:
                index = rng.choice(index, size=n_thin, replace=False)
            index = np.sort(index)
        else:
            raise ConfigError(f"Unknown thinning method: {method}")
        return self.subset(index)

    def to_frame(self, derived: Optional[Dict[str, np.ndarray]] = None) -> pd.DataFrame:
        frame = pd.DataFrame(self.draws, columns=self.layout.names)
        for name, values in (derived or {}).items():
            frame[name] = values
        if "sigma_f" in self.layout and "sigma_eps" in self.layout:
            frame["stn"] = self.column("sigma_f") / self.column("sigma_eps")
        frame["log_posterior"] = self.log_posts
        frame["accept_stat"] = self.accept_stats
        frame["treedepth"] = self.treedepths
        frame["n_leapfrog"] = self.n_leapfrogs
        frame["divergent"] = self.divergent.astype(int)
        return frame

    def save_csv(self, path: Path, header_lines: Iterable[str] = (),
                 derived: Optional[Dict[str, np.ndarray]] = None) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in header_lines:
                f.write(f"# {line}\n")
            f.write(f"# sampler={self.sampler} step_size={self.step_size!r} max_treedepth={self.max_treedepth}\n")
            self.to_frame(derived).to_csv(f, index=False, float_format="%.17g")

    @classmethod
    def load_csv(cls, path: Path, layout: ParameterLayout) -> "PosteriorSample":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Posterior sample not found: {path}")
        frame = pd.read_csv(path, comment="#")
        missing = [c for c in layout.names + SAMPLER_COLUMNS if c not in frame.columns]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        meta = _read_sampler_line(path)
        return cls(
            layout,
            frame[layout.names].to_numpy(dtype=float),
            frame["log_posterior"].to_numpy(dtype=float),
            frame["accept_stat"].to_numpy(dtype=float),
            frame["treedepth"].to_numpy(dtype=int),
            frame["n_leapfrog"].to_numpy(dtype=int),
            frame["divergent"].to_numpy(dtype=int).astype(bool),
            float(meta.get("step_size", "nan")),
            int(meta.get("max_treedepth", 10)),
            meta.get("sampler", "nuts"),
        )


def _read_sampler_line(path: Path) -> Dict[str, str]:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            if "sampler=" in line:
                return dict(item.split("=", 1) for item in line[1:].split())
    return {}
