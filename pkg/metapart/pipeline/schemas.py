import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from metapart.core.errors import ConfigError
from metapart.pdist.schemas import parse_kind
from metapart.quality.schemas import QualityKind

SYNTHETIC_DATASETS = ("2d5c",)
STAGES = ("synth", "sample", "dist", "group", "mds", "report")


class RunConfig(BaseModel):
    """One experiment. Everything except out_dir enters the config hash."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    dataset: str = Field("2d5c", description="'2d5c' or a CSV path")
    label_column: Optional[int] = Field(None, ge=0, description="reference label column of the CSV")
    s: Optional[int] = Field(None, ge=2, description="cluster count; defaults to the reference's")
    sigma: Union[float, Literal["median"]] = Field("median", description="kernel bandwidth or 'median'")
    sigma_scale: float = Field(1.6, gt=0, description="multiplier on the median-heuristic bandwidth")
    quality: QualityKind = "kernel"
    t0: int = Field(1000, ge=0, description="burn-in sweeps")
    m: int = Field(4000, ge=1, description="kept samples")
    thinning: int = Field(1, ge=1)
    chains: int = Field(1, ge=1)
    distance: str = Field("liftemd", description="rand | vi | nmi | liftemd | density(<kind>)")
    k: int = Field(10, ge=1, description="representatives")
    first: Union[Literal["best"], int] = Field("best", description="'best' or a sample index")
    out_dir: Path = Field(Path("runs"), description="parent of the run directory")
    seed: int = Field(0, ge=0, description="master seed")
    baseline: Optional[float] = Field(None, description="external baseline quality ratio (blue circle)")

    @field_validator('sigma')
    def check_sigma(cls, v):
        if v != "median" and not v > 0:
            raise ValueError("sigma must be positive or 'median'")
        return v

    @field_validator('distance')
    def check_distance(cls, v):
        parse_kind(v)
        return v.strip().lower()

    @field_validator('first')
    def check_first(cls, v):
        if v != "best" and v < 0:
            raise ValueError("first must be 'best' or a non-negative sample index")
        return v

    @field_validator('chains')
    def check_chains(cls, v, info):
        m = info.data.get("m")
        if m is not None and v > m:
            raise ValueError(f"chains={v} exceeds m={m}")
        return v

    def experiment(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"out_dir"})

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.experiment(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def run_dir(self) -> Path:
        return Path(self.out_dir) / f"run-{self.config_hash[:12]}"

    @property
    def synthetic(self) -> bool:
        return self.dataset.lower() in SYNTHETIC_DATASETS


def load_run_config(path: Optional[Path] = None, **overrides: Any) -> RunConfig:
    """
    Build a RunConfig from a flat KEY=value file and flag overrides.

    Keys are case-insensitive and may use '-' or '_'. Overrides that are None are
    ignored, so unset CLI flags keep the file's value.
    """
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        for key, value in dotenv_values(path).items():
            if value is None or value == "":
                continue
            values[key.strip().lower().replace("-", "_")] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid run configuration: {e}")


class ManifestFile(BaseModel):
    name: str
    sha256: str


class Manifest(BaseModel):
    """Written last into the run directory; no timestamps so reruns are byte-identical."""
    config: Dict[str, Any]
    config_hash: str
    versions: Dict[str, str]
    files: List[ManifestFile] = Field(default_factory=list)
    completed_stages: List[str] = Field(default_factory=list)
    failed_stage: Optional[str] = None
    error: Optional[str] = None
