"""Paths to the data files shipped inside the package."""

from __future__ import annotations

from pathlib import Path

_DATA = Path(__file__).parent / "data"


def _resolve(kind: str, name: str, suffix: str) -> Path:
    candidate = Path(name)
    if candidate.suffix and candidate.exists():
        return candidate  # caller passed an explicit file path
    path = _DATA / kind / f"{name}{suffix}"
    if not path.exists():
        shipped = sorted(p.stem for p in (_DATA / kind).glob(f"*{suffix}"))
        raise FileNotFoundError(f"no {kind[:-1]} named {name!r}; shipped: {shipped}")
    return path


def feeder_path(name: str) -> Path:
    return _resolve("feeders", name, ".feeder")


def profile_path(name: str) -> Path:
    return _resolve("profiles", name, ".csv")


def scenario_path(name: str) -> Path:
    return _resolve("scenarios", name, ".ini")
