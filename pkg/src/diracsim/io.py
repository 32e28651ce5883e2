"""On-disk formats: state files, distribution files, key=value configs,
delimiter-separated tables, and run manifests.

All JSON is written with sorted keys and repr-precision floats (17
significant digits), so round trips are lossless and identical runs produce
byte-identical artifacts.  Every schema carries a ``format_version`` field.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .dirac import A_THEN_B, B_THEN_A, DiracDistribution, distribution_violations
from .errors import FileFormatError
from .hilbert import DensityOperator, PureState

STATE_FORMAT_VERSION = 1
DIRAC_FORMAT_VERSION = 1
CONFIG_FORMAT_VERSION = 1
MANIFEST_FORMAT_VERSION = 1

KIND_DENSITY = "density"
KIND_PURE = "pure"


def _load_json(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}: malformed JSON ({exc.msg})") from exc
    if not isinstance(payload, dict):
        raise FileFormatError(f"{path}: expected a JSON object at top level")
    return payload


def _dump_json(path: str | Path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _require(payload: dict, key: str, path) -> object:
    if key not in payload:
        raise FileFormatError(f"{path}: missing field {key!r}")
    return payload[key]


def _complex_to_pairs(values: np.ndarray) -> list[list[float]]:
    flat = np.asarray(values, dtype=np.complex128).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def _pairs_to_complex(pairs, expected: int, path) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != expected:
        raise FileFormatError(
            f"{path}: expected {expected} [re, im] pairs, got "
            f"{len(pairs) if isinstance(pairs, list) else type(pairs).__name__}"
        )
    out = np.empty(expected, dtype=np.complex128)
    for i, pair in enumerate(pairs):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise FileFormatError(f"{path}: entry {i} is not an [re, im] pair")
        try:
            out[i] = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError) as exc:
            raise FileFormatError(f"{path}: entry {i} is not numeric") from exc
    return out


# ---------------------------------------------------------------------------
# state files
# ---------------------------------------------------------------------------

def write_state(path: str | Path, state: DensityOperator | PureState) -> None:
    if isinstance(state, DensityOperator):
        kind, values = KIND_DENSITY, state.matrix
    elif isinstance(state, PureState):
        kind, values = KIND_PURE, state.amplitudes
    else:
        raise TypeError(f"cannot serialize {type(state).__name__} as a state")
    _dump_json(
        path,
        {
            "format_version": STATE_FORMAT_VERSION,
            "kind": kind,
            "dim": int(state.dim),
            "matrix": _complex_to_pairs(values),
        },
    )


def write_density_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Serialize a raw (possibly unphysical) matrix in the density schema.

    Meant for estimator output; reading such a file back revalidates it and
    will reject matrices that violate the density invariants.
    """
    m = np.asarray(matrix, dtype=np.complex128)
    _dump_json(
        path,
        {
            "format_version": STATE_FORMAT_VERSION,
            "kind": KIND_DENSITY,
            "dim": int(m.shape[0]),
            "matrix": _complex_to_pairs(m),
        },
    )


def read_state(path: str | Path) -> DensityOperator | PureState:
    """Parse and validate a state file; invariant violations raise the
    corresponding named validation error."""
    payload = _load_json(path)
    version = _require(payload, "format_version", path)
    if version != STATE_FORMAT_VERSION:
        raise FileFormatError(f"{path}: unsupported format_version {version!r}")
    kind = _require(payload, "kind", path)
    dim = _require(payload, "dim", path)
    if not isinstance(dim, int) or dim < 1:
        raise FileFormatError(f"{path}: dim must be a positive integer, got {dim!r}")
    pairs = _require(payload, "matrix", path)
    if kind == KIND_DENSITY:
        values = _pairs_to_complex(pairs, dim * dim, path).reshape(dim, dim)
        return DensityOperator(values)
    if kind == KIND_PURE:
        values = _pairs_to_complex(pairs, dim, path)
        return PureState(values)
    raise FileFormatError(f"{path}: unknown kind {kind!r}")


def as_density(state: DensityOperator | PureState) -> DensityOperator:
    return state if isinstance(state, DensityOperator) else state.density()


# ---------------------------------------------------------------------------
# distribution files
# ---------------------------------------------------------------------------

def write_dirac(path: str | Path, dist: DiracDistribution) -> None:
    _dump_json(
        path,
        {
            "format_version": DIRAC_FORMAT_VERSION,
            "dim": int(dist.dim),
            "ordering": dist.ordering,
            "values": _complex_to_pairs(dist.values),
        },
    )


def read_dirac(path: str | Path) -> DiracDistribution:
    """Strict parse: invariant violations are errors."""
    dist, warnings = read_dirac_lenient(path)
    if warnings:
        from .errors import DistributionValidationError

        raise DistributionValidationError(f"{path}: " + "; ".join(warnings))
    return dist


def read_dirac_lenient(path: str | Path) -> tuple[DiracDistribution, list[str]]:
    """Parse a distribution file, returning invariant violations as warnings
    instead of raising (noisy estimates are legitimately off-normalized)."""
    payload = _load_json(path)
    version = _require(payload, "format_version", path)
    if version != DIRAC_FORMAT_VERSION:
        raise FileFormatError(f"{path}: unsupported format_version {version!r}")
    dim = _require(payload, "dim", path)
    if not isinstance(dim, int) or dim < 1:
        raise FileFormatError(f"{path}: dim must be a positive integer, got {dim!r}")
    ordering = _require(payload, "ordering", path)
    if ordering not in (A_THEN_B, B_THEN_A):
        raise FileFormatError(f"{path}: unknown ordering {ordering!r}")
    values = _pairs_to_complex(_require(payload, "values", path), dim * dim, path)
    values = values.reshape(dim, dim)
    warnings = distribution_violations(values)
    return DiracDistribution(values, ordering=ordering, check=False), warnings


# ---------------------------------------------------------------------------
# key=value configs
# ---------------------------------------------------------------------------

def parse_keyvalue(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines with # comments; checks format_version."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FileFormatError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise FileFormatError(f"{path}:{lineno}: empty key or value")
        if key in mapping:
            raise FileFormatError(f"{path}:{lineno}: duplicate key {key!r}")
        mapping[key] = value
    if mapping.get("format_version", "1") != "1":
        raise FileFormatError(
            f"{path}: unsupported format_version {mapping['format_version']!r}"
        )
    return mapping


def write_keyvalue(path: str | Path, mapping: dict[str, str]) -> None:
    lines = [f"{key} = {value}" for key, value in mapping.items()]
    Path(path).write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# tables and manifests
# ---------------------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path: str | Path, header: list[str], rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | Path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def write_manifest(
    path: str | Path,
    command: str,
    config_hash: str,
    seed: int,
    output_paths: list[str],
    warnings: list[str] | None = None,
) -> None:
    from . import __version__

    _dump_json(
        path,
        {
            "format_version": MANIFEST_FORMAT_VERSION,
            "command": command,
            "config_hash": config_hash,
            "seed": int(seed),
            "tool_version": __version__,
            "output_paths": sorted(str(p) for p in output_paths),
            "warnings": list(warnings or []),
        },
    )
