"""Labeled datasets of noisy two-qubit states and their CSV serialization.

A dataset file is a CSV table plus a JSON sidecar (``<file>.json``).  The CSV
columns are fixed::

    family,seed_index,p,theta,phi,alpha,beta,gamma,phi1,phi2,phi3,
    f1,...,f15,entangled,concurrence

Parameter columns a family does not use are left empty.  Floats are written
with ``repr`` so values survive a round trip exactly.  The sidecar stores the
format version, generator version, seed, channel, entangled fraction and the
SHA-256 of the CSV bytes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .. import __version__, channels, states, tomography
from ..states import Family, GenParams

FORMAT_VERSION = 1
GENERATOR_VERSION = f"qdephase-{__version__}/pcg64-seedseq-v1"
PARAM_NAMES = ("p", "theta", "phi", "alpha", "beta", "gamma", "phi1", "phi2", "phi3")
FEATURE_COLUMNS = tuple(f"f{i}" for i in range(1, tomography.N_FEATURES + 1))
COLUMNS = ("family", "seed_index") + PARAM_NAMES + FEATURE_COLUMNS + ("entangled", "concurrence")

_CHUNK = 10_000


class Channel(str, Enum):
    DEPHASE = "dephase"
    DEPOLARIZE = "depolarize"
    NONE = "none"


VALID_PAIRS = {
    (Family.PSI1, Channel.DEPOLARIZE),
    (Family.PSI1, Channel.DEPHASE),
    (Family.PSI2, Channel.DEPHASE),
    (Family.PSI3, Channel.DEPHASE),
    (Family.MIXED, Channel.NONE),
}


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    entangled: int
    concurrence: float
    params: GenParams


@dataclass
class Dataset:
    """Column-oriented samples of one state family."""

    family: Family
    channel: Channel
    seed: int
    features: np.ndarray
    entangled: np.ndarray
    concurrence: np.ndarray
    seed_index: np.ndarray
    params: dict
    generator_version: str = GENERATOR_VERSION
    eig_concentration: float | None = None
    min_pt_eigenvalue: np.ndarray | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.entangled)
        if n == 0:
            raise ValueError("a dataset needs at least one sample")
        if self.features.shape != (n, tomography.N_FEATURES):
            raise ValueError(f"features must have shape ({n}, {tomography.N_FEATURES})")

    def __len__(self):
        return len(self.entangled)

    @property
    def entangled_fraction(self):
        return float(np.mean(self.entangled))

    def gen_params(self, i):
        kw = {}
        for name in PARAM_NAMES:
            value = float(self.params[name][i])
            kw["noise_p" if name == "p" else name] = value
        return GenParams(family=self.family, seed=int(self.seed_index[i]), **kw)

    def sample(self, i):
        return LabeledSample(
            self.features[i], int(self.entangled[i]), float(self.concurrence[i]), self.gen_params(i)
        )

    def subset(self, idx):
        idx = np.asarray(idx)
        return Dataset(
            family=self.family,
            channel=self.channel,
            seed=self.seed,
            features=self.features[idx],
            entangled=self.entangled[idx],
            concurrence=self.concurrence[idx],
            seed_index=self.seed_index[idx],
            params={k: v[idx] for k, v in self.params.items()},
            generator_version=self.generator_version,
            eig_concentration=self.eig_concentration,
            min_pt_eigenvalue=None if self.min_pt_eigenvalue is None else self.min_pt_eigenvalue[idx],
        )


def _draw_params(family, seed, n):
    """Per-sample parameter draws from disjoint seed substreams."""
    nan = np.full(n, np.nan)
    params = {name: nan.copy() for name in PARAM_NAMES}
    mixed_inputs = None
    if family is Family.MIXED:
        mixed_inputs = (np.empty((n, 4, 4), dtype=complex), np.empty((n, 4)))
    for i in range(n):
        rng = states.sample_rng(seed, i)
        if family in (Family.PSI1, Family.PSI2):
            params["theta"][i], params["phi"][i] = rng.uniform(0.0, states.TWO_PI, 2)
            params["p"][i] = rng.uniform()
        elif family is Family.PSI3:
            angles = rng.uniform(0.0, states.TWO_PI, 6)
            for name, value in zip(("alpha", "beta", "gamma", "phi1", "phi2", "phi3"), angles):
                params[name][i] = value
            params["p"][i] = rng.uniform()
        else:
            z, expo = states._draw_qr_inputs(rng)
            mixed_inputs[0][i] = z
            mixed_inputs[1][i] = expo
    return params, mixed_inputs


def _states(family, channel, params, mixed_inputs, sl, eig_concentration):
    if family is Family.MIXED:
        z, expo = mixed_inputs[0][sl], mixed_inputs[1][sl]
        return states._mixed_from_inputs(z, expo, eig_concentration)
    if family is Family.PSI1:
        psi = states.make_psi1(params["theta"][sl], params["phi"][sl])
    elif family is Family.PSI2:
        psi = states.make_psi2(params["theta"][sl], params["phi"][sl])
    else:
        psi = states.make_psi3(*(params[k][sl] for k in ("alpha", "beta", "gamma", "phi1", "phi2", "phi3")))
    rho = states.pure_to_density(psi)
    p = params["p"][sl]
    if channel is Channel.DEPHASE:
        return channels.dephase_global_closed_form(rho, p)
    return channels.depolarize(rho, p)


def build_dataset(family, n, seed, channel, eig_concentration=states.DEFAULT_EIG_CONCENTRATION):
    """Draw ``n`` labeled samples of ``family`` passed through ``channel``."""
    family, channel = Family(family), Channel(channel)
    if (family, channel) not in VALID_PAIRS:
        raise ValueError(f"unsupported family/channel pairing: {family.value}/{channel.value}")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")

    params, mixed_inputs = _draw_params(family, seed, n)
    features = np.empty((n, tomography.N_FEATURES))
    min_pt = np.empty(n)
    conc = np.empty(n)
    for start in range(0, n, _CHUNK):
        sl = slice(start, min(start + _CHUNK, n))
        rho = _states(family, channel, params, mixed_inputs, sl, eig_concentration)
        features[sl] = tomography.extract_features(rho)
        min_pt[sl] = tomography.min_pt_eigenvalue(rho)
        conc[sl] = tomography.concurrence(rho)
    return Dataset(
        family=family,
        channel=channel,
        seed=int(seed),
        features=features,
        entangled=(min_pt < -tomography.PPT_TOL).astype(np.int64),
        concurrence=conc,
        seed_index=np.arange(n, dtype=np.int64),
        params=params,
        eig_concentration=eig_concentration if family is Family.MIXED else None,
        min_pt_eigenvalue=min_pt,
    )


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def _fmt(x):
    return "" if math.isnan(x) else repr(float(x))


def _csv_bytes(ds):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    fam = ds.family.value
    for i in range(len(ds)):
        row = [fam, str(int(ds.seed_index[i]))]
        row += [_fmt(ds.params[name][i]) for name in PARAM_NAMES]
        row += [repr(float(v)) for v in ds.features[i]]
        row += [str(int(ds.entangled[i])), repr(float(ds.concurrence[i]))]
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def export_dataset(ds, path):
    """Write ``ds`` to ``path`` (CSV) and its sidecar; returns the sidecar dict."""
    path = Path(path)
    data = _csv_bytes(ds)
    path.write_bytes(data)
    meta = {
        "format_version": FORMAT_VERSION,
        "generator_version": ds.generator_version,
        "family": ds.family.value,
        "channel": ds.channel.value,
        "seed": ds.seed,
        "n": len(ds),
        "eig_concentration": ds.eig_concentration,
        "entangled_fraction": ds.entangled_fraction,
        "columns": list(COLUMNS),
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


def _parse_float(text, line, column):
    if text == "":
        return math.nan
    try:
        return float(text)
    except ValueError:
        raise DatasetFormatError(f"line {line}: bad value {text!r} in column {column}") from None


def _parse_int(text, line, column):
    try:
        return int(text)
    except ValueError:
        raise DatasetFormatError(f"line {line}: bad value {text!r} in column {column}") from None


def import_dataset(path):
    """Read a dataset written by ``export_dataset``, validating sidecar, schema and checksum."""
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise DatasetFormatError(f"missing sidecar {side}")
    meta = json.loads(side.read_text())
    if meta.get("format_version") != FORMAT_VERSION:
        raise DatasetFormatError(
            f"format version {meta.get('format_version')} is not supported (expected {FORMAT_VERSION})"
        )
    data = path.read_bytes()
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header is None:
        raise DatasetFormatError(f"{path} is empty")
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise DatasetFormatError(f"missing column(s): {', '.join(missing)}")
    if tuple(header) != COLUMNS:
        raise DatasetFormatError(f"unexpected column order: {header}")
    if hashlib.sha256(data).hexdigest() != meta.get("sha256"):
        raise DatasetFormatError(f"checksum mismatch for {path}")

    rows = list(reader)
    if not rows:
        raise DatasetFormatError(f"{path} contains no samples")
    n = len(rows)
    family = Family(meta["family"])
    params = {name: np.empty(n) for name in PARAM_NAMES}
    features = np.empty((n, tomography.N_FEATURES))
    entangled = np.empty(n, dtype=np.int64)
    conc = np.empty(n)
    seed_index = np.empty(n, dtype=np.int64)
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != len(COLUMNS):
            raise DatasetFormatError(f"line {line}: expected {len(COLUMNS)} fields, got {len(row)}")
        if row[0] != family.value:
            raise DatasetFormatError(f"line {line}: family {row[0]!r} differs from {family.value!r}")
        seed_index[i] = _parse_int(row[1], line, "seed_index")
        for j, name in enumerate(PARAM_NAMES):
            params[name][i] = _parse_float(row[2 + j], line, name)
        off = 2 + len(PARAM_NAMES)
        for j in range(tomography.N_FEATURES):
            features[i, j] = _parse_float(row[off + j], line, FEATURE_COLUMNS[j])
        entangled[i] = _parse_int(row[-2], line, "entangled")
        if entangled[i] not in (0, 1):
            raise DatasetFormatError(f"line {line}: entangled flag must be 0 or 1")
        conc[i] = _parse_float(row[-1], line, "concurrence")
    return Dataset(
        family=family,
        channel=Channel(meta["channel"]),
        seed=int(meta["seed"]),
        features=features,
        entangled=entangled,
        concurrence=conc,
        seed_index=seed_index,
        params=params,
        generator_version=meta["generator_version"],
        eig_concentration=meta.get("eig_concentration"),
    )
