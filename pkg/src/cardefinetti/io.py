"""State files (JSON) and measure files (CSV)."""
import csv
import io
import json

import numpy as np

from .definetti import MixingMeasure
from .exceptions import CarError, DomainError
from .states import State


class ParseError(CarError):
    """Malformed input file."""

    exit_code = 1


def state_to_dict(phi):
    D = phi.density
    return {
        "n_modes": phi.n,
        "density": [[[float(z.real), float(z.imag)] for z in row] for row in D],
    }


def state_from_dict(data):
    try:
        n = data["n_modes"]
        raw = np.asarray(data["density"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"state file needs 'n_modes' and a numeric 'density': {exc}") from exc
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"n_modes must be a positive integer, got {n!r}")
    dim = 1 << n
    if raw.shape != (dim, dim, 2):
        raise ParseError(f"density must be {dim} x {dim} [re, im] pairs, got shape {raw.shape}")
    try:
        return State(raw[..., 0] + 1j * raw[..., 1], n)
    except DomainError as exc:
        raise ParseError(f"density is not a valid state: {exc}") from exc


def write_state(path, phi):
    with open(path, "w") as fh:
        json.dump(state_to_dict(phi), fh)


def read_state(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(data)


def _decimal(x):
    # 15 significant digits, never exponent notation
    return np.format_float_positional(x, precision=15, unique=False, fractional=False, trim="k")


def measure_to_csv(measure):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mu", "weight"])
    for mu, w in measure.atoms:
        writer.writerow([_decimal(mu), _decimal(w)])
    return buf.getvalue()


def measure_from_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["mu", "weight"]:
        raise ParseError("measure file must start with the header 'mu,weight'")
    atoms = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            mu, w = (float(x) for x in row)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: expected two floats, got {row!r}") from exc
        atoms.append((mu, w))
    try:
        return MixingMeasure(tuple(atoms))
    except DomainError as exc:
        raise ParseError(f"invalid measure: {exc}") from exc


def write_measure(path, measure):
    with open(path, "w") as fh:
        fh.write(measure_to_csv(measure))


def read_measure(path):
    try:
        with open(path) as fh:
            return measure_from_csv(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read measure file {path}: {exc}") from exc
