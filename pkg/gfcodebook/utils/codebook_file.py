"""
Codebook File Utilities for gfcodebook.

A codebook file is a versioned text header followed by the body:

    codebookfile/1
    construction=II
    p=3
    ...
    digest=sha256:<hex of the body bytes>

    <N rows>

Exponent bodies hold K space-separated integers per row (entry = zeta_m^e);
complex bodies hold 2K fixed-point decimals (re, im interleaved) of the
entries scaled by 1/sqrt(K). The header is enough to rebuild the codebook,
which read_codebook_file does before accepting the body.
"""

import hashlib
import logging
import os

import numpy as np

from gfcodebook.core.constructions import build_codebook, check_construction
from gfcodebook.core.errors import IntegrityError, ParameterError
from gfcodebook.core.field import DEFAULT_BUDGET, TowerParams, build_tower

logger = logging.getLogger(__name__)

FORMAT_VERSION = "codebookfile/1"
FORMS = ("exponent", "complex")
COMPLEX_DECIMALS = 12

# Rows serialized per block while streaming the body.
ROW_BLOCK = 4096


def _field_header(tower, construction):
    levels = ["r", "q"] + (["q2"] if construction == "II" else [])
    header = {}
    for level in levels:
        ctx = tower.field(level)
        header[f"modulus_{level}"] = ctx.modulus_string()
        header[f"primitive_{level}"] = str(ctx.primitive)
    return header


def _body_block(codebook, rows, form):
    exps = codebook.row_exponents(rows)
    if form == "exponent":
        lines = [" ".join(map(str, row)) for row in exps.tolist()]
    else:
        values = np.exp(2j * np.pi * exps / codebook.m) / np.sqrt(codebook.K)
        pairs = np.empty(values.shape + (2,))
        pairs[..., 0] = np.round(values.real, COMPLEX_DECIMALS) + 0.0
        pairs[..., 1] = np.round(values.imag, COMPLEX_DECIMALS) + 0.0
        fmt = f"{{:.{COMPLEX_DECIMALS}f}}"
        lines = [" ".join(fmt.format(v) for v in row) for row in pairs.reshape(len(rows), -1).tolist()]
    return "".join(line + "\n" for line in lines).encode("ascii")


def serialize_codebook(codebook, form="exponent", max_entries=2 ** 28):
    """
    Canonical bytes of a codebook file.

    Returns:
        tuple: (file bytes, hex digest of the body)
    """
    if form not in FORMS:
        raise ParameterError(f"form must be one of {FORMS}, got {form!r}")
    if codebook.N * codebook.K > max_entries:
        raise ParameterError(f"codebook has {codebook.N * codebook.K} entries, export cap is {max_entries}")
    params = codebook.params
    body = bytearray()
    digest = hashlib.sha256()
    for start in range(0, codebook.N, ROW_BLOCK):
        block = _body_block(codebook, np.arange(start, min(start + ROW_BLOCK, codebook.N)), form)
        digest.update(block)
        body.extend(block)
    header = {
        "construction": codebook.construction,
        "p": params.p,
        "t": params.t,
        "s": params.s,
        "N": codebook.N,
        "K": codebook.K,
        "m": codebook.m,
        "form": form,
        **_field_header(codebook.dset.tower, codebook.construction),
        "digest": f"sha256:{digest.hexdigest()}",
    }
    head = FORMAT_VERSION + "\n" + "".join(f"{k}={v}\n" for k, v in header.items()) + "\n"
    return head.encode("ascii") + bytes(body), digest.hexdigest()


def write_codebook_file(codebook, path, form="exponent", max_entries=2 ** 28):
    """Write a codebook file; returns the body digest."""
    data, digest = serialize_codebook(codebook, form, max_entries)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(data)
    logger.info("Wrote Construction %s codebook %s (%d x %d, %s form) to %s",
                codebook.construction, codebook.params.label(), codebook.N, codebook.K, form, path)
    return digest


def parse_codebook_file(data):
    """
    Split file bytes into (header dict, body bytes) and check the digest.

    Raises:
        IntegrityError: bad version line, malformed header or digest mismatch.
    """
    head, sep, body = data.partition(b"\n\n")
    if not sep:
        raise IntegrityError("codebook file has no header terminator")
    lines = head.decode("ascii").split("\n")
    if lines[0] != FORMAT_VERSION:
        raise IntegrityError(f"unsupported codebook file version {lines[0]!r}")
    header = {}
    for line in lines[1:]:
        key, eq, value = line.partition("=")
        if not eq:
            raise IntegrityError(f"malformed header line {line!r}")
        header[key] = value
    algorithm, _, expected = header.get("digest", "").partition(":")
    if algorithm != "sha256" or hashlib.sha256(body).hexdigest() != expected:
        raise IntegrityError("codebook body digest does not match the header")
    return header, body


def _body_exponents(header, body):
    N, K, m = int(header["N"]), int(header["K"]), int(header["m"])
    rows = body.decode("ascii").split("\n")[:-1] if body else []
    if len(rows) != N:
        raise IntegrityError(f"body has {len(rows)} rows, header says N={N}")
    if header["form"] == "exponent":
        matrix = np.array([row.split() for row in rows], dtype=np.int64).reshape(N, K)
    else:
        pairs = np.array([row.split() for row in rows], dtype=np.float64).reshape(N, K, 2)
        angles = np.arctan2(pairs[..., 1], pairs[..., 0])
        matrix = np.rint(angles * m / (2 * np.pi)).astype(np.int64) % m
    return matrix


def read_codebook_file(path, budget=DEFAULT_BUDGET):
    """
    Read a codebook file and rebuild it from its header.

    The rebuilt tower must use the recorded moduli and primitive elements and
    the rebuilt codebook must equal the stored body.

    Returns:
        Codebook carrying the stored exponent matrix.

    Raises:
        IntegrityError: any disagreement between header, body and rebuild.
    """
    with open(path, "rb") as f:
        header, body = parse_codebook_file(f.read())
    construction = check_construction(header["construction"])
    params = TowerParams(int(header["p"]), int(header["t"]), int(header["s"]))
    tower = build_tower(params, budget, with_q2=(construction == "II"))
    for key, value in _field_header(tower, construction).items():
        if header.get(key) != value:
            raise IntegrityError(f"{key}: file has {header.get(key)!r}, rebuilt field has {value!r}")
    rebuilt = build_codebook(construction, tower)
    for key in ("N", "K", "m"):
        if int(header[key]) != getattr(rebuilt, key):
            raise IntegrityError(f"{key}: file has {header[key]}, rebuilt codebook has {getattr(rebuilt, key)}")
    matrix = _body_exponents(header, body)
    if not np.array_equal(matrix, rebuilt.exponents()):
        raise IntegrityError("stored codebook differs from the rebuilt one")
    rebuilt.matrix = matrix
    logger.info("Read Construction %s codebook %s from %s", construction, params.label(), path)
    return rebuilt
