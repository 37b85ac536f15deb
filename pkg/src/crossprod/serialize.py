"""JSON encodings of group elements, algebra elements, systems and l1 elements.

Complex numbers are written as [re, im] pairs; plain numbers are accepted on
input.  A block may be given flat (row-major) or as a nested list of rows.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .action import DynamicalSystem, SampleSpec, fine_representability_verdict, product_action
from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape
from .fixtures import commutative_endomorphism
from .l1x import L1Element, u
from .ogroup import DimensionMismatch, GroupElement, as_group


class ConfigError(ValueError):
    pass


class SystemLoadError(ValueError):
    pass


def _complex(z) -> complex:
    if isinstance(z, (list, tuple)):
        if len(z) != 2:
            raise ConfigError(f"complex entries are [re, im] pairs, got {z!r}")
        return complex(float(z[0]), float(z[1]))
    if isinstance(z, (int, float)):
        return complex(z)
    raise ConfigError(f"not a number: {z!r}")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def group_to_json(g: GroupElement) -> list[int]:
    return g.to_json()


def group_from_json(data, k: int | None = None) -> GroupElement:
    if isinstance(data, int):
        data = [data]
    if not isinstance(data, list) or not all(isinstance(c, int) for c in data):
        raise ConfigError(f"group element must be an integer array, got {data!r}")
    try:
        return as_group(tuple(data), k)
    except DimensionMismatch as exc:
        raise ConfigError(str(exc)) from exc


def shape_from_json(data) -> AlgebraShape:
    if isinstance(data, dict) and "commutative" in data:
        return AlgebraShape.commutative(int(data["commutative"]))
    if isinstance(data, list) and data and all(isinstance(n, int) and n > 0 for n in data):
        return AlgebraShape(tuple(data))
    raise ConfigError(f"shape must be a non-empty list of positive integers, got {data!r}")


def element_to_json(a: AlgebraElement) -> list[list[list[float]]]:
    return [[_pair(z) for z in blk.ravel()] for blk in a.blocks]


def _block(data, n: int) -> np.ndarray:
    if not isinstance(data, list):
        raise ConfigError("a block must be a list")
    # rows have n entries and pairs have 2, so [[x]] is a row but [[re, im]] a pair
    nested = len(data) == n and all(isinstance(r, list) and len(r) == n for r in data)
    flat = [z for row in data for z in row] if nested else data
    if len(flat) != n * n:
        raise ConfigError(f"block of size {n} needs {n * n} entries, got {len(flat)}")
    return np.array([_complex(z) for z in flat], dtype=complex).reshape(n, n)


def element_from_json(data, shape: AlgebraShape) -> AlgebraElement:
    if not isinstance(data, list) or len(data) != shape.m:
        raise ConfigError(f"element needs {shape.m} blocks")
    return shape.from_blocks([_block(b, n) for b, n in zip(data, shape.block_sizes)])


def matrix_from_json(data, dim: int) -> np.ndarray:
    if not isinstance(data, list) or len(data) != dim or any(len(r) != dim for r in data):
        raise ConfigError(f"generator must be a {dim}x{dim} matrix")
    return np.array([[_complex(z) for z in row] for row in data], dtype=complex)


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in m]


def l1_to_json(a: L1Element) -> dict:
    return {"coeffs": [{"g": group_to_json(g), "value": element_to_json(c)} for g, c in a.coeffs.items()]}


def l1_from_json(data, system: DynamicalSystem) -> L1Element:
    if not isinstance(data, dict) or "coeffs" not in data:
        raise ConfigError("l1 element must be an object with a 'coeffs' list")
    out: dict[GroupElement, AlgebraElement] = {}
    for term in data["coeffs"]:
        g = group_from_json(term["g"], system.k)
        c = element_from_json(term["value"], system.shape)
        out[g] = out[g] + c if g in out else c
    return L1Element(system, out)


def system_to_json(system: DynamicalSystem) -> dict:
    gens = [matrix_to_json(system.alpha(x).matrix) for x in system.action.generators]
    return {"name": system.name, "shape": list(system.shape.block_sizes), "group_dim": system.k,
            "generators": gens, "tol": system.tol}


def load_system(data: dict | str | Path, sample_spec: SampleSpec | None = None,
                tol: float | None = None) -> DynamicalSystem:
    """Build and verdict-check a system from its JSON description (object or file path)."""
    if not isinstance(data, dict):
        try:
            data = json.loads(Path(data).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemLoadError(f"cannot read system file {data}: {exc}") from exc
    try:
        k = int(data.get("group_dim", 1))
        tol = float(data.get("tol", DEFAULT_TOL)) if tol is None else tol
        if "commutative_map" in data:
            maps = data["commutative_map"]
            if maps and not isinstance(maps[0], list):
                maps = [maps]
            gens = [commutative_endomorphism(m, tol) for m in maps]
            shape = gens[0].shape
            if "shape" in data and shape_from_json(data["shape"]) != shape:
                raise ConfigError("commutative_map does not match shape")
        else:
            shape = shape_from_json(data["shape"])
            gens = [matrix_from_json(m, shape.dim) for m in data["generators"]]
        if len(gens) != k:
            raise ConfigError(f"group_dim {k} needs {k} generators, got {len(gens)}")
        action = product_action(shape, gens, tol)
    except KeyError as exc:
        raise SystemLoadError(f"system description lacks {exc}") from exc
    except (ConfigError, SystemLoadError):
        raise
    except ValueError as exc:
        raise SystemLoadError(str(exc)) from exc
    return fine_representability_verdict(action, sample_spec, name=str(data.get("name", "custom")))


# element expressions --------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?j?|\d*\.\d+(?:[eE][-+]?\d+)?j?)"
                    r"|(?P<u>u(?:\((?P<tuple>[-\d,\s]+)\)|(?P<int>\d+)))"
                    r"|(?P<op>[-+*@()]))")


def _tokens(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ConfigError(f"cannot parse element expression at {text[pos:]!r}")
        pos = m.end()
        if m.group("num"):
            out.append(("num", m.group("num")))
        elif m.group("u"):
            out.append(("u", m.group("tuple") or m.group("int")))
        else:
            out.append(("op", m.group("op")))
    return out


def parse_element(text: str, system: DynamicalSystem) -> L1Element:
    """Parse expressions such as '1+u1', 'u1*', '2*u1 - u(1,0)@u(0,1)*'.

    'u<x>' is u(x) and a trailing '*' on it (or on a parenthesised group) takes
    the adjoint; '@' is the product and 'c*' scales by a number; a bare number
    c stands for c times the unit at degree 0.
    """
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else (None, None)

    def take():
        nonlocal pos
        if pos >= len(toks):
            raise ConfigError(f"unexpected end of element expression {text!r}")
        pos += 1
        return toks[pos - 1]

    def postfix(val: L1Element) -> L1Element:
        while peek() == ("op", "*") and (pos + 1 >= len(toks) or toks[pos + 1][0] == "op"
                                         and toks[pos + 1][1] in "+-@)"):
            take()
            val = val.star()
        return val

    def atom() -> L1Element:
        kind, val = take() if pos < len(toks) else (None, None)
        if kind == "num":
            c = complex(val)
            if peek() == ("op", "*") and pos + 1 < len(toks) and toks[pos + 1] not in (("op", "+"), ("op", "-"),
                                                                                       ("op", ")"), ("op", "@")):
                take()
                return c * factor()
            return c * L1Element.one(system)
        if kind == "u":
            x = tuple(int(s) for s in val.split(",")) if "," in val else int(val)
            return postfix(u(system, as_group(x, system.k)))
        if (kind, val) == ("op", "("):
            inner = expr()
            if take() != ("op", ")"):
                raise ConfigError("unbalanced parentheses")
            return postfix(inner)
        if (kind, val) == ("op", "-"):
            return -factor()
        raise ConfigError(f"unexpected token {val!r} in {text!r}")

    def factor() -> L1Element:
        val = atom()
        while peek() == ("op", "@"):
            take()
            val = val * atom()
        return val

    def expr() -> L1Element:
        val = factor()
        while peek() in (("op", "+"), ("op", "-")):
            _, op = take()
            rhs = factor()
            val = val + rhs if op == "+" else val - rhs
        return val

    if not toks:
        raise ConfigError("empty element expression")
    out = expr()
    if pos != len(toks):
        raise ConfigError(f"trailing input in element expression {text!r}")
    return out

