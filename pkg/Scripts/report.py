# report.py
# Command reports: a hashed, canonical JSON record per CLI command, plus the string
# formats used on the command line ("p/q" rationals, "a+bi" complex numbers).

from __future__ import annotations
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence
import hashlib
import json
import re

import numpy as np
import sympy
from tabulate import tabulate

from errors import DomainError

STATUSES = ("pass", "fail", "indeterminate")
EXIT_CODES = {"pass": 0, "fail": 1, "indeterminate": 3}


# Returns the SHA3-256 hash of the given payload as a hexadecimal string
def sha3_256_hex(payload: bytes) -> str:
    return hashlib.sha3_256(payload).hexdigest()


# ------------------------------
# String formats
# ------------------------------

def format_complex(z: complex) -> str:
    z = complex(z)
    re_part, im_part = repr(z.real), repr(abs(z.imag))
    sign = "-" if z.imag < 0 else "+"
    return f"{re_part}{sign}{im_part}i"


def to_jsonable(obj: Any) -> Any:
    """Fractions become "p/q", complex numbers "a+bi"; containers are walked recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return format_complex(complex(obj))
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, sympy.Basic):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    return str(obj)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise DomainError("not a rational number", {"value": text})


def parse_rational_vector(text: str) -> tuple:
    """Comma- or space-separated rationals: "1/2, 0" -> (1/2, 0)."""
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if not parts:
        raise DomainError("empty vector", {"value": text})
    return tuple(parse_rational(p) for p in parts)


def parse_int_vector(text: str) -> tuple:
    out = []
    for x in parse_rational_vector(text):
        if x.denominator != 1:
            raise DomainError("vector must be integral", {"value": text})
        out.append(int(x))
    return tuple(out)


_COMPLEX_TOKEN = re.compile(r"([+-]?[^+-]+)")


def parse_complex(text: str, exact: bool = False):
    """"a+bi" with rational or decimal parts; exact=True returns a sympy Gaussian rational."""
    s = text.replace(" ", "").replace("j", "i")
    if not s:
        raise DomainError("empty complex number")
    re_part, im_part = Fraction(0), Fraction(0)
    # keep exponents such as 1e-3 attached to their mantissa
    marked = re.sub(r"([eE])([+-])", lambda m: m.group(1) + ("M" if m.group(2) == "-" else "P"), s)
    tokens = _COMPLEX_TOKEN.findall(marked)
    try:
        for tok in tokens:
            tok = tok.replace("M", "-").replace("P", "+")
            if tok.endswith("i"):
                body = tok[:-1]
                im_part += Fraction(body + "1" if body in ("", "+", "-") else body)
            else:
                re_part += Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise DomainError("not a complex number", {"value": text})
    if exact:
        return sympy.Rational(re_part.numerator, re_part.denominator) + \
            sympy.I * sympy.Rational(im_part.numerator, im_part.denominator)
    return complex(float(re_part), float(im_part))


def parse_complex_vector(text: str, exact: bool = False) -> tuple:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise DomainError("empty vector", {"value": text})
    return tuple(parse_complex(p, exact) for p in parts)


# ------------------------------
# Reports
# ------------------------------

@dataclass
class CommandReport:
    command: List[str]
    status: str
    data: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    report_hash: Optional[str] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"Unknown status: {self.status}")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def finalize(self) -> "CommandReport":
        # Deterministic hash over the canonical JSON, report_hash excluded
        safe = to_jsonable(asdict(self))
        safe["report_hash"] = None
        self.report_hash = sha3_256_hex(canonical_json(safe).encode())
        return self

    def to_json(self) -> dict:
        return to_jsonable(asdict(self))


def canonical_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def export_json(obj: Any, path) -> str:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(obj), f, indent=2, sort_keys=True)
    return str(p)


def summarize(report: CommandReport, rows: Optional[Sequence[Sequence[Any]]] = None) -> str:
    """Plain-text summary for stderr: status line plus an optional table."""
    head = [["command", " ".join(report.command)], ["status", report.status]]
    for key in sorted(report.diagnostics):
        val = report.diagnostics[key]
        if isinstance(val, (int, float, str, Fraction)):
            head.append([key, to_jsonable(val)])
    out = tabulate(head, tablefmt="plain")
    if rows:
        out += "\n" + tabulate([[to_jsonable(x) for x in r] for r in rows[1:]],
                               headers=list(rows[0]), tablefmt="simple")
    return out
