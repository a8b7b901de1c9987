"""Algebra configuration files (TOML or JSON) for the command line tool.

A canonical TOML file looks like::

    d = 2
    twists = ["q:6", "shift:5"]
    norm = "padic:5"
    D = 6
    N = 4

    [connection]
    rank = 1
    matrices = [[["0"]], [["x2"]]]

Rationals are written as "num/den" strings inside the twist kinds.  Loading
and then dumping a canonical file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .coefficients import NormContext
from .connections import ConnectionModule
from .errors import ParseError, UsageError
from .twist import TwistSpec, parse_kind


def parse_norm(text: str) -> NormContext:
    text = text.strip()
    if text == "trivial":
        return NormContext.trivial()
    kind, _, arg = text.partition(":")
    if kind != "padic" or not arg.strip().isdigit():
        raise UsageError(f"bad norm {text!r}; use 'padic:<prime>' or 'trivial'")
    try:
        return NormContext.padic(int(arg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


@dataclass(frozen=True)
class ConnectionConfig:
    rank: int
    matrices: Tuple[Tuple[Tuple[str, ...], ...], ...]


@dataclass(frozen=True)
class AlgebraConfig:
    d: int = 1
    twists: Tuple[str, ...] = ("q:6",)
    norm: str = "padic:5"
    D: int = 6
    N: int = 4
    connection: Optional[ConnectionConfig] = None

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise UsageError("d must be a positive integer")
        if len(self.twists) != self.d:
            raise UsageError(f"expected {self.d} twist kinds, got {len(self.twists)}")
        for name in ("D", "N"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise UsageError(f"{name} must be an integer >= 1")
        canonical = []
        for t in self.twists:
            try:
                canonical.append(parse_kind(t).describe())
            except (ValueError, ZeroDivisionError, ParseError) as exc:
                raise UsageError(f"bad twist kind {t!r}: {exc}") from exc
        object.__setattr__(self, "twists", tuple(canonical))
        object.__setattr__(self, "norm", parse_norm(self.norm).describe())
        c = self.connection
        if c is not None:
            if len(c.matrices) != self.d:
                raise UsageError("connection needs one matrix per variable")
            for m in c.matrices:
                if len(m) != c.rank or any(len(r) != c.rank for r in m):
                    raise UsageError(f"connection matrices must be {c.rank}x{c.rank}")

    # conversion ---------------------------------------------------------------
    def context(self) -> NormContext:
        return parse_norm(self.norm)

    def spec(self) -> TwistSpec:
        return TwistSpec.from_kinds(self.twists, self.context())

    def module(self, spec: TwistSpec | None = None) -> ConnectionModule:
        from .parsing import parse_poly

        spec = spec or self.spec()
        if self.connection is None:
            return ConnectionModule.trivial(spec, 1)
        c = self.connection
        mats = [[[parse_poly(e, d=self.d) for e in row] for row in m] for m in c.matrices]
        return ConnectionModule(spec, c.rank, mats)

    # serialization --------------------------------------------------------------
    def to_dict(self) -> dict:
        out = {"d": self.d, "twists": list(self.twists), "norm": self.norm, "D": self.D, "N": self.N}
        if self.connection is not None:
            out["connection"] = {
                "rank": self.connection.rank,
                "matrices": [[list(r) for r in m] for m in self.connection.matrices],
            }
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "AlgebraConfig":
        known = {"d", "twists", "norm", "D", "N", "connection"}
        extra = set(data) - known
        if extra:
            raise UsageError(f"unknown config keys: {', '.join(sorted(extra))}")
        conn = None
        if "connection" in data:
            c = data["connection"]
            try:
                conn = ConnectionConfig(
                    int(c["rank"]),
                    tuple(tuple(tuple(str(e) for e in row) for row in m) for m in c["matrices"]),
                )
            except (KeyError, TypeError) as exc:
                raise UsageError(f"bad connection section: {exc}") from exc
        d = data.get("d", 1)
        twists = data.get("twists", ["q:6"] * d if isinstance(d, int) else [])
        if not isinstance(twists, list) or not all(isinstance(t, str) for t in twists):
            raise UsageError("twists must be a list of strings")
        return cls(
            d=d,
            twists=tuple(twists),
            norm=str(data.get("norm", "padic:5")),
            D=data.get("D", 6),
            N=data.get("N", 4),
            connection=conn,
        )

    def dumps_toml(self) -> str:
        lines = [
            f"d = {self.d}",
            "twists = [" + ", ".join(json.dumps(t) for t in self.twists) + "]",
            f"norm = {json.dumps(self.norm)}",
            f"D = {self.D}",
            f"N = {self.N}",
        ]
        if self.connection is not None:
            mats = json.dumps([[list(r) for r in m] for m in self.connection.matrices])
            lines += ["", "[connection]", f"rank = {self.connection.rank}", f"matrices = {mats}"]
        return "\n".join(lines) + "\n"

    def dumps_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "AlgebraConfig":
        stripped = text.lstrip()
        try:
            if stripped.startswith("{"):
                data = json.loads(text)
            else:
                data = tomllib.loads(text)
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config must be a table/object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str) -> "AlgebraConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.loads(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot open config {path!r}: {exc.strerror}") from exc

    def dump(self, path: str, fmt: str = "toml") -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps_json() if fmt == "json" else self.dumps_toml())
