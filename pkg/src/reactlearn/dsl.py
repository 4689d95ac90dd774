"""Textual notation for reaction systems.

One reaction per line::

    1 S + 1 I -> 2 I @ 0.02
    1 I -> 1 R @ 5.0

``#`` starts a comment, blank lines are ignored. An optional header line
``species: S I R`` pins the species and their order (otherwise species are
inferred in order of first appearance), and an optional ``init: 1980 20 0``
line carries the initial state so a model file is self-contained for
simulation. A side with no participants is written ``0``. The coefficient
may be omitted and defaults to 1.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ModelParseError
from .reactions import ReactionSystem, SpeciesSet, State

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _parse_side(text: str, line_no: int):
    """Parse one reaction side into a {species: coefficient} mapping."""
    text = text.strip()
    if text == "" or text == "0":
        return {}
    coeffs: dict[str, int] = {}
    for term in text.split("+"):
        tokens = term.split()
        if len(tokens) == 1:
            count, name = 1, tokens[0]
        elif len(tokens) == 2:
            try:
                count = int(tokens[0])
            except ValueError:
                raise ModelParseError(f"bad coefficient {tokens[0]!r}", line_no)
            name = tokens[1]
        else:
            raise ModelParseError(f"bad term {term.strip()!r}", line_no)
        if count < 0:
            raise ModelParseError(f"negative coefficient in {term.strip()!r}", line_no)
        if not _NAME_RE.match(name):
            raise ModelParseError(f"bad species name {name!r}", line_no)
        coeffs[name] = coeffs.get(name, 0) + count
    return coeffs


def _parse_lines(text: str, species: SpeciesSet | None):
    declared = species
    names: list[str] = list(species.names) if species else []
    init_counts = None
    reactions = []  # (reactant dict, product dict, rate)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("species:"):
            header = line[len("species:") :].split()
            if not header:
                raise ModelParseError("empty species declaration", line_no)
            if declared is not None and tuple(header) != tuple(names):
                raise ModelParseError(
                    f"species header {header} conflicts with declared {names}", line_no
                )
            try:
                declared = SpeciesSet(tuple(header))
            except ValueError as exc:
                raise ModelParseError(str(exc), line_no) from None
            names = list(header)
            continue
        if line.startswith("init:"):
            tokens = line[len("init:") :].split()
            try:
                init_counts = [int(t) for t in tokens]
            except ValueError:
                raise ModelParseError(f"bad init counts {tokens}", line_no)
            continue
        if "->" not in line:
            raise ModelParseError("expected '->' in reaction", line_no)
        lhs, rhs = line.split("->", 1)
        if "@" not in rhs:
            raise ModelParseError("expected '@ <rate>' after products", line_no)
        prod_text, rate_text = rhs.rsplit("@", 1)
        try:
            rate = float(rate_text)
        except ValueError:
            raise ModelParseError(f"bad rate {rate_text.strip()!r}", line_no)
        if not np.isfinite(rate) or rate < 0:
            raise ModelParseError(f"rate must be non-negative and finite, got {rate}", line_no)
        reactants = _parse_side(lhs, line_no)
        products = _parse_side(prod_text, line_no)
        for name in list(reactants) + list(products):
            if name not in names:
                if declared is not None:
                    raise ModelParseError(f"unknown species {name!r}", line_no)
                names.append(name)
        reactions.append((reactants, products, rate, line_no))
    return names, init_counts, reactions


def parse_system(text: str, species: SpeciesSet | None = None) -> ReactionSystem:
    """Parse reaction lines into a system; see the module docstring."""
    names, _, reactions = _parse_lines(text, species)
    if species is None:
        if not names:
            names = ["S"]  # an empty document still needs one species column
        species = SpeciesSet(tuple(names))
    n_s = species.n_species
    coeff = np.zeros((len(reactions), 2 * n_s), dtype=np.int64)
    rates = np.zeros(len(reactions), dtype=np.float64)
    for i, (reactants, products, rate, _) in enumerate(reactions):
        for name, c in reactants.items():
            coeff[i, species.index(name)] = c
        for name, c in products.items():
            coeff[i, n_s + species.index(name)] = c
        rates[i] = rate
    return ReactionSystem(species, coeff, rates)


def parse_model_file(text: str) -> tuple[ReactionSystem, State | None]:
    """Parse a model document, returning the system and its init state if any."""
    names, init_counts, _ = _parse_lines(text, None)
    system = parse_system(text)
    init = None
    if init_counts is not None:
        if len(init_counts) != system.n_species:
            raise ModelParseError(
                f"init has {len(init_counts)} counts but the model declares "
                f"{system.n_species} species"
            )
        init = State(np.array(init_counts, dtype=np.int64))
    return system, init


def _format_side(species: SpeciesSet, coeffs: np.ndarray) -> str:
    terms = [
        f"{int(c)} {name}"
        for name, c in zip(species.names, coeffs)
        if c > 0
    ]
    return " + ".join(terms) if terms else "0"


def format_system(system: ReactionSystem, init: State | None = None) -> str:
    """Render a system in the DSL; parse_system(format_system(x)) == x."""
    n_s = system.n_species
    lines = ["species: " + " ".join(system.species.names)]
    if init is not None:
        lines.append("init: " + " ".join(str(int(c)) for c in init.counts))
    for i in range(system.n_reactions):
        row = system.coefficients[i]
        lines.append(
            f"{_format_side(system.species, row[:n_s])} -> "
            f"{_format_side(system.species, row[n_s:])} @ {float(system.rates[i])!r}"
        )
    return "\n".join(lines) + "\n"
