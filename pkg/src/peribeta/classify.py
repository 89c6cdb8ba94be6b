"""Classification predicates: the Pisot unit gate, property (F), conjugate kinds."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .errors import DomainError
from .expansion import expand
from .field import BetaBase, is_pisot, is_unit, lattice_points

SCHEMA = "peribeta.classify/1"


def pisot_unit_gate(base: BetaBase) -> bool:
    """True iff beta is a Pisot unit (otherwise small rationals fail)."""
    return is_pisot(base) and is_unit(base)


def quadratic_F(base: BetaBase) -> bool:
    """Quadratic Pisot units with (F) are the roots of x^2 - n x - 1, n >= 1."""
    if base.degree != 2:
        raise DomainError("quadratic_F needs a degree 2 base")
    c0, c1, _ = base.coefficients
    return c0 == -1 and c1 <= -1


def cubic_family(base: BetaBase):
    """(a, b) when the minimal polynomial is x^3 - a x^2 - b x - 1, else None."""
    if base.degree != 3:
        return None
    c0, c1, c2, _ = base.coefficients
    if c0 != -1:
        return None
    return -c2, -c1


def family_verdict(base: BetaBase):
    """Verdict on (F) predicted by the published characterizations.

    Cubic Pisot units: (F) holds exactly for x^3 - a x^2 - b x - 1 with
    a >= 1 and -1 <= b <= a + 1, as the characterization is quoted.  Outside
    that family the verdict is "fails".  Quadratic: x^2 - n x - 1.
    """
    if base.degree == 2:
        return "holds" if quadratic_F(base) else "fails"
    if base.coefficients[0] == 1:
        return "fails"
    ab = cubic_family(base)
    if ab is None:
        return "fails"
    a, b = ab
    return "holds" if a >= 1 and -1 <= b <= a + 1 else "fails"


def finiteness_radius(base: BetaBase) -> float:
    rho = base.rho_max
    return max(1.0, base.alphabet_size / (1.0 - rho)) * (1 + 1e-9)


@dataclass(frozen=True)
class FVerdict:
    verdict: str
    states: int
    witness: str | None = None


def direct_F(base: BetaBase, search_bound: int = 200_000) -> FVerdict:
    """Decide (F) for a Pisot unit by a finite search.

    Every orbit of Z[beta] cap [0, 1) under T_beta enters, and never leaves,
    the set S of such elements whose conjugates have norm below
    ceil(beta) / (1 - rho).  So (F) holds iff every element of S has a finite
    expansion.  A search region larger than ``search_bound`` elements yields
    "undetermined".
    """
    if not pisot_unit_gate(base):
        raise DomainError("direct (F) test needs a Pisot unit")
    R = finiteness_radius(base)
    try:
        S = lattice_points(base, 0j, R, max_points=search_bound * 4)
    except DomainError:
        return FVerdict("undetermined", search_bound)
    if len(S) > search_bound:
        return FVerdict("undetermined", len(S))
    for y in S:
        e = expand(y, base)
        if e.truncated:
            return FVerdict("undetermined", len(S))
        if e.period:
            return FVerdict("fails", len(S), y.serialize())
    return FVerdict("holds", len(S))


def conjugate_kind(base: BetaBase) -> str:
    r, s = base.signature
    if base.degree == 3:
        return "totally_real" if r == 3 else "complex_pair"
    conj = base.enclosures[1]
    return "positive_real_conjugate" if conj.re[0] > 0 else "negative_real_conjugate"


@dataclass
class ClassificationReport:
    base: str
    polynomial: str
    signature: tuple
    is_pisot: bool
    is_unit: bool
    property_F: str
    property_F_states: int | None
    family: str
    family_verdict: str | None
    conjugate_kind: str
    gamma_known: str | None
    discrepancies: list = field(default_factory=list)
    witness: str | None = None

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA}
        out.update(asdict(self))
        out["signature"] = list(self.signature)
        return out


def classify(base: BetaBase, search_bound: int = 200_000) -> ClassificationReport:
    pisot, unit = is_pisot(base), is_unit(base)
    gate = pisot and unit
    discrepancies = []
    if base.degree == 2:
        c0, c1, _ = base.coefficients
        family = f"quadratic-F-family({-c1})" if (c0 == -1 and c1 <= -1) else "other"
    else:
        ab = cubic_family(base)
        family = f"cubic-F-family({ab[0]},{ab[1]})" if ab is not None else "other"
    fam = family_verdict(base) if gate else None
    witness = None
    if gate:
        fv = direct_F(base, search_bound)
        verdict, states, witness = fv.verdict, fv.states, fv.witness
        if fam is not None and verdict != "undetermined" and fam != verdict:
            discrepancies.append(
                f"direct search says (F) {verdict}, coefficient family says {fam}")
    else:
        verdict, states = "undetermined", None
    if not gate:
        gamma = "0"
    elif base.degree == 2:
        gamma = "1" if quadratic_F(base) else "0"
    elif verdict == "fails":
        gamma = "0"
    elif verdict == "holds":
        gamma = "open"
    else:
        gamma = None
    return ClassificationReport(
        base=base.minpoly.to_text(),
        polynomial=str(base.minpoly),
        signature=tuple(base.signature),
        is_pisot=pisot,
        is_unit=unit,
        property_F=verdict,
        property_F_states=states,
        family=family,
        family_verdict=fam,
        conjugate_kind=conjugate_kind(base),
        gamma_known=gamma,
        discrepancies=discrepancies,
        witness=witness,
    )
