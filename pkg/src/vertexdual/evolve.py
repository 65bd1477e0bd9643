"""One-step transition matrices on finite windows with boundary accounting.

A step is a single sweep of the horizontal line through the window.  In the
forward direction the line enters empty at the left edge and moves right;
in the reversed direction it enters at the right edge (empty, or loaded
with one heaviest-color particle when injection is on) and moves left.  A
particle still on the line at the terminal edge either becomes a boundary
event (exited right / absorbed left) or, in closed mode, its outcomes are
dropped and the matrix is flagged substochastic.

Entries are stored per source as {(target, absorbed, exited): weight} with
exact rational weights; for open boundaries each source's outcome weights
sum to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .qarith import qpow
from .report import CheckReport, format_rational
from .state import (
    Config,
    Window,
    blocks,
    color_reverse,
    conserved_weights,
    enum_configs,
    shift,
)
from .vertex import ModelParams, check_pole, vertex_outcomes

FORWARD = "forward"
REVERSED = "reversed"

# edge modes
CLOSED = "closed"
ABSORB = "absorb"
EXIT = "exit"
INJECT = "inject"


@dataclass(frozen=True)
class BoundarySpec:
    """Edge behavior: left in {closed, absorb}, right in {closed, exit, inject}."""

    left: str = CLOSED
    right: str = EXIT

    def __post_init__(self):
        if self.left not in (CLOSED, ABSORB):
            raise ValueError(f"bad left boundary {self.left!r}")
        if self.right not in (CLOSED, EXIT, INJECT):
            raise ValueError(f"bad right boundary {self.right!r}")

    def validate(self, direction: str):
        if direction == FORWARD:
            if self.left != CLOSED or self.right == INJECT:
                raise ValueError("forward steps enter empty on the left and may exit right")
        elif direction == REVERSED:
            if self.right == EXIT:
                raise ValueError("reversed steps cannot exit on the right")
        else:
            raise ValueError(f"bad direction {direction!r}")


FORWARD_EXIT = BoundarySpec(CLOSED, EXIT)
REVERSED_PLAIN = BoundarySpec(ABSORB, CLOSED)
REVERSED_INJECT = BoundarySpec(ABSORB, INJECT)


class TransitionBuilder:
    """Lazily computes one-step outcome rows, one source at a time."""

    def __init__(self, params: ModelParams, window: Window, zvec,
                 direction: str, boundary: BoundarySpec):
        if len(zvec) != window.length:
            raise ValueError("one spectral parameter per site required")
        boundary.validate(direction)
        for z, m in zip(zvec, window.capacities):
            check_pole(params.q, z, m)
        self.params = params
        self.window = window
        self.zvec = tuple(zvec)
        self.direction = direction
        self.boundary = boundary
        self.dropped_any = False
        self._rows = {}

    def z_at(self, x: int) -> Fraction:
        return self.zvec[self.window.index(x)]

    def row(self, source: Config) -> dict:
        """Outcome map {(target, absorbed, exited): weight} for one source."""
        cached = self._rows.get(source)
        if cached is not None:
            return cached
        if source.window != self.window:
            raise ValueError("source configuration lives on a different window")

        window = self.window
        params = self.params
        forward = self.direction == FORWARD
        order = list(window.sites) if forward else list(reversed(window.sites))
        entry_color = params.n if (not forward and self.boundary.right == INJECT) else 0

        # states: (horizontal color, mutated site list, weight)
        states = [(entry_color, list(source.sites), Fraction(1))]
        for x in order:
            i = window.index(x)
            m = window.capacities[i]
            z = self.zvec[i]
            nxt = []
            for h, sites, w in states:
                for k, delta, wv in vertex_outcomes(params, m, z, h, sites[i]):
                    new_sites = list(sites)
                    new_sites[i] = delta
                    nxt.append((k, new_sites, w * wv))
            states = nxt

        row = {}
        for h, sites, w in states:
            absorbed = exited = 0
            if h != 0:
                if forward:
                    if self.boundary.right == EXIT:
                        exited = 1
                    else:
                        self.dropped_any = True
                        continue
                else:
                    if self.boundary.left == ABSORB:
                        absorbed = 1
                    else:
                        self.dropped_any = True
                        continue
            target = Config(window, tuple(sites))
            key = (target, absorbed, exited)
            row[key] = row.get(key, Fraction(0)) + w

        self._check_balance(source, row, entry_color)
        self._rows[source] = row
        return row

    def _check_balance(self, source: Config, row: dict, entry_color: int):
        injected = 1 if entry_color != 0 else 0
        src = source.particle_count
        for (target, absorbed, exited), w in row.items():
            if w == 0:
                continue
            if target.particle_count != src + injected - absorbed - exited:
                raise AssertionError("particle balance violated in a sweep outcome")
            if absorbed > 1 or exited > 1:
                raise AssertionError("at most one boundary event per step with l = 1")

    def total(self, source: Config) -> Fraction:
        return sum(self.row(source).values(), Fraction(0))


@dataclass
class StepMatrix:
    """All outcome rows of one sweep, plus its defining data."""

    params: ModelParams
    window: Window
    zvec: tuple
    direction: str
    boundary: BoundarySpec
    rows: dict
    substochastic: bool = False
    info: dict = field(default_factory=dict)

    def row(self, source: Config) -> dict:
        return self.rows[source]

    def entry(self, source: Config, target: Config, absorbed=0, exited=0) -> Fraction:
        return self.rows[source].get((target, absorbed, exited), Fraction(0))

    def validate_stochastic(self):
        for source, row in self.rows.items():
            total = sum(row.values(), Fraction(0))
            if self.substochastic:
                if total > 1:
                    raise AssertionError("outcome weights exceed 1")
            elif total != 1:
                raise AssertionError(
                    f"outcome weights for {source.sites} sum to {format_rational(total)}"
                )


def build_step_matrix(params: ModelParams, window: Window, zvec,
                      direction: str, boundary: BoundarySpec) -> StepMatrix:
    builder = TransitionBuilder(params, window, zvec, direction, boundary)
    rows = {source: builder.row(source) for source in enum_configs(window, params.n)}
    matrix = StepMatrix(params, window, tuple(zvec), direction, boundary,
                        rows, substochastic=builder.dropped_any)
    matrix.validate_stochastic()
    return matrix


def marginalize_row(row: dict, base_window: Window) -> dict:
    """Fold an extended-window outcome row back onto a smaller window.

    Occupancy on the extra left sites is counted as absorbed, occupancy on
    the extra right sites as exited; interior content must match the base
    window exactly.
    """
    out = {}
    for (target, absorbed, exited), w in row.items():
        a, e = absorbed, exited
        sites = []
        for x in target.window.sites:
            comp = target.site(x)
            k = sum(comp[1:])
            if x < base_window.lo:
                a += k
            elif x > base_window.hi:
                e += k
            else:
                sites.append(comp)
        key = (Config(base_window, tuple(sites)), a, e)
        out[key] = out.get(key, Fraction(0)) + w
    return {k: v for k, v in out.items() if v != 0}


def embed_config(config: Config, window: Window) -> Config:
    """The same particle content on a larger window (new sites empty)."""
    n = config.n_colors
    sites = []
    for x in window.sites:
        if config.window.lo <= x <= config.window.hi:
            sites.append(config.site(x))
        else:
            sites.append((window.capacity(x),) + (0,) * n)
    return Config(window, tuple(sites))


def check_step_extension(params: ModelParams, window: Window, zvec,
                         direction: str, boundary: BoundarySpec,
                         sources, z_new: Fraction, *, left: int = 1,
                         right: int = 1) -> CheckReport:
    """Interior rows must be unchanged when the window grows by one site.

    Boundary-event weights are compared in aggregated form, folding any
    occupancy of the added sites back into absorbed/exited counts.
    """
    base = TransitionBuilder(params, window, zvec, direction, boundary)
    wide = window.extended(left, right)
    zwide = (z_new,) * left + tuple(zvec) + (z_new,) * right
    ext = TransitionBuilder(params, wide, zwide, direction, boundary)
    report = CheckReport(
        name="step-window-extension",
        params={"window": f"{window.lo}..{window.hi}", "direction": direction,
                "q": format_rational(params.q), "n": params.n,
                "z_new": format_rational(z_new)},
    )
    for source in sources:
        row = base.row(source)
        folded = marginalize_row(ext.row(embed_config(source, wide)), window)
        keys = set(row) | set(folded)
        for key in keys:
            a = row.get(key, Fraction(0))
            b = folded.get(key, Fraction(0))
            if a != b:
                target, absorbed, exited = key
                report.record_failure(
                    {"source": source.sites, "target": target.sites,
                     "absorbed": absorbed, "exited": exited}, a, b)
    return report


def check_L3(params: ModelParams, window: Window, zvec) -> CheckReport:
    """Color reversal intertwines injected and plain reversed steps.

    The injected step at inverted parameters, conjugated by color reversal,
    must equal the plain reversed step entry by entry; an injected
    heaviest-color particle matches the reversed process through the count
    balance of the heaviest color.
    """
    n = params.n
    inv = ModelParams(n, 1 / params.q)
    zinv = tuple(1 / z for z in zvec)
    plain = TransitionBuilder(params, window, zvec, REVERSED, REVERSED_PLAIN)
    inject = TransitionBuilder(inv, window, zinv, REVERSED, REVERSED_INJECT)
    report = CheckReport(
        name="reversal-intertwining",
        params={"n": n, "window": f"{window.lo}..{window.hi}",
                "caps": window.capacities,
                "q": format_rational(params.q),
                "z": [format_rational(z) for z in zvec]},
    )
    for source in enum_configs(window, n):
        row_plain = plain.row(source)
        row_inject = inject.row(color_reverse(source))
        mapped = {}
        src_top = source.species_counts()[n - 1]
        for (target, absorbed, exited), w in row_plain.items():
            tgt_top = target.species_counts()[n - 1]
            k_inj = 1 + tgt_top - src_top
            mapped[(color_reverse(target), k_inj, 0)] = w
        keys = set(mapped) | set(row_inject)
        for key in keys:
            a = mapped.get(key, Fraction(0))
            b = row_inject.get(key, Fraction(0))
            if a != b:
                report.record_failure(
                    {"source": source.sites, "target": key[0].sites,
                     "absorbed": key[1]}, a, b)
    return report


def b_factors(q: Fraction, z: Fraction) -> tuple:
    """The two capacity-1 stay/pass weights; inverting q and z swaps them."""
    den = qpow(q, 2) - z
    return (qpow(q, 2) * (1 - z) / den, (1 - z) / den)


def position_weight(config: Config, q: Fraction) -> Fraction:
    return conserved_weights(config, q)[1]


def check_LF(params: ModelParams, window: Window, z: Fraction,
             *, pairs=None) -> CheckReport:
    """Parameter inversion equals conjugation by shift and position weight.

    On capacity-1 windows with one homogeneous z, each interior entry of
    the inverted-parameter forward step equals the original entry times
    G(source shifted right)/G(target), with G the diagonal position weight.
    Sources need one free site at the right edge so the shift stays inside
    the window.
    """
    if window.uniform_capacity != 1:
        raise ValueError("this identity is for capacity-1 windows")
    n = params.n
    zvec = (z,) * window.length
    fwd = TransitionBuilder(params, window, zvec, FORWARD, FORWARD_EXIT)
    inv = TransitionBuilder(ModelParams(n, 1 / params.q), window,
                            (1 / z,) * window.length, FORWARD, FORWARD_EXIT)
    report = CheckReport(
        name="inversion-gauge",
        params={"n": n, "window": f"{window.lo}..{window.hi}",
                "q": format_rational(params.q), "z": format_rational(z)},
    )
    q = params.q
    if pairs is None:
        interior = [c for c in enum_configs(window, n)
                    if all(window.lo < x < window.hi for x in c.support)]
        pairs = [(b, a) for b in interior for a in interior]
    checked = 0
    for source, target in pairs:
        w = fwd.row(source).get((target, 0, 0), Fraction(0))
        w_inv = inv.row(source).get((target, 0, 0), Fraction(0))
        g_ratio = position_weight(shift(source, -1), q) / position_weight(target, q)
        checked += 1
        if w_inv != w * g_ratio:
            report.record_failure(
                {"source": source.sites, "target": target.sites},
                w_inv, w * g_ratio)
    report.info["entries_checked"] = checked
    return report


def factorize_entry(params: ModelParams, window: Window, z: Fraction,
                    source: Config, target: Config):
    """Witness exponents (A1, A2, A3) for a capacity-1 forward entry.

    The entry equals b1**A1 * b2**A2 * ((1-b1)(1-b2))**A3 where A1 counts
    stay decisions, A2 empty sites passed over by a moving particle, and A3
    pickup/deposit pairs.  Raises if no single-line trajectory connects the
    two configurations.
    """
    if params.n != 1 or window.uniform_capacity != 1:
        raise ValueError("factorization is defined for n=1, capacity 1")
    a1 = a2 = a3 = 0
    line = 0
    for x in window.sites:
        b_occ = source.site(x)[1]
        a_occ = target.site(x)[1]
        if b_occ and a_occ:
            if line == 0:
                a1 += 1          # stay decision
            # loaded line passes an occupied site with weight 1
        elif b_occ and not a_occ:
            if line:
                raise ValueError("no trajectory: pickup with a loaded line")
            line = 1
        elif not b_occ and a_occ:
            if not line:
                raise ValueError("no trajectory: deposit from an empty line")
            line = 0
            a3 += 1
        else:
            if line:
                a2 += 1          # pass over an empty site
    if line:
        raise ValueError("no interior trajectory: particle leaves the window")
    return a1, a2, a3


def monomial_value(q: Fraction, z: Fraction, witness) -> Fraction:
    a1, a2, a3 = witness
    b1, b2 = b_factors(q, z)
    return b1 ** a1 * b2 ** a2 * ((1 - b1) * (1 - b2)) ** a3


def stayed_particles(source: Config, target: Config) -> int:
    """Block-level oracle: particles in source blocks that did not move.

    Valid for single-step targets with no empty sites passed (every move is
    a maximal block hopping one site right).
    """
    count = 0
    occupied = {x for x in source.window.sites if source.site(x)[1]}
    t_occupied = {x for x in target.window.sites if target.site(x)[1]}
    for start, end in blocks(source):
        if start not in occupied:
            continue
        block_sites = set(range(start, end + 1))
        if block_sites <= t_occupied:
            count += end - start + 1
        else:
            moved = {x + 1 for x in block_sites}
            if not moved <= t_occupied:
                raise ValueError("target is not a union of stays and unit block hops")
    return count
