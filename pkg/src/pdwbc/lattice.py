"""Six-vertex configurations on the (n-m) x n lattice with partial domain wall
boundary conditions.

Arrow encoding used throughout: a horizontal edge is 1 when its arrow points
right, a vertical edge is 1 when its arrow points up.  A vertex with edges
(left, right, bottom, top) = (hl, hr, vb, vt) obeys the ice rule iff
``hl + vb == hr + vt``.  Vertex types:

    type  hl hr vb vt   arrows
     1     1  1  1  1   right, up
     2     0  0  0  0   left, down
     3     1  1  0  0   right, down
     4     0  0  1  1   left, up
     5     0  1  1  0   horizontal out, vertical in
     6     1  0  0  1   horizontal in, vertical out

Boundary: left edges point left (0), right edges point right (1), bottom
edges point up into the lattice (1); the top row carries exactly m up arrows.
Rows are indexed bottom to top, columns left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath

from .scalar import DEFAULT_PRECISION, DomainError, QuadSurd, exact_sqrt

VERTEX_EDGES = {
    1: (1, 1, 1, 1),
    2: (0, 0, 0, 0),
    3: (1, 1, 0, 0),
    4: (0, 0, 1, 1),
    5: (0, 1, 1, 0),
    6: (1, 0, 0, 1),
}
EDGES_TO_TYPE = {v: k for k, v in VERTEX_EDGES.items()}

MAX_ENUM_N = 6
MAX_TRANSFER_N = 16


class SizeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameters and weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """Rational exponentials T = e^t and G = e^gamma, with T > G > 1."""

    T: Fraction
    G: Fraction

    def __post_init__(self):
        T, G = Fraction(self.T), Fraction(self.G)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "G", G)
        if not (T > G > 1):
            raise DomainError(f"need T > G > 1 (t > gamma > 0), got T={T}, G={G}")

    @property
    def a(self) -> Fraction:
        return (self.T / self.G - self.G / self.T) / 2

    @property
    def b(self) -> Fraction:
        return (self.T * self.G - 1 / (self.T * self.G)) / 2

    @property
    def c(self) -> Fraction:
        return (self.G ** 2 - self.G ** -2) / 2

    @property
    def a_minus(self) -> Fraction:
        return self.a / self.G

    @property
    def a_plus(self) -> Fraction:
        return self.a * self.G

    @property
    def b_minus(self) -> Fraction:
        return self.b / self.G

    @property
    def b_plus(self) -> Fraction:
        return self.b * self.G

    @property
    def q(self) -> Fraction:
        """e^{-2(t-gamma)}."""
        return self.G ** 2 / self.T ** 2

    @property
    def s(self) -> Fraction:
        """e^{-2(t+gamma)}."""
        return 1 / (self.T ** 2 * self.G ** 2)

    @property
    def varphi(self) -> Fraction:
        return self.a * self.b

    def is_ferroelectric(self) -> bool:
        return self.b_minus * self.b_plus > self.a_minus * self.a_plus + self.c ** 2

    def weights(self) -> "Weights6":
        return Weights6(self.a_minus, self.a_plus, self.b_minus, self.b_plus, self.c, self.c)


@dataclass(frozen=True)
class Weights6:
    w1: object
    w2: object
    w3: object
    w4: object
    w5: object
    w6: object

    def __getitem__(self, vtype: int):
        return (self.w1, self.w2, self.w3, self.w4, self.w5, self.w6)[vtype - 1]

    def as_tuple(self) -> tuple:
        return (self.w1, self.w2, self.w3, self.w4, self.w5, self.w6)

    def scaled(self, lam) -> "Weights6":
        return Weights6(*(lam * w for w in self.as_tuple()))


def row_weights(L, G) -> Weights6:
    """Weights (a_-, a_+, b_-, b_+, c, c) of a row with spectral parameter e^lambda = L."""
    a = (L / G - G / L) / 2
    b = (L * G - 1 / (L * G)) / 2
    c = (G ** 2 - 1 / G ** 2) / 2
    return Weights6(a / G, a * G, b / G, b * G, c, c)


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    """A full arrow assignment.

    ``vertical[r][j]`` is the vertical edge entering row r from below
    (r = 0..rows, r = rows being the top boundary); ``horizontal[r][j]`` is the
    horizontal edge left of column j in row r (j = 0..n).
    """

    n: int
    m: int
    vertical: tuple[tuple[int, ...], ...]
    horizontal: tuple[tuple[int, ...], ...]

    @property
    def rows(self) -> int:
        return self.n - self.m

    def vertex_type(self, r: int, j: int) -> int:
        key = (self.horizontal[r][j], self.horizontal[r][j + 1],
               self.vertical[r][j], self.vertical[r + 1][j])
        return EDGES_TO_TYPE[key]

    def types(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.vertex_type(r, j) for j in range(self.n))
                     for r in range(self.rows))

    def to_text(self) -> str:
        """One digit per vertex type, top row first."""
        return "\n".join("".join(str(t) for t in row) for row in reversed(self.types()))

    @classmethod
    def from_types(cls, n: int, m: int, types: Sequence[Sequence[int]]) -> "Configuration":
        """Build from a bottom-to-top grid of vertex types, checking arrow consistency."""
        rows = n - m
        vertical = [[None] * n for _ in range(rows + 1)]
        horizontal = [[None] * (n + 1) for _ in range(rows)]

        def put(grid, r, j, v):
            if grid[r][j] is not None and grid[r][j] != v:
                raise ValueError(f"inconsistent arrows at row {r}, edge {j}")
            grid[r][j] = v

        for r in range(rows):
            for j in range(n):
                hl, hr, vb, vt = VERTEX_EDGES[types[r][j]]
                put(horizontal, r, j, hl)
                put(horizontal, r, j + 1, hr)
                put(vertical, r, j, vb)
                put(vertical, r + 1, j, vt)
        cfg = cls(n, m, tuple(map(tuple, vertical)), tuple(map(tuple, horizontal)))
        if not cfg.satisfies_boundary():
            raise ValueError("types do not satisfy pDWBC")
        return cfg

    @classmethod
    def from_text(cls, n: int, m: int, text: str) -> "Configuration":
        lines = [ln for ln in text.strip().splitlines()]
        return cls.from_types(n, m, [[int(ch) for ch in ln] for ln in reversed(lines)])

    def satisfies_boundary(self) -> bool:
        if any(v != 1 for v in self.vertical[0]):
            return False
        if sum(self.vertical[self.rows]) != self.m:
            return False
        return all(row[0] == 0 and row[-1] == 1 for row in self.horizontal)

    def is_valid(self) -> bool:
        if not self.satisfies_boundary():
            return False
        for r in range(self.rows):
            for j in range(self.n):
                hl, hr = self.horizontal[r][j], self.horizontal[r][j + 1]
                if hl + self.vertical[r][j] != hr + self.vertical[r + 1][j]:
                    return False
        return True


def _check_sizes(n: int, m: int, cap: int):
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    if n > cap:
        raise SizeError(f"n={n} exceeds the supported size {cap}")


def _row_transitions(bottom: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (top, horizontal) arrow rows compatible with ``bottom`` and the row boundary."""
    n = len(bottom)

    def rec(j, h, top, horiz):
        if j == n:
            if h == 1:
                yield tuple(top), tuple(horiz)
            return
        for vt in (0, 1):
            hr = h + bottom[j] - vt
            if hr in (0, 1):
                top.append(vt)
                horiz.append(hr)
                yield from rec(j + 1, hr, top, horiz)
                top.pop()
                horiz.pop()

    yield from rec(0, 0, [], [0])


def enumerate_configs(n: int, m: int) -> list[Configuration]:
    """Every pDWBC configuration on the (n-m) x n lattice, n <= 6."""
    _check_sizes(n, m, MAX_ENUM_N)
    rows = n - m
    out: list[Configuration] = []

    def rec(r, verticals, horizontals):
        if r == rows:
            out.append(Configuration(n, m, tuple(verticals), tuple(horizontals)))
            return
        for top, horiz in _row_transitions(verticals[-1]):
            verticals.append(top)
            horizontals.append(horiz)
            rec(r + 1, verticals, horizontals)
            verticals.pop()
            horizontals.pop()

    rec(0, [tuple([1] * n)], [])
    return out


def vertex_counts(cfg: Configuration) -> tuple[int, ...]:
    counts = [0] * 6
    for row in cfg.types():
        for t in row:
            counts[t - 1] += 1
    return tuple(counts)


def config_weight(cfg: Configuration, w) -> object:
    """Product of vertex weights.  ``w`` is a Weights6 or one Weights6 per row (bottom first)."""
    per_row = w if isinstance(w, (list, tuple)) else [w] * cfg.rows
    out = 1
    for r, row in enumerate(cfg.types()):
        for t in row:
            out = out * per_row[r][t]
    return out


def check_conservation(cfg: Configuration, n: int | None = None, m: int | None = None) -> bool:
    n = cfg.n if n is None else n
    m = cfg.m if m is None else m
    N1, N2, N3, N4, N5, N6 = vertex_counts(cfg)
    return (N1 + N2 + N3 + N4 + N5 + N6 == n * (n - m)
            and N5 - N6 == n - m
            and N1 - N2 + N4 - N3 == m * (n - m))


# ---------------------------------------------------------------------------
# transfer matrix
# ---------------------------------------------------------------------------

def partition_transfer(n: int, m: int, w) -> object:
    """Partition function by row-to-row transfer over vertical-edge states.

    ``w`` is either one Weights6 for all rows or a sequence of Weights6 ordered
    bottom row first.  Any ring type supporting + and * works as a weight.
    """
    _check_sizes(n, m, MAX_TRANSFER_N)
    rows = n - m
    per_row = list(w) if isinstance(w, (list, tuple)) else [w] * rows
    if len(per_row) != rows:
        raise ValueError(f"expected {rows} row weights, got {len(per_row)}")

    state: dict[tuple[int, ...], object] = {tuple([1] * n): 1}
    for r in range(rows):
        wr = per_row[r]
        wt = {t: wr[t] for t in range(1, 7)}
        # sweep columns; partial key = (top bits so far + bottom bits remaining, h)
        cur: dict[tuple[tuple[int, ...], int], object] = {(s, 0): z for s, z in state.items()}
        for j in range(n):
            nxt: dict = {}
            for (s, h), z in cur.items():
                vb = s[j]
                for vt in (0, 1):
                    hr = h + vb - vt
                    if hr not in (0, 1):
                        continue
                    key = (s[:j] + (vt,) + s[j + 1:], hr)
                    term = z * wt[EDGES_TO_TYPE[(h, hr, vb, vt)]]
                    nxt[key] = nxt[key] + term if key in nxt else term
            cur = nxt
        state = {s: z for (s, h), z in cur.items() if h == 1}
    total = 0
    for z in state.values():
        total = total + z
    return total


def partition_enumerated(n: int, m: int, w) -> object:
    total = 0
    for cfg in enumerate_configs(n, m):
        total = total + config_weight(cfg, w)
    return total


# ---------------------------------------------------------------------------
# height function
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightGrid:
    """Heights h[(x, y)] on faces; x counts columns from the right, y rows from the bottom."""

    n: int
    m: int
    h: dict

    def __getitem__(self, xy):
        return self.h[xy]


def _step_sign(move: tuple[int, int], arrow: tuple[int, int]) -> int:
    # +1 when the arrow crossing the step points to the right of the direction
    # of travel (clockwise rotation of the move), -1 otherwise.
    dx, dy = move
    right = (dy, -dx)
    return 1 if arrow == right else -1


def height_function(cfg: Configuration) -> HeightGrid:
    """Integrate the arrow field into face heights, anchored at h(0,0)=0."""
    n, rows = cfg.n, cfg.rows
    # face (x, y) sits between columns n-x-1 and n-x (0-based from the left),
    # between horizontal lines y-1 and y.  Plane directions: east=(1,0), north=(0,1).
    h = {(0, 0): 0}
    for y in range(rows + 1):
        if y > 0:
            # move north from (0, y-1) to (0, y), crossing the right boundary edge of row y-1
            arrow = (1, 0) if cfg.horizontal[y - 1][n] == 1 else (-1, 0)
            h[(0, y)] = h[(0, y - 1)] + _step_sign((0, 1), arrow)
        for x in range(1, n + 1):
            # move west from (x-1, y) to (x, y), crossing vertical edge of column n-x
            col = n - x
            arrow = (0, 1) if cfg.vertical[y][col] == 1 else (0, -1)
            h[(x, y)] = h[(x - 1, y)] + _step_sign((-1, 0), arrow)
    # consistency of the remaining (north) steps
    for y in range(1, rows + 1):
        for x in range(1, n + 1):
            col_edge = n - x  # horizontal edge index left of column n-x+1... between faces
            arrow = (1, 0) if cfg.horizontal[y - 1][col_edge] == 1 else (-1, 0)
            if h[(x, y)] - h[(x, y - 1)] != _step_sign((0, 1), arrow):
                raise ValueError("arrow field is not a gradient (ice rule violated)")
    return HeightGrid(cfg.n, cfg.m, h)


def height_sums(n: int, m: int) -> tuple[int, int]:
    """Diagonal boundary sums (S, T) used with the top-row sum H."""
    S = (n - m - 1) * (n - m) // 2 + (m - 1) * m // 2
    T = (n - m) * (n + m + 1) // 2 + (m - 1) * (2 * n - m) // 2
    return S, T


def verify_height_identities(cfg: Configuration) -> bool:
    n, m, rows = cfg.n, cfg.m, cfg.rows
    hg = height_function(cfg)
    h = hg.h
    for k in range(rows + 1):
        if h[(0, k)] != k or h[(n, k)] != n - k:
            return False
    for j in range(n + 1):
        if h[(j, 0)] != j:
            return False
    H = sum(h[(j, rows)] for j in range(1, n))
    S, T = height_sums(n, m)
    N1, N2, N3, N4, _, _ = vertex_counts(cfg)
    return (H - S == 2 * N1 - 2 * N2
            and H - T == 2 * N3 - 2 * N4
            and (N1 - N2) - (N3 - N4) == m * (n - m)
            and T - S == 2 * m * (n - m))


def diagonal_jump(cfg: Configuration, r: int, j: int, anti: bool = False) -> int:
    """Height change across vertex (row r, column j) along y=x (or y=-x when ``anti``)."""
    h = height_function(cfg).h
    x = cfg.n - j - 1  # face to the right of column j has x = n-j-1
    if anti:
        return h[(x + 1, r)] - h[(x, r + 1)]
    return h[(x + 1, r + 1)] - h[(x, r)]


# ---------------------------------------------------------------------------
# ground state
# ---------------------------------------------------------------------------

def ground_state(n: int, m: int) -> Configuration:
    """Type-5 diagonal from the bottom-right corner, type 3 to its right, type 4 to its left."""
    if not (0 <= m < n):
        raise DomainError(f"need 0 <= m < n, got n={n}, m={m}")
    types = []
    for r in range(n - m):
        diag = n - 1 - r
        types.append([3 if j > diag else 5 if j == diag else 4 for j in range(n)])
    return Configuration.from_types(n, m, types)


def ground_state_weight(n: int, m: int, p: ModelParams) -> Fraction:
    """b^{n(n-m)} G^{m(n-m)} (c/b)^{n-m}."""
    return p.b ** (n * (n - m)) * p.G ** (m * (n - m)) * (p.c / p.b) ** (n - m)


def max_weight_configs(n: int, m: int, w) -> tuple[object, list[Configuration]]:
    """Largest configuration weight and every configuration attaining it (ties reported)."""
    best = None
    arg: list[Configuration] = []
    for cfg in enumerate_configs(n, m):
        wt = config_weight(cfg, w)
        if best is None or wt > best:
            best, arg = wt, [cfg]
        elif wt == best:
            arg.append(cfg)
    return best, arg


# ---------------------------------------------------------------------------
# parameter reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Reduction:
    weights: Weights6
    prefactor: object
    exact: bool


def reduce_parameters(w: Weights6, n: int, m: int, prec: int = DEFAULT_PRECISION) -> Reduction:
    """Rewrite ``w`` as (a e^-eta, a e^eta, b e^-eta, b e^eta, c, c) times a prefactor.

    Z_{n-m,n}(w) = prefactor * Z_{n-m,n}(reduced).  Exact when w2/w1, w4/w3 and
    w6/w5 are squares of rationals (values then live in Q(sqrt(e^{2 eta})));
    otherwise everything is returned as mpf at ``prec`` bits.
    """
    ws = [Fraction(x) for x in w.as_tuple()]
    if any(x <= 0 for x in ws):
        raise DomainError("weights must be positive")
    w1, w2, w3, w4, w5, w6 = ws
    e_alpha = exact_sqrt(w2 / w1)
    e_beta = exact_sqrt(w4 / w3)
    e_xi = exact_sqrt(w6 / w5)
    k = m * (n - m)
    if e_alpha is None or e_beta is None or e_xi is None:
        with mpmath.workprec(prec):
            mw = [mpmath.mpf(x.numerator) / x.denominator for x in ws]
            ea, eb, ex = (mpmath.sqrt(mw[1] / mw[0]), mpmath.sqrt(mw[3] / mw[2]),
                          mpmath.sqrt(mw[5] / mw[4]))
            a, b, c = mw[0] * ea, mw[2] * eb, mw[4] * ex
            eta = mpmath.sqrt(ea * eb)
            pref = (mpmath.sqrt(eb / ea)) ** k / ex ** (n - m)
            red = Weights6(a / eta, a * eta, b / eta, b * eta, c, c)
        return Reduction(red, pref, exact=False)

    a, b, c = w1 * e_alpha, w3 * e_beta, w5 * e_xi
    E = e_alpha * e_beta  # e^{2 eta}
    root = exact_sqrt(E)
    if root is not None:
        e_eta = root
        e_mtheta = root / e_alpha
    else:
        e_eta = QuadSurd(Fraction(0), Fraction(1), E)
        e_mtheta = e_eta * (1 / e_alpha)
    inv_eta = 1 / e_eta
    red = Weights6(a * inv_eta, a * e_eta, b * inv_eta, b * e_eta, c, c)
    pref = e_mtheta ** k * (1 / e_xi) ** (n - m)
    return Reduction(red, pref, exact=True)


def random_square_ratio_weights(rng, max_num: int = 9) -> Weights6:
    """Random positive weights whose pairwise ratios are rational squares."""
    def rnd():
        return Fraction(rng.randint(1, max_num), rng.randint(1, max_num))

    w1, w3, w5 = rnd(), rnd(), rnd()
    return Weights6(w1, w1 * rnd() ** 2, w3, w3 * rnd() ** 2, w5, w5 * rnd() ** 2)
