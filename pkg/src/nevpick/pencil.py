"""Tridiagonal linear pencil ``H - lam J`` built from Schur coefficients.

Entries at level ``j``: ``H[j,j] = a1_j``, ``H[j,j+1] = z_j b_j``,
``J[j,j] = 1 + b_j^2`` (equal to ``a2_j``) and ``J[j,j+1] = b_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import DEFAULT_PRECISION, Precision
from .errors import EigenFailure, InsufficientDepth, SingularJ, SingularPencil
from .schur import SchurChain


@dataclass(frozen=True)
class PencilCoefficients:
    """Per-level Schur data ``(z_j, a1_j, a2_j, b_j)`` viewed as pencil entries."""

    nodes: tuple
    a1: tuple
    a2: tuple
    b: tuple
    prec: Precision = DEFAULT_PRECISION
    terminated_at: int | None = None

    def __len__(self):
        return len(self.nodes)

    @property
    def h_diag(self):
        return self.a1

    @property
    def h_off(self):
        return tuple(z * b for z, b in zip(self.nodes, self.b))

    @property
    def j_diag(self):
        """Correctly rounded ``1 + b^2``; within an ulp or two of ``a2``, and
        exactly what ``L^H L`` reproduces."""
        fdot = self.prec.ctx.fdot
        return tuple(fdot([(1, 1), (b, b)]) for b in self.b)

    @property
    def j_off(self):
        return self.b

    def widened(self, extra_bits: int) -> "PencilCoefficients":
        """The same (exactly representable) coefficients on a wider context."""
        wide = self.prec.widened(extra_bits)
        return PencilCoefficients(tuple(wide.mpc(z) for z in self.nodes),
                                  tuple(wide.mpf(x) for x in self.a1),
                                  tuple(wide.mpf(x) for x in self.a2),
                                  tuple(wide.mpf(x) for x in self.b), wide, self.terminated_at)

    @classmethod
    def from_chain(cls, chain: SchurChain) -> "PencilCoefficients":
        s = chain.steps
        return cls(tuple(p.z for p in s), tuple(p.a1 for p in s), tuple(p.a2 for p in s),
                   tuple(p.b for p in s), chain.prec, chain.terminated_at)

    @classmethod
    def from_levels(cls, levels: Iterable, prec: Precision = DEFAULT_PRECISION):
        """Build from ``(z, a1, b)`` triples, setting ``a2 = 1 + b^2``.

        Any such data with ``Im z > 0``, real ``a1`` and ``b > 0`` defines a
        valid pencil.
        """
        zs, a1s, a2s, bs = [], [], [], []
        for z, a1, b in levels:
            z, a1, b = prec.mpc(z), prec.mpf(a1), prec.mpf(b)
            if not z.imag > 0 or b < 0:
                raise ValueError("need Im z > 0 and b >= 0")
            zs.append(z)
            a1s.append(a1)
            a2s.append(1 + b * b)
            bs.append(b)
        return cls(tuple(zs), tuple(a1s), tuple(a2s), tuple(bs), prec)


def as_coefficients(obj) -> PencilCoefficients:
    if isinstance(obj, PencilCoefficients):
        return obj
    if isinstance(obj, SchurChain):
        return PencilCoefficients.from_chain(obj)
    if isinstance(obj, TruncatedPencil):
        return obj.coeffs
    raise TypeError(f"cannot read pencil coefficients from {type(obj).__name__}")


@dataclass(frozen=True)
class TruncatedPencil:
    """Sections ``H_[0,n]``, ``J_[0,n]`` and the bidiagonal factor of ``J``.

    ``L`` is the ``(n+2) x (n+1)`` section of the infinite lower bidiagonal
    factor, so ``L^H L == J_[0,n]`` holds exactly; its last row carries
    ``b_n`` and vanishes only for a terminated chain.
    """

    n: int
    H: object
    J: object
    L: object
    coeffs: PencilCoefficients

    @property
    def prec(self):
        return self.coeffs.prec

    def reconstruct_J(self):
        return self.L.H * self.L


def assemble(source, n: int) -> TruncatedPencil:
    coeffs = as_coefficients(source)
    if n < 0:
        raise ValueError("order must be nonnegative")
    if len(coeffs) < n + 1:
        raise InsufficientDepth(f"order {n} needs {n + 1} levels, chain has {len(coeffs)}")
    ctx = coeffs.prec.ctx
    size = n + 1
    H = ctx.matrix(size, size)
    J = ctx.matrix(size, size)
    L = ctx.matrix(size + 1, size)
    h_off, j_diag = coeffs.h_off, coeffs.j_diag
    for k in range(size):
        H[k, k] = ctx.mpc(coeffs.a1[k])
        J[k, k] = j_diag[k]
        L[k, k] = 1
        L[k + 1, k] = coeffs.b[k]
        if k < n:
            H[k, k + 1] = h_off[k]
            H[k + 1, k] = ctx.conj(h_off[k])
            J[k, k + 1] = J[k + 1, k] = coeffs.b[k]
    return TruncatedPencil(n, H, J, L, coeffs)


def _section_det(diag, prod_off, lo, hi, one):
    """Determinant of the tridiagonal section ``[lo, hi]`` (empty -> 1)."""
    d_prev, d = one, one
    for k in range(lo, hi + 1):
        if k == lo:
            d_prev, d = d, diag[k]
        else:
            d_prev, d = d, diag[k] * d - prod_off[k - 1] * d_prev
    return d


def _pencil_entries(pencil: TruncatedPencil, lam):
    H, J = pencil.H, pencil.J
    size = pencil.n + 1
    diag = [lam * J[k, k] - H[k, k] for k in range(size)]
    prod = [(lam * J[k, k + 1] - H[k, k + 1]) * (lam * J[k + 1, k] - H[k + 1, k])
            for k in range(size - 1)]
    return diag, prod


def charpoly_P(pencil: TruncatedPencil, lam, j: int):
    """``det(lam J_[0,j-1] - H_[0,j-1])``, with ``P_0 = 1``."""
    if not 0 <= j <= pencil.n + 1:
        raise ValueError(f"j must lie in [0, {pencil.n + 1}]")
    ctx = pencil.prec.ctx
    diag, prod = _pencil_entries(pencil, pencil.prec.mpc(lam))
    return _section_det(diag, prod, 0, j - 1, ctx.mpc(1))


def charpoly_Q(pencil: TruncatedPencil, lam, j: int):
    """``det(lam J_[1,j-1] - H_[1,j-1])``, with ``Q_0 = 0`` and ``Q_1 = 1``."""
    if not 0 <= j <= pencil.n + 1:
        raise ValueError(f"j must lie in [0, {pencil.n + 1}]")
    ctx = pencil.prec.ctx
    if j == 0:
        return ctx.mpc(0)
    diag, prod = _pencil_entries(pencil, pencil.prec.mpc(lam))
    return _section_det(diag, prod, 1, j - 1, ctx.mpc(1))


def _j_section(pencil, n):
    if not 0 <= n <= pencil.n:
        raise ValueError(f"n must lie in [0, {pencil.n}]")
    J = pencil.J
    diag = [J[k, k] for k in range(n + 1)]
    prod = [J[k, k + 1] ** 2 for k in range(n)]
    return diag, prod


def j_inverse_entry(pencil: TruncatedPencil, n: int):
    """``(J_[0,n]^{-1} e_0, e_0)`` by a bottom-up elimination sweep."""
    diag, prod = _j_section(pencil, n)
    s = diag[n]
    for k in range(n - 1, -1, -1):
        if not s > 0:
            raise SingularJ(f"nonpositive pivot at level {k + 1}")
        s = diag[k] - prod[k] / s
    if not s > 0:
        raise SingularJ("nonpositive pivot at level 0")
    return 1 / s


def leading_j_determinants(pencil: TruncatedPencil, n: int | None = None):
    """``[det J_[0,0], ..., det J_[0,n]]``."""
    n = pencil.n if n is None else n
    diag, prod = _j_section(pencil, n)
    one = pencil.prec.ctx.one
    return [_section_det(diag, prod, 0, k, one) for k in range(n + 1)]


def normalizing_ratios(pencil: TruncatedPencil, n: int):
    """``theta_n = det J_[0,n] / det J_[1,n]`` and ``eta_n = det J_[0,n] / det J_[0,n-1]``."""
    diag, prod = _j_section(pencil, n)
    one = pencil.prec.ctx.one
    full = _section_det(diag, prod, 0, n, one)
    theta = full / _section_det(diag, prod, 1, n, one)
    eta = full / _section_det(diag, prod, 0, n - 1, one)
    return theta, eta


def _cholesky_bidiagonal(pencil, n):
    ctx = pencil.prec.ctx
    J = pencil.J
    C = ctx.matrix(n + 1, n + 1)
    sub = ctx.zero
    for k in range(n + 1):
        piv = J[k, k] - sub * sub
        if not piv > 0:
            raise SingularJ(f"J section not positive definite at level {k}")
        C[k, k] = ctx.sqrt(piv)
        if k < n:
            sub = J[k + 1, k] / C[k, k]
            C[k + 1, k] = sub
    return C


def _lower_bidiagonal_solve(ctx, C, B):
    """``C^{-1} B`` for lower bidiagonal ``C`` (column by column)."""
    size = C.rows
    X = ctx.matrix(size, B.cols)
    for col in range(B.cols):
        prev = 0
        for k in range(size):
            rhs = B[k, col] - (C[k, k - 1] * prev if k else 0)
            prev = rhs / C[k, k]
            X[k, col] = prev
    return X


def pencil_eigenvalues(pencil: TruncatedPencil, n: int):
    """Real zeros of ``P_{n+1}``: eigenvalues of ``C^{-1} H C^{-H}`` with ``J = C C^H``."""
    if not 0 <= n <= pencil.n:
        raise ValueError(f"n must lie in [0, {pencil.n}]")
    ctx = pencil.prec.ctx
    C = _cholesky_bidiagonal(pencil, n)
    H = pencil.H[0:n + 1, 0:n + 1] if n < pencil.n else pencil.H
    X = _lower_bidiagonal_solve(ctx, C, H)
    M = _lower_bidiagonal_solve(ctx, C, X.H).H
    M = (M + M.H) / 2
    try:
        evals = ctx.eighe(M, eigvals_only=True)
    except (ValueError, RuntimeError, ZeroDivisionError) as exc:
        raise EigenFailure(str(exc)) from exc
    return sorted(ctx.re(e) for e in evals)


def second_kind_zeros(pencil: TruncatedPencil, n: int):
    """Real zeros of ``Q_{n+1} = det(lam J_[1,n] - H_[1,n])`` (none for n = 0)."""
    if not 0 <= n <= pencil.n:
        raise ValueError(f"n must lie in [0, {pencil.n}]")
    if n == 0:
        return []
    c = pencil.coeffs
    shifted = PencilCoefficients(c.nodes[1:], c.a1[1:], c.a2[1:], c.b[1:], c.prec)
    return pencil_eigenvalues(assemble(shifted, n - 1), n - 1)


def mfun_via_matrix(pencil: TruncatedPencil, n: int, lam):
    """``((H_[0,n] - lam J_[0,n])^{-1} e_0, e_0)`` by forward elimination and back substitution."""
    prec = pencil.prec
    ctx = prec.ctx
    lam = prec.mpc(lam)
    if not 0 <= n <= pencil.n:
        raise ValueError(f"n must lie in [0, {pencil.n}]")
    if abs(lam.imag) <= prec.geo_tol:
        raise SingularPencil("m-function requested on the real axis")
    H, J = pencil.H, pencil.J
    diag = [H[k, k] - lam * J[k, k] for k in range(n + 1)]
    upper = [H[k, k + 1] - lam * J[k, k + 1] for k in range(n)]
    lower = [H[k + 1, k] - lam * J[k + 1, k] for k in range(n)]
    cp, rp = [], []
    for k in range(n + 1):
        denom = diag[k] - (lower[k - 1] * cp[k - 1] if k else 0)
        if denom == 0:
            raise SingularPencil(f"zero pivot at row {k}")
        cp.append(upper[k] / denom if k < n else 0)
        rp.append(((1 if k == 0 else 0) - (lower[k - 1] * rp[k - 1] if k else 0)) / denom)
    x = rp[n]
    for k in range(n - 1, -1, -1):
        x = rp[k] - cp[k] * x
    return x


__all__ = [
    "PencilCoefficients", "TruncatedPencil", "as_coefficients", "assemble", "charpoly_P",
    "charpoly_Q", "j_inverse_entry", "leading_j_determinants", "mfun_via_matrix",
    "normalizing_ratios", "pencil_eigenvalues", "second_kind_zeros",
]
