"""Orbit computation and the period certificate at the orbit point.

The certificate is the pair of congruences that make the analytic-arc
construction applicable to tau = sigma^j at the base point:

    sigma^j(q) = q (mod p)  and  J(sigma^j, q) = I (mod p).

We take j = d * e where d is the residue-orbit period of q mod p and e is
the multiplicative order of J(sigma^d, q) mod p.  This point-local j can be
far smaller than any exponent valid at every point simultaneously (those
are bounded through |GL_n(F_p)|, which is astronomically larger); both
certificate conditions are re-verified directly, so soundness does not
depend on the choice.

Powers sigma^j are never composed symbolically: degrees would blow up
exponentially.  Orbits iterate sigma one step at a time, and Jacobians of
powers are chain-rule products of single-step Jacobians along the orbit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InternalContradiction, JacobianNotInvertible
from .exact import AutomorphismCert, evaluate_map
from .padic import PadicContext

__all__ = [
    "PeriodCertificate",
    "OrbitTable",
    "ExactOrbit",
    "residue_orbit_period",
    "jacobian_order",
    "find_period",
    "orbit_values",
    "exact_orbit_point",
    "mat_mul_mod",
    "mat_inv_mod",
]


def mat_mul_mod(a, b, m):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) % m for j in range(n)]
        for i in range(n)
    ]


def _mat_eye(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_inv_mod(a, p):
    """Inverse of a matrix over F_p by Gauss-Jordan."""
    n = len(a)
    aug = [[a[i][j] % p for j in range(n)] + _mat_eye(n)[i] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] % p), None)
        if piv is None:
            raise JacobianNotInvertible("matrix singular mod p")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [x * inv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _gl_order(n: int, p: int) -> int:
    order = 1
    pn = p ** n
    for i in range(n):
        order *= pn - p ** i
    return order


@dataclass(frozen=True)
class PeriodCertificate:
    """j = d * e with both congruence conditions verified at the base point."""

    j: int
    d: int
    e: int
    base_point: tuple  # q mod p


def residue_orbit_period(embedded, q_mod_p=None) -> int:
    """Smallest d >= 1 with sigma^d(q) = q mod p.

    Residue orbits are purely periodic because sigma mod p is a bijection
    of a finite set, so plain forward iteration terminates.
    """
    p = embedded.ctx.p
    start = tuple(
        x % p for x in (q_mod_p if q_mod_p is not None else embedded.q_res)
    )
    cap = p ** len(start) + 1
    point = embedded.apply_sigma(start, p)
    d = 1
    while point != start:
        point = embedded.apply_sigma(point, p)
        d += 1
        if d > cap:
            raise InternalContradiction(
                "residue orbit failed to close; map is not bijective mod p"
            )
    return d


def jacobian_order(embedded, d: int) -> int:
    """Order e of J(sigma^d, q) mod p.

    J(sigma^d, q) is the chain-rule product of the single-step Jacobians
    J(sigma, sigma^t(q)) for t = d-1 .. 0; the order is found by iterated
    multiplication, capped by |GL_n(F_p)|.
    """
    p = embedded.ctx.p
    n = len(embedded.q_res)
    point = tuple(x % p for x in embedded.q_res)
    jd = _mat_eye(n)
    for _ in range(d):
        jd = mat_mul_mod(embedded.jacobian_at(point, p), jd, p)
        point = embedded.apply_sigma(point, p)
    det = _det_mod(jd, p)
    if det == 0:
        raise JacobianNotInvertible("J(sigma^d, q) singular mod p")
    eye = _mat_eye(n)
    cap = _gl_order(n, p)
    acc = jd
    e = 1
    while acc != eye:
        acc = mat_mul_mod(acc, jd, p)
        e += 1
        if e > cap:
            raise InternalContradiction("matrix order exceeded |GL_n(F_p)|")
    return e


def _det_mod(mat, p):
    n = len(mat)
    a = [row[:] for row in mat]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            return 0
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col] % p
        inv = pow(a[col][col], -1, p)
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv % p
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[col])]
    return det % p


def find_period(embedded) -> PeriodCertificate:
    """Period certificate j = d * e at the embedded base point.

    Both defining congruences are re-verified directly mod p after
    construction; a failure is a bug, not an input problem.
    """
    p = embedded.ctx.p
    q = tuple(x % p for x in embedded.q_res)
    d = residue_orbit_period(embedded)
    e = jacobian_order(embedded, d)
    j = d * e
    # direct verification of both certificate conditions
    n = len(q)
    point = q
    jac = _mat_eye(n)
    for _ in range(j):
        jac = mat_mul_mod(embedded.jacobian_at(point, p), jac, p)
        point = embedded.apply_sigma(point, p)
    if point != q:
        raise InternalContradiction("sigma^j(q) != q mod p after certification")
    if jac != _mat_eye(n):
        raise InternalContradiction("J(sigma^j, q) != I mod p after certification")
    return PeriodCertificate(j=j, d=d, e=e, base_point=q)


class ExactOrbit:
    """Two-sided exact orbit of q under sigma, grown on demand.

    Forward points use the forward map, negative indices the inverse map.
    Immutable inputs; the caches only append, guarded for concurrent use.
    """

    def __init__(self, cert: AutomorphismCert, q):
        import threading

        self.cert = cert
        self.q = tuple(q)
        self._fwd = [self.q]
        self._bwd = [self.q]
        self._lock = threading.Lock()

    def point(self, m: int):
        if m >= 0:
            if m >= len(self._fwd):
                with self._lock:
                    while m >= len(self._fwd):
                        self._fwd.append(
                            evaluate_map(self.cert.forward, self._fwd[-1])
                        )
            return self._fwd[m]
        k = -m
        if k >= len(self._bwd):
            with self._lock:
                while k >= len(self._bwd):
                    self._bwd.append(
                        evaluate_map(self.cert.inverse, self._bwd[-1])
                    )
        return self._bwd[k]


def exact_orbit_point(cert: AutomorphismCert, q, m: int):
    """sigma^m(q) in exact field arithmetic; negative m uses the inverse."""
    point = tuple(q)
    step = cert.forward if m >= 0 else cert.inverse
    for _ in range(abs(m)):
        point = evaluate_map(step, point)
    return point


@dataclass
class OrbitTable:
    """Residue orbit of tau = (base map applied `step` times) from a point.

    values[m] is the coordinate tuple of tau^m(start) mod p^N.  The exact
    side, when attached, maps table index m to exact orbit index
    offset + step * m of a shared two-sided exact orbit.
    """

    ctx: PadicContext
    step: int
    values: list
    exact: ExactOrbit | None = None
    offset: int = 0

    def __len__(self):
        return len(self.values)

    def residue_point(self, m: int):
        return self.values[m]

    def exact_point(self, m: int):
        if self.exact is None:
            raise ValueError("orbit table has no exact side attached")
        return self.exact.point(self.offset + self.step * m)


def orbit_values(embedded_or_apply, s, K: int, ctx: PadicContext) -> OrbitTable:
    """K+1 iterates of a map mod p^N starting from residue point s.

    The first argument is either an EmbeddedInstance (its sigma is iterated)
    or a callable point -> point acting on residue tuples mod p^N.
    """
    if callable(embedded_or_apply):
        step_fn = embedded_or_apply
    else:
        step_fn = lambda pt: embedded_or_apply.apply_sigma(pt)  # noqa: E731
    mod = ctx.modulus
    point = tuple(x % mod for x in s)
    vals = [point]
    for _ in range(K):
        point = tuple(x % mod for x in step_fn(point))
        vals.append(point)
    return OrbitTable(ctx=ctx, step=1, values=vals)
