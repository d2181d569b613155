"""Self-concordant barrier oracles and their direct sums.

Every block stores a canonical barrier ``phi0`` on a canonical set and an
affine ``shift``; the block barrier is ``phi(u) = phi0(u + shift)``.  The
conjugate then picks up a linear term, ``phi*(y) = phi0*(y) - <y, shift>``,
and the dual domain is unaffected by the shift.

SDP blocks work in the scaled symmetric vectorization produced by
:func:`svec`, so plain dot products of vectorized matrices are trace inner
products.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

__all__ = [
    "DomainError",
    "DualInfeasibleError",
    "ConjugateResult",
    "Barrier",
    "LinearBlock",
    "SocpBlock",
    "SdpBlock",
    "ExpBlock",
    "EntropyBlock",
    "PowerBlock",
    "DirectSumBarrier",
    "direct_sum",
    "svec",
    "smat",
    "BLOCK_KINDS",
]

_SQRT2 = math.sqrt(2.0)


class DomainError(ValueError):
    """Point outside the open domain of a barrier block."""

    def __init__(self, message, block=None):
        if block is not None:
            message = f"block {block}: {message}"
        super().__init__(message)
        self.block = block


class DualInfeasibleError(ValueError):
    """Conjugate evaluation failed: the argument is not in int D*."""

    def __init__(self, message, block=None):
        if block is not None:
            message = f"block {block}: {message}"
        super().__init__(message)
        self.block = block


@dataclass(frozen=True)
class ConjugateResult:
    """Maximizer and value of ``sup_u <y,u> - phi(u)``."""

    u_star: np.ndarray
    value: float
    warm_start_used: bool
    # sup of <y, w> - phi0(w) in the block's unshifted coordinates
    value0: float = None
    w_star: np.ndarray = None


# ----------------------------------------------------------------------------
# symmetric vectorization


def svec(M):
    """Lower triangle of a symmetric matrix, column by column, off-diagonals
    scaled by sqrt(2)."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    rows, cols = np.tril_indices(n)
    order = np.lexsort((rows, cols))
    rows, cols = rows[order], cols[order]
    scale = np.where(rows == cols, 1.0, _SQRT2)
    return M[rows, cols] * scale


def smat(v):
    """Inverse of :func:`svec`."""
    v = np.asarray(v, dtype=float)
    n = int(round((math.sqrt(8 * v.size + 1) - 1) / 2))
    if n * (n + 1) // 2 != v.size:
        raise ValueError(f"length {v.size} is not a triangular number")
    rows, cols = np.tril_indices(n)
    order = np.lexsort((rows, cols))
    rows, cols = rows[order], cols[order]
    scale = np.where(rows == cols, 1.0, 1.0 / _SQRT2)
    M = np.zeros((n, n))
    M[rows, cols] = v * scale
    M[cols, rows] = v * scale
    return M


# ----------------------------------------------------------------------------
# ray helpers


def _lorentz_max_step(z, t, dz, dt):
    """Largest a with t + a*dt > ||z + a*dz|| given t > ||z||."""
    qa = dt * dt - dz @ dz
    qb = 2.0 * (t * dt - z @ dz)
    qc = t * t - z @ z
    if qa == 0.0:
        return -qc / qb if qb < 0 else math.inf
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        return math.inf
    q = -0.5 * (qb + math.copysign(math.sqrt(disc), qb))
    roots = []
    if q != 0.0:
        roots.extend([q / qa, qc / q])
    pos = [r for r in roots if r > 0]
    return min(pos) if pos else math.inf


def _halfspace_max_step(s, ds):
    """Largest a with s + a*ds > 0 componentwise, given s > 0."""
    s = np.atleast_1d(s)
    ds = np.atleast_1d(ds)
    neg = ds < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-s[neg] / ds[neg]))


def _bisect_max_step(inside, u, du, grow_limit=1e30):
    """Largest a keeping ``inside(u + a du)`` for a convex open set."""
    a = 1.0
    if inside(u + a * du):
        while inside(u + a * du):
            if a >= grow_limit:
                return math.inf
            a *= 4.0
        lo, hi = a / 4.0, a
    else:
        lo, hi = 0.0, a
    for _ in range(200):
        if hi - lo <= 1e-15 * hi:
            break
        mid = 0.5 * (lo + hi)
        if inside(u + mid * du):
            lo = mid
        else:
            hi = mid
    return lo


# ----------------------------------------------------------------------------
# base class


class Barrier:
    """A ``theta``-self-concordant barrier for one block of D.

    Subclasses provide the canonical pieces ``_slack0``, ``_value0``,
    ``_gradient0``, ``_hessian0``, ``_cold0``, ``_dual_slack`` and
    ``_support0``; the base class handles shifts, domain errors and the
    generic damped-Newton conjugate.
    """

    kind = "abstract"
    dim = 0
    theta = 0.0

    def __init__(self, shift=None):
        if shift is None:
            shift = np.zeros(self.dim)
        shift = np.asarray(shift, dtype=float).reshape(-1)
        if shift.size != self.dim:
            raise ValueError(f"{self.kind}: shift has length {shift.size}, expected {self.dim}")
        self.shift = shift
        self.shift.setflags(write=False)

    # -- primal side ---------------------------------------------------------
    def _w(self, u):
        u = np.asarray(u, dtype=float).reshape(-1)
        if u.size != self.dim:
            raise ValueError(f"{self.kind}: point has length {u.size}, expected {self.dim}")
        return u + self.shift

    def slack(self, u):
        """Boundary margin: positive exactly on the open domain."""
        with np.errstate(all="ignore"):
            s = self._slack0(self._w(u))
        return s if math.isfinite(s) else -math.inf

    def contains(self, u):
        return self.slack(u) > 0

    def _checked(self, u):
        w = self._w(u)
        with np.errstate(all="ignore"):
            s = self._slack0(w)
        if not s > 0:
            raise DomainError(f"{self.kind} barrier evaluated outside its domain")
        return w

    def value(self, u):
        return float(self._value0(self._checked(u)))

    def gradient(self, u):
        return self._gradient0(self._checked(u))

    def hessian(self, u):
        return self._hessian0(self._checked(u))

    def cold_start(self):
        """A comfortably interior point."""
        return self._cold0() - self.shift

    def max_step(self, u, du):
        """Largest ``a >= 0`` with ``u + a du`` still interior (may be inf)."""
        return _bisect_max_step(self.contains, np.asarray(u, float), np.asarray(du, float))

    # -- dual side -----------------------------------------------------------
    def dual_cone_contains(self, y):
        """Closed-form membership in the interior of the polar of rec(D)."""
        y = np.asarray(y, dtype=float).reshape(-1)
        with np.errstate(all="ignore"):
            return bool(self._dual_slack(y) > 0)

    def dual_contains(self, y):
        return self.dual_cone_contains(y)

    def dual_max_step(self, y, dy):
        return _bisect_max_step(self.dual_cone_contains, np.asarray(y, float), np.asarray(dy, float))

    def support_function(self, y):
        """``sup {<y, z> : z in D}``; ``inf`` outside the polar cone."""
        y = np.asarray(y, dtype=float).reshape(-1)
        return float(self._support0(y) - y @ self.shift)

    # -- conjugate -----------------------------------------------------------
    def conjugate(self, y, warm=None):
        """Evaluate the Legendre-Fenchel conjugate at ``y``.

        Returns the maximizer ``u*`` (where ``phi'(u*) = y``) and the value
        ``<y, u*> - phi(u*)``.  Raises :class:`DualInfeasibleError` when the
        inner minimization diverges.
        """
        y = np.asarray(y, dtype=float).reshape(-1)
        if y.size != self.dim:
            raise ValueError(f"{self.kind}: dual point has length {y.size}, expected {self.dim}")
        closed = self._conjugate0(y)
        if closed is not None:
            w, used = closed[0], False
            val0 = float(closed[1])
        else:
            w, used = self._newton_conjugate(y, warm)
            val0 = float(y @ w - self._value0(w))
        return ConjugateResult(w - self.shift, val0 - float(y @ self.shift), used, val0, w)

    def fenchel_gap(self, u, y, conj=None):
        """``phi(u) + phi*(y) - <y, u>``, evaluated in unshifted coordinates
        so that large shifts do not cancel."""
        w = self._checked(u)
        if conj is None:
            conj = self.conjugate(y)
        y = np.asarray(y, dtype=float).reshape(-1)
        return float(self._value0(w) + conj.value0 - y @ w)

    def conjugate_hessian(self, y, warm=None):
        """``phi*''(y) = [phi''(u*)]^{-1}``."""
        res = self.conjugate(y, warm)
        return np.linalg.inv(self.hessian(res.u_star))

    def _conjugate0(self, y):
        return None

    def _newton_conjugate(self, y, warm):
        used = False
        w = None
        if warm is not None:
            cand = np.asarray(warm, dtype=float).reshape(-1) + self.shift
            if self._slack0(cand) > 0:
                w, used = cand, True
        if w is None:
            w = self._cold0()
        tol = 1e-12 * (1.0 + np.linalg.norm(y))
        last_lam = math.inf
        for _ in range(500):
            g = self._gradient0(w) - y
            H = self._hessian0(w)
            try:
                cf = linalg.cho_factor(H)
                dw = -linalg.cho_solve(cf, g)
            except linalg.LinAlgError:
                dw = -np.linalg.solve(H, g)
            lam = math.sqrt(max(-(g @ dw), 0.0))
            if lam <= tol:
                return w, used
            if lam < 1e-8 and lam > 0.5 * last_lam:
                # round-off floor reached
                return w, used
            last_lam = lam
            step = 1.0 if lam < 0.25 else 1.0 / (1.0 + lam)
            w_new = w + step * dw
            while not self._slack0(w_new) > 0:
                step *= 0.5
                if step < 1e-20:
                    raise DualInfeasibleError(f"{self.kind} conjugate Newton step left the domain")
                w_new = w + step * dw
            w = w_new
            if np.linalg.norm(w) > 1e12:
                raise DualInfeasibleError(f"{self.kind} conjugate iterates diverged; y is not in int D*")
        if last_lam < 1e-8:
            return w, used
        raise DualInfeasibleError(f"{self.kind} conjugate did not converge in 500 steps")

    # -- bookkeeping ---------------------------------------------------------
    def params(self):
        """JSON-friendly constructor parameters."""
        return {"shift": self.shift.tolist()}

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        a, b = self.params(), other.params()
        return a.keys() == b.keys() and all(np.array_equal(a[k], b[k]) for k in a)

    def __hash__(self):
        return hash((self.kind, self.dim))

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, theta={self.theta})"


# ----------------------------------------------------------------------------
# catalog


class LinearBlock(Barrier):
    """Componentwise ``z <= beta`` with ``phi = -sum ln(beta - z)``.

    ``beta`` may be a scalar (one row) or an array (one row per entry); the
    parameter is the number of rows.
    """

    kind = "linear"

    def __init__(self, beta=0.0):
        self.beta = np.atleast_1d(np.asarray(beta, dtype=float)).reshape(-1).copy()
        self.beta.setflags(write=False)
        self.dim = self.beta.size
        self.theta = float(self.dim)
        super().__init__(-self.beta)

    def params(self):
        return {"beta": self.beta.tolist()}

    def _slack0(self, w):
        return float(np.min(-w))

    def _value0(self, w):
        return -np.sum(np.log(-w))

    def _gradient0(self, w):
        return -1.0 / w

    def _hessian0(self, w):
        return np.diag(1.0 / w**2)

    def _cold0(self):
        return -np.ones(self.dim)

    def max_step(self, u, du):
        return _halfspace_max_step(self.beta - np.asarray(u, float), -np.asarray(du, float))

    def _dual_slack(self, y):
        return float(np.min(y))

    def dual_max_step(self, y, dy):
        return _halfspace_max_step(np.asarray(y, float), np.asarray(dy, float))

    def _support0(self, y):
        return 0.0 if np.all(y >= 0) else math.inf

    def fenchel_gap(self, u, y, conj=None):
        slack = self.beta - np.asarray(u, dtype=float).reshape(-1)
        if not np.all(slack > 0):
            raise DomainError("linear barrier evaluated outside its domain")
        y = np.asarray(y, dtype=float).reshape(-1)
        if not np.all(y > 0):
            raise DualInfeasibleError("linear conjugate needs y > 0")
        # sum of rho(y_i s_i - 1); log1p keeps it accurate near the path
        t = y * slack - 1.0
        return float(np.sum(t - np.log1p(t)))

    def _conjugate0(self, y):
        if not np.all(y > 0):
            raise DualInfeasibleError("linear conjugate needs y > 0")
        return -1.0 / y, float(np.sum(-1.0 - np.log(y)))


class SocpBlock(Barrier):
    """Second-order cone ``||z|| <= t`` on ``(z, t)`` with ``z`` in R^n."""

    kind = "socp"
    theta = 2.0

    def __init__(self, n, shift=None):
        if int(n) < 1:
            raise ValueError("socp block needs n >= 1")
        self.n = int(n)
        self.dim = self.n + 1
        super().__init__(shift)

    def params(self):
        return {"n": self.n, "shift": self.shift.tolist()}

    def _slack0(self, w):
        return float(w[-1] - np.linalg.norm(w[:-1]))

    def _g(self, w):
        return w[-1] ** 2 - w[:-1] @ w[:-1]

    def _value0(self, w):
        return -math.log(self._g(w))

    def _gradient0(self, w):
        g = self._g(w)
        out = 2.0 * w / g
        out[-1] = -2.0 * w[-1] / g
        return out

    def _hessian0(self, w):
        g = self._g(w)
        dg = -2.0 * w
        dg[-1] = 2.0 * w[-1]
        d2 = np.full(self.dim, 2.0 / g)
        d2[-1] = -2.0 / g
        return np.diag(d2) + np.outer(dg, dg) / g**2

    def _cold0(self):
        w = np.zeros(self.dim)
        w[-1] = 1.0
        return w

    def max_step(self, u, du):
        w = self._w(u)
        du = np.asarray(du, float)
        return _lorentz_max_step(w[:-1], w[-1], du[:-1], du[-1])

    def _dual_slack(self, y):
        return float(-y[-1] - np.linalg.norm(y[:-1]))

    def dual_max_step(self, y, dy):
        y = np.asarray(y, float)
        dy = np.asarray(dy, float)
        return _lorentz_max_step(y[:-1], -y[-1], dy[:-1], -dy[-1])

    def _support0(self, y):
        return 0.0 if self._dual_slack(y) >= 0 else math.inf

    def _conjugate0(self, y):
        w, s = y[:-1], y[-1]
        q = s * s - w @ w
        if not (s < 0 and q > 0):
            raise DualInfeasibleError("socp conjugate needs ||w|| < -s")
        u = np.empty(self.dim)
        u[:-1] = 2.0 * w / q
        u[-1] = -2.0 * s / q
        return u, -math.log(q) + 2.0 * math.log(2.0) - 2.0


class SdpBlock(Barrier):
    """``Z <= B`` in the semidefinite order, ``phi = -ln det(B - Z)``."""

    kind = "sdp"

    def __init__(self, B):
        B = np.asarray(B, dtype=float)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("sdp block needs a square matrix B")
        if not np.allclose(B, B.T, atol=0, rtol=0):
            raise ValueError("sdp block needs a symmetric B")
        self.B = B.copy()
        self.B.setflags(write=False)
        self.n = B.shape[0]
        self.dim = self.n * (self.n + 1) // 2
        self.theta = float(self.n)
        super().__init__(-svec(B))

    def params(self):
        return {"B": self.B.tolist()}

    def _slack0(self, w):
        return float(np.linalg.eigvalsh(-smat(w))[0])

    def _value0(self, w):
        sign, logdet = np.linalg.slogdet(-smat(w))
        return -logdet

    def _gradient0(self, w):
        return svec(np.linalg.inv(-smat(w)))

    def _hessian0(self, w):
        P = np.linalg.inv(-smat(w))
        H = np.empty((self.dim, self.dim))
        for col in range(self.dim):
            e = np.zeros(self.dim)
            e[col] = 1.0
            E = smat(e)
            H[:, col] = svec(P @ E @ P)
        return 0.5 * (H + H.T)

    def _cold0(self):
        return -svec(np.eye(self.n))

    def max_step(self, u, du):
        S = -smat(self._w(u))
        L = np.linalg.cholesky(S)
        dZ = smat(du)
        M = linalg.solve_triangular(L, linalg.solve_triangular(L, dZ, lower=True).T, lower=True)
        lam = np.linalg.eigvalsh(0.5 * (M + M.T))[-1]
        return 1.0 / lam if lam > 0 else math.inf

    def _dual_slack(self, y):
        return float(np.linalg.eigvalsh(smat(y))[0])

    def dual_max_step(self, y, dy):
        L = np.linalg.cholesky(smat(y))
        dY = smat(dy)
        M = linalg.solve_triangular(L, linalg.solve_triangular(L, dY, lower=True).T, lower=True)
        lam = np.linalg.eigvalsh(0.5 * (M + M.T))[0]
        return -1.0 / lam if lam < 0 else math.inf

    def _support0(self, y):
        return 0.0 if self._dual_slack(y) >= 0 else math.inf

    def _conjugate0(self, y):
        Y = smat(y)
        try:
            L = np.linalg.cholesky(Y)
        except np.linalg.LinAlgError:
            raise DualInfeasibleError("sdp conjugate needs Y positive definite") from None
        Yinv = linalg.cho_solve((L, True), np.eye(self.n))
        logdet = 2.0 * np.sum(np.log(np.diag(L)))
        return -svec(Yinv), -self.n - logdet


class ExpBlock(Barrier):
    """Exponential epigraph ``e^z <= t`` with the 2-s.c. barrier
    ``-ln(ln t - z) - ln t``."""

    kind = "exp"
    dim = 2
    theta = 2.0

    def _slack0(self, w):
        z, t = w
        if not t > 0:
            return -math.inf
        return min(t, math.log(t) - z)

    def _value0(self, w):
        z, t = w
        return -math.log(math.log(t) - z) - math.log(t)

    def _gradient0(self, w):
        z, t = w
        g = math.log(t) - z
        return np.array([1.0 / g, -1.0 / (t * g) - 1.0 / t])

    def _hessian0(self, w):
        z, t = w
        g = math.log(t) - z
        zz = 1.0 / g**2
        zt = -1.0 / (t * g**2)
        tt = 1.0 / (t * t * g) + 1.0 / (t * t * g * g) + 1.0 / (t * t)
        return np.array([[zz, zt], [zt, tt]])

    def _cold0(self):
        return np.array([0.0, math.e])

    def _dual_slack(self, y):
        return min(y[0], -y[1])

    def dual_contains(self, y):
        if not self.dual_cone_contains(y):
            return False
        try:
            self.conjugate(y)
        except DualInfeasibleError:
            return False
        return True

    def dual_max_step(self, y, dy):
        y = np.asarray(y, float)
        dy = np.asarray(dy, float)
        return _halfspace_max_step(np.array([y[0], -y[1]]), np.array([dy[0], -dy[1]]))

    def _support0(self, y):
        a, b = y
        if a < 0 or b > 0:
            return math.inf
        if b == 0:
            return 0.0 if a == 0 else math.inf
        if a == 0:
            return 0.0
        # sup a z + b e^z at e^z = -a/b
        return a * math.log(-a / b) - a


class EntropyBlock(Barrier):
    """Entropy epigraph ``z ln z <= t, z > 0`` with barrier
    ``-ln(t - z ln z) - ln z``."""

    kind = "entropy"
    dim = 2
    theta = 2.0

    def _slack0(self, w):
        z, t = w
        if not z > 0:
            return -math.inf
        return min(z, t - z * math.log(z))

    def _value0(self, w):
        z, t = w
        return -math.log(t - z * math.log(z)) - math.log(z)

    def _gradient0(self, w):
        z, t = w
        g = t - z * math.log(z)
        return np.array([(math.log(z) + 1.0) / g - 1.0 / z, -1.0 / g])

    def _hessian0(self, w):
        z, t = w
        g = t - z * math.log(z)
        dg = np.array([-(math.log(z) + 1.0), 1.0])
        H = np.outer(dg, dg) / g**2
        H[0, 0] += 1.0 / (z * g) + 1.0 / z**2
        return H

    def _cold0(self):
        return np.array([1.0, 1.0])

    def _dual_slack(self, y):
        return -y[1]

    dual_contains = ExpBlock.dual_contains

    def dual_max_step(self, y, dy):
        return _halfspace_max_step(np.array([-y[1]]), np.array([-dy[1]]))

    def _support0(self, y):
        a, b = y
        if b > 0:
            return math.inf
        if b == 0:
            return 0.0 if a <= 0 else math.inf
        # sup a z + b z ln z, stationary at ln z = -a/b - 1
        return -b * math.exp(-a / b - 1.0)


class PowerBlock(Barrier):
    """Power epigraph ``|z|^p <= t`` (p >= 1) with barrier
    ``-ln(t^(2/p) - z^2) - 2 ln t``; the parameter is 4."""

    kind = "power"
    dim = 2
    theta = 4.0

    def __init__(self, p, shift=None):
        p = float(p)
        if not p >= 1.0:
            raise ValueError(f"power block needs p >= 1, got {p}")
        self.p = p
        self._q = 2.0 / p
        super().__init__(shift)

    def params(self):
        return {"p": self.p, "shift": self.shift.tolist()}

    def _slack0(self, w):
        z, t = w
        if not t > 0:
            return -math.inf
        return min(t, t**self._q - z * z)

    def _value0(self, w):
        z, t = w
        return -math.log(t**self._q - z * z) - 2.0 * math.log(t)

    def _gradient0(self, w):
        z, t = w
        q = self._q
        g = t**q - z * z
        return np.array([2.0 * z / g, -q * t ** (q - 1.0) / g - 2.0 / t])

    def _hessian0(self, w):
        z, t = w
        q = self._q
        g = t**q - z * z
        dg = np.array([-2.0 * z, q * t ** (q - 1.0)])
        H = np.outer(dg, dg) / g**2
        H[0, 0] += 2.0 / g
        H[1, 1] += -q * (q - 1.0) * t ** (q - 2.0) / g + 2.0 / t**2
        return H

    def _cold0(self):
        return np.array([0.0, 1.0])

    def _dual_slack(self, y):
        a, b = y
        if self.p == 1.0:
            return -b - abs(a)
        return -b

    dual_contains = ExpBlock.dual_contains

    def dual_max_step(self, y, dy):
        y = np.asarray(y, float)
        dy = np.asarray(dy, float)
        if self.p == 1.0:
            return _halfspace_max_step(
                np.array([-y[1] - y[0], -y[1] + y[0]]),
                np.array([-dy[1] - dy[0], -dy[1] + dy[0]]),
            )
        return _halfspace_max_step(np.array([-y[1]]), np.array([-dy[1]]))

    def _support0(self, y):
        a, b = y
        if self.p == 1.0:
            return 0.0 if abs(a) <= -b else math.inf
        if b >= 0:
            return 0.0 if (b == 0 and a == 0) else math.inf
        p = self.p
        r = (abs(a) / (p * -b)) ** (1.0 / (p - 1.0))
        return abs(a) * r * (1.0 - 1.0 / p)


BLOCK_KINDS = {
    "linear": LinearBlock,
    "socp": SocpBlock,
    "sdp": SdpBlock,
    "exp": ExpBlock,
    "entropy": EntropyBlock,
    "power": PowerBlock,
}


# ----------------------------------------------------------------------------
# direct sum


@dataclass(frozen=True)
class DirectSumConjugate(ConjugateResult):
    """Conjugate of a direct sum; ``parts`` holds the per-block results."""

    parts: tuple = ()


class DirectSumBarrier:
    """Sum of block barriers acting on consecutive coordinate ranges."""

    kind = "direct_sum"

    def __init__(self, blocks):
        blocks = list(blocks)
        if not blocks:
            raise ValueError("direct sum needs at least one block")
        self.blocks = tuple(blocks)
        dims = [b.dim for b in blocks]
        self.offsets = tuple(int(o) for o in np.concatenate([[0], np.cumsum(dims)]))
        self.dim = self.offsets[-1]
        self.theta = float(sum(b.theta for b in blocks))

    @property
    def slices(self):
        return [slice(a, b) for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def _split(self, v):
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != self.dim:
            raise ValueError(f"vector has length {v.size}, expected {self.dim}")
        return [v[s] for s in self.slices]

    def slack(self, u):
        return min(b.slack(p) for b, p in zip(self.blocks, self._split(u)))

    def block_slacks(self, u):
        return [b.slack(p) for b, p in zip(self.blocks, self._split(u))]

    def contains(self, u):
        return all(b.contains(p) for b, p in zip(self.blocks, self._split(u)))

    def first_outside(self, u):
        """Index of the first block not containing its piece, or None."""
        for i, (b, p) in enumerate(zip(self.blocks, self._split(u))):
            if not b.contains(p):
                return i
        return None

    def _each(self, name, u):
        out = []
        for i, (b, p) in enumerate(zip(self.blocks, self._split(u))):
            try:
                out.append(getattr(b, name)(p))
            except DomainError as exc:
                raise DomainError(str(exc), block=i) from None
        return out

    def value(self, u):
        return float(sum(self._each("value", u)))

    def gradient(self, u):
        return np.concatenate(self._each("gradient", u))

    def hessian(self, u):
        return linalg.block_diag(*self._each("hessian", u))

    def cold_start(self):
        return np.concatenate([b.cold_start() for b in self.blocks])

    def max_step(self, u, du):
        return min(b.max_step(p, q) for b, p, q in zip(self.blocks, self._split(u), self._split(du)))

    def dual_cone_contains(self, y):
        return all(b.dual_cone_contains(p) for b, p in zip(self.blocks, self._split(y)))

    def dual_contains(self, y):
        return all(b.dual_contains(p) for b, p in zip(self.blocks, self._split(y)))

    def dual_max_step(self, y, dy):
        return min(b.dual_max_step(p, q) for b, p, q in zip(self.blocks, self._split(y), self._split(dy)))

    def support_function(self, y):
        return float(sum(b.support_function(p) for b, p in zip(self.blocks, self._split(y))))

    def conjugate(self, y, warm=None):
        ys = self._split(y)
        warms = self._split(warm) if warm is not None else [None] * len(ys)
        results = []
        for i, (b, p, w) in enumerate(zip(self.blocks, ys, warms)):
            try:
                results.append(b.conjugate(p, w))
            except DualInfeasibleError as exc:
                raise DualInfeasibleError(str(exc), block=i) from None
        used = warm is not None and all(r.warm_start_used for r in results)
        return DirectSumConjugate(
            np.concatenate([r.u_star for r in results]),
            float(sum(r.value for r in results)),
            used,
            float(sum(r.value0 for r in results)),
            np.concatenate([r.w_star for r in results]),
            tuple(results),
        )

    def conjugate_hessian(self, y, warm=None):
        res = self.conjugate(y, warm)
        return np.linalg.inv(self.hessian(res.u_star))

    def fenchel_gap(self, u, y, conj=None):
        """Blockwise sum of Fenchel-Young gaps; ``conj`` is a result of
        :meth:`conjugate` at the same ``y``."""
        us, ys = self._split(u), self._split(y)
        cs = self._split_conj(conj) if conj is not None else [None] * len(us)
        total = 0.0
        for i, (b, p, q, c) in enumerate(zip(self.blocks, us, ys, cs)):
            try:
                total += b.fenchel_gap(p, q, c)
            except DomainError as exc:
                raise DomainError(str(exc), block=i) from None
            except DualInfeasibleError as exc:
                raise DualInfeasibleError(str(exc), block=i) from None
        return total

    def _split_conj(self, conj):
        return conj.parts

    def __eq__(self, other):
        if not isinstance(other, DirectSumBarrier):
            return NotImplemented
        return self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"DirectSumBarrier({list(self.blocks)!r})"


def direct_sum(blocks):
    """Compose block barriers into one barrier on the stacked space."""
    return DirectSumBarrier(blocks)
