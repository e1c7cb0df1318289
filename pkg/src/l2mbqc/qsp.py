"""Quantum-signal-processing synthesis for symmetric Boolean functions.

A sequence of L rotations R_Z(xi_j) R_X(phi) R_Z(xi_j)^dag applied to |0>
realizes a unitary whose Pauli components are Laurent polynomials in
z = e^{i phi/2} of degree at most L with fixed parity.  Synthesis proceeds in
three exact stages, all in extended precision:

1. interpolate the I and X components (cosine and sine series) on a grid of
   phase values so the measured bit equals the target function there, with
   derivative-zero rows so the remainder has double zeros on the circle;
2. complete the pair to a unitary by spectral factorization of the
   remainder 1 - A^2 - B^2;
3. extract the rotation angles by peeling rank-one projector factors off
   the matrix Laurent polynomial.

The grid is phi_w = 4*pi*w/q with an odd period q: q = p for the
weight-counting functions (L = 2p-1) and q = 2n+1 for a general symmetric
profile (L = 4n+1).  Both the truth table and the series have period q in
the weight, which is what makes the reduced system square.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import mpmath as mp
import numpy as np

SYNTHESIS_DPS = 50
SOLVE_RESIDUAL_TOL = 1e-12
COMPLETION_TOL = 1e-12
FAILURE_TOL_OWN = 1e-9
FAILURE_TOL_REFERENCE = 1e-10

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class SynthesisError(RuntimeError):
    """Linear solve, feasibility, or completion failure."""


def rot_x(theta: float) -> np.ndarray:
    return np.cos(theta / 2) * _I2 - 1j * np.sin(theta / 2) * _X


def rot_z(theta: float) -> np.ndarray:
    return np.cos(theta / 2) * _I2 - 1j * np.sin(theta / 2) * _Z


@dataclass(frozen=True)
class LaurentPair:
    """Real cosine/sine series for the I and X components of the target.

    ``a[h]`` multiplies cos(h*phi/2) and ``b[h]`` multiplies sin(h*phi/2);
    only odd harmonics h <= degree appear (degree is odd throughout).
    ``grid_period`` is q: grid points sit at phi_w = 4*pi*w/q.
    """

    degree: int
    a: dict[int, float]
    b: dict[int, float]
    grid_period: int
    target_values: tuple[int, ...]
    residual: float
    a_exact: dict = field(default_factory=dict, compare=False, repr=False)
    b_exact: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.degree % 2 == 0:
            raise ValueError("degree must be odd")
        for coeffs in (self.a, self.b):
            for h in coeffs:
                if h % 2 == 0 or not 0 < h <= self.degree:
                    raise ValueError("series must use odd harmonics <= degree")

    def a_value(self, phi: float) -> float:
        return sum(c * np.cos(h * phi / 2) for h, c in self.a.items())

    def b_value(self, phi: float) -> float:
        return sum(c * np.sin(h * phi / 2) for h, c in self.b.items())

    def min_remainder(self, samples: int = 2048) -> float:
        """min over the circle of 1 - A^2 - B^2 (feasibility check)."""
        phis = np.linspace(0.0, 4 * np.pi, samples, endpoint=False)
        vals = [1.0 - self.a_value(p) ** 2 - self.b_value(p) ** 2 for p in phis]
        return float(min(vals))


@dataclass(frozen=True)
class QspAngles:
    """Rotation-axis angles; xi[0] belongs to the first rotation applied."""

    length: int
    xi: tuple[float, ...]
    grid_period: int
    target: dict = field(default_factory=dict)
    residual: float = 0.0

    def __post_init__(self):
        if len(self.xi) != self.length:
            raise ValueError("angle count must equal length")

    def to_json(self) -> str:
        return json.dumps({"L": self.length, "xi": list(self.xi),
                           "target": self.target, "residual": self.residual,
                           "grid_period": self.grid_period})

    @classmethod
    def from_json(cls, text: str) -> "QspAngles":
        obj = json.loads(text)
        return cls(obj["L"], tuple(obj["xi"]), obj.get("grid_period", 0),
                   obj.get("target", {}), obj.get("residual", 0.0))


def reference_angles(p: int) -> QspAngles:
    """Checked-in published angle table for the weight-counting functions."""
    data = json.loads(resources.files("l2mbqc.data")
                      .joinpath("reference_angles.json").read_text())
    key = str(p)
    if key not in data["angles"]:
        raise KeyError(f"no reference angles for p={p}")
    xi = tuple(data["angles"][key])
    return QspAngles(len(xi), xi, p, target={"p": p, "j": 0, "source": "reference"})


# ---------------------------------------------------------------------------
# stage 1: interpolation


def _interp_system(q: int, avals, bvals):
    """Solve the two decoupled q x q systems in extended precision.

    Value rows pin A at w = 0..(q-1)/2 and B at w = 1..(q-1)/2; derivative
    rows force stationarity so the completion remainder has double zeros.
    """
    half = (q - 1) // 2
    harms = [2 * j + 1 for j in range(q)]
    grids = [4 * mp.pi * w / q for w in range(half + 1)]

    rows, rhs = [], []
    for w in range(half + 1):
        rows.append([mp.cos(h * grids[w] / 2) for h in harms])
        rhs.append(avals[w])
    for w in range(1, half + 1):
        rows.append([h * mp.sin(h * grids[w] / 2) for h in harms])
        rhs.append(0)
    a_sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
    res_a = mp.norm(mp.matrix(rows) * a_sol - mp.matrix(rhs))

    rows, rhs = [], []
    for w in range(1, half + 1):
        rows.append([mp.sin(h * grids[w] / 2) for h in harms])
        rhs.append(bvals[w])
    for w in range(half + 1):
        rows.append([h * mp.cos(h * grids[w] / 2) for h in harms])
        rhs.append(0)
    b_sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
    res_b = mp.norm(mp.matrix(rows) * b_sol - mp.matrix(rhs))

    a = {h: a_sol[c] for c, h in enumerate(harms)}
    b = {h: b_sol[c] for c, h in enumerate(harms)}
    return a, b, float(res_a + res_b)


def _make_pair(q: int, values: list[int], target_desc: tuple[int, ...]) -> LaurentPair:
    with mp.workdps(SYNTHESIS_DPS):
        avals = [1 - v for v in values]
        bvals = list(values)
        try:
            a, b, residual = _interp_system(q, avals, bvals)
        except ZeroDivisionError as exc:
            raise SynthesisError(
                f"singular interpolation system for period {q}") from exc
        # keep the high-precision mpf objects as-is; re-wrapping outside the
        # precision context would silently round them to machine precision
        pair = LaurentPair(
            degree=2 * q - 1,
            a={h: float(c) for h, c in a.items()},
            b={h: float(c) for h, c in b.items()},
            grid_period=q,
            target_values=target_desc,
            residual=residual,
            a_exact=dict(a),
            b_exact=dict(b),
        )
    if residual > SOLVE_RESIDUAL_TOL:
        raise SynthesisError(f"interpolation residual {residual:.2e}")
    return pair


def solve_mod_p_coeffs(p: int, j: int = 0) -> LaurentPair:
    """Series of degree 2p-1 whose measured bit is the weight-mod-p indicator.

    The interpolation targets are residue-independent; j enters later as a
    constant shift of the rotation phase (the truth table is invariant under
    weight shifts by p, so shifting the phase grid re-aims the same series).
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd integer >= 3")
    if not 0 <= j < p:
        raise ValueError("j out of range")
    half = (p - 1) // 2
    values = [0] + [1] * half  # A = delta_{w,0}, B = 1 - delta on the half grid
    return _make_pair(p, values, tuple(values))


def solve_symmetric_coeffs(profile, n: int) -> LaurentPair:
    """Series of degree 4n+1 computing an arbitrary symmetric profile.

    The profile must have value 0 at weight 0 (complement and flip the
    classical output bit otherwise).  Weights are read modulo q = 2n+1 on
    the grid, which is aliasing-free since 0..n are distinct residues.
    """
    profile = list(profile)
    if len(profile) != n + 1:
        raise ValueError("profile needs n+1 entries")
    if profile[0] != 0:
        raise SynthesisError("profile must start at 0; complement first")
    q = 2 * n + 1
    return _make_pair(q, profile, tuple(profile))


# ---------------------------------------------------------------------------
# stage 2 + 3: completion and angle extraction


def _laurent_square_remainder(pair: LaurentPair):
    """R = 1 - A^2 - B^2 as an exact even Laurent series in z."""
    a, b = pair.a_exact, pair.b_exact
    Az: dict[int, mp.mpf] = {}
    for h, c in a.items():
        Az[h] = Az.get(h, mp.mpf(0)) + c / 2
        Az[-h] = Az.get(-h, mp.mpf(0)) + c / 2
    Bz: dict[int, mp.mpf] = {}  # real residue of B/(i): B(z) = Bz(z)/i pointwise
    for h, c in b.items():
        Bz[h] = Bz.get(h, mp.mpf(0)) + c / 2
        Bz[-h] = Bz.get(-h, mp.mpf(0)) - c / 2
    R = {0: mp.mpf(1)}
    for e1, c1 in Az.items():
        for e2, c2 in Az.items():
            R[e1 + e2] = R.get(e1 + e2, mp.mpf(0)) - c1 * c2
    for e1, c1 in Bz.items():
        for e2, c2 in Bz.items():
            R[e1 + e2] = R.get(e1 + e2, mp.mpf(0)) + c1 * c2
    return R


def _complete(pair: LaurentPair):
    """Spectral factorization of the remainder into the Y and Z components.

    Root selection takes one copy of each double circle root plus everything
    strictly inside the unit circle; conjugation symmetry of that set keeps
    the factor real.  Any such selection yields deterministic readout because
    the remainder vanishes doubly at every grid point.
    """
    L = pair.degree
    R = _laurent_square_remainder(pair)
    rho: dict[int, mp.mpf] = {}
    for e, c in R.items():
        if e % 2:
            raise SynthesisError("remainder has odd harmonics")
        rho[e // 2] = rho.get(e // 2, mp.mpf(0)) + c
    tiny = mp.mpf(10) ** (-SYNTHESIS_DPS + 10)
    if all(abs(c) < tiny for c in rho.values()):
        # exactly unitary pair: nothing to complete
        return {j: mp.mpf(0) for j in range(1, L + 1, 2)}, \
               {j: mp.mpf(0) for j in range(1, L + 1, 2)}
    # the remainder may deflate below the full degree budget (for instance a
    # pure-cosine interpolant leaves sin^2 of a single harmonic)
    deg = max(abs(e) for e, c in rho.items() if abs(c) > tiny)
    qc = [rho.get(k - deg, mp.mpf(0)) for k in range(2 * deg + 1)]
    roots = mp.polyroots(list(reversed(qc)), maxsteps=600, extraprec=400)

    on_circle, selected = [], []
    for r in roots:
        m = abs(r)
        if abs(m - 1) < mp.mpf("1e-15"):
            on_circle.append(r)
        elif m < 1:
            selected.append(r)
    if len(on_circle) % 2:
        raise SynthesisError("negative remainder: odd-order circle zero")
    # circle zeros of the remainder sit at the grid points (the roots of
    # unity of the grid period), as doubles; snap each pair onto its exact
    # location so the selected set is exactly conjugation-closed
    q = pair.grid_period
    grid_points = [mp.expjpi(mp.mpf(2 * k) / q) for k in range(q)]
    counts = [0] * q
    leftovers = []
    for r in on_circle:
        dists = [abs(r - g) for g in grid_points]
        k = min(range(q), key=lambda i: dists[i])
        if dists[k] < mp.mpf("1e-10"):
            counts[k] += 1
        else:
            leftovers.append(r)
    for k, cnt in enumerate(counts):
        if cnt % 2:
            raise SynthesisError("odd-order circle zero at a grid point")
        selected.extend([grid_points[k]] * (cnt // 2))
    leftovers.sort(key=lambda r: float(mp.arg(r)))
    selected.extend(leftovers[::2])
    if len(selected) != deg:
        raise SynthesisError(
            f"root selection size {len(selected)} != {deg}; remainder likely negative")

    sigma = [mp.mpc(1)]
    for r in selected:
        nxt = [mp.mpc(0)] * (len(sigma) + 1)
        for i, c in enumerate(sigma):
            nxt[i + 1] += c
            nxt[i] -= c * r
        sigma = nxt
    scale2 = rho[deg] / (sigma[deg] * sigma[0])
    scale = mp.sqrt(scale2)
    shift = -(deg + 1) // 2  # centered window; equals the full-degree layout
    ghat = {k + shift: scale * sigma[k] for k in range(deg + 1)}

    def factor_matches(g):
        for ut in (mp.mpc("0.7311", "0.211"), mp.mpc("1.3917", "-0.4101")):
            lhs = sum(c * ut ** e for e, c in g.items()) * \
                  sum(c * ut ** -e for e, c in g.items())
            rhs = sum(c * ut ** e for e, c in rho.items())
            if abs(lhs - rhs) > mp.mpf("1e-25") * (1 + abs(rhs)):
                return False
        return True

    if not factor_matches(ghat):
        raise SynthesisError("spectral factor failed identity check")
    G = {2 * m + 1: c for m, c in ghat.items()}
    max_imag = max(abs(mp.im(c)) for c in G.values())
    if max_imag > mp.mpf("1e-25"):
        raise SynthesisError(f"completion not real (imag {float(max_imag):.1e}); "
                             "remainder is negative somewhere on the circle")
    d = {jj: mp.re(G.get(jj, 0) + G.get(-jj, 0)) for jj in range(1, L + 1, 2)}
    c = {jj: mp.re(G.get(jj, 0) - G.get(-jj, 0)) for jj in range(1, L + 1, 2)}
    return c, d


def _peel_angles(pair: LaurentPair, c, d):
    """Factor the matrix Laurent polynomial into XY-plane rotation layers."""
    L = pair.degree
    a, b = pair.a_exact, pair.b_exact
    E: dict[int, list[list[mp.mpc]]] = {}
    for jj in range(1, L + 1, 2):
        aj = a.get(jj, mp.mpf(0))
        bj = b.get(jj, mp.mpf(0))
        cj = c.get(jj, mp.mpf(0))
        dj = d.get(jj, mp.mpf(0))
        E[jj] = [[(aj + 1j * dj) / 2, (bj - 1j * cj) / 2],
                 [(bj + 1j * cj) / 2, (aj - 1j * dj) / 2]]
        E[-jj] = [[(aj + 1j * dj) / 2, -(bj - 1j * cj) / 2],
                  [-(bj + 1j * cj) / 2, (aj - 1j * dj) / 2]]

    def mul(A, B):
        return [[A[0][0] * B[0][0] + A[0][1] * B[1][0],
                 A[0][0] * B[0][1] + A[0][1] * B[1][1]],
                [A[1][0] * B[0][0] + A[1][1] * B[1][0],
                 A[1][0] * B[0][1] + A[1][1] * B[1][1]]]

    def add(A, B):
        return [[A[i][jx] + B[i][jx] for jx in range(2)] for i in range(2)]

    zero = [[mp.mpc(0), mp.mpc(0)], [mp.mpc(0), mp.mpc(0)]]
    tiny = mp.mpf(10) ** (-SYNTHESIS_DPS + 12)
    # deflated targets factor into fewer genuine layers; identity pairs of
    # opposed axes pad the sequence back to the declared rotation count
    eff = max((abs(e) for e, M in E.items()
               if max(abs(M[i][j]) for i in range(2) for j in range(2)) > tiny),
              default=0)
    if (L - eff) % 2:
        raise SynthesisError("degree deflation changed parity")
    E = {e: M for e, M in E.items() if abs(e) <= eff}
    xis = []
    for m in range(eff, 0, -1):
        Cm = E[m]
        if abs(Cm[0][0]) + abs(Cm[0][1]) > abs(Cm[1][0]) + abs(Cm[1][1]):
            v = (-Cm[0][1], Cm[0][0])
        else:
            v = (-Cm[1][1], Cm[1][0])
        nv = mp.sqrt(abs(v[0]) ** 2 + abs(v[1]) ** 2)
        if nv < mp.mpf("1e-30"):
            raise SynthesisError(f"vanishing leading coefficient at degree {m}")
        v = (v[0] / nv, v[1] / nv)
        if abs(abs(v[0]) ** 2 - mp.mpf("0.5")) > mp.mpf("1e-18"):
            raise SynthesisError("rotation axis left the XY plane during peeling")
        Q = [[v[0] * mp.conj(v[0]), v[0] * mp.conj(v[1])],
             [v[1] * mp.conj(v[0]), v[1] * mp.conj(v[1])]]
        P = [[1 - Q[0][0], -Q[0][1]], [-Q[1][0], 1 - Q[1][1]]]
        xis.append(-mp.arg(2 * Q[0][1]))
        En = {}
        for e in range(-(m + 1), m + 2):
            if (e - (m - 1)) % 2:
                continue
            t = zero
            if (e + 1) in E:
                t = add(t, mul(E[e + 1], P))
            if (e - 1) in E:
                t = add(t, mul(E[e - 1], Q))
            if abs(e) > m - 1:
                resid = max(abs(t[i][jx]) for i in range(2) for jx in range(2))
                if resid > mp.mpf("1e-18"):
                    raise SynthesisError(f"peel residue {float(resid):.1e} at degree {m}")
            else:
                En[e] = t
        E = En
    E0 = E[0]
    dev = max(abs(E0[i][jx] - (1 if i == jx else 0)) for i in range(2) for jx in range(2))
    if dev > mp.mpf("1e-18"):
        raise SynthesisError("nonidentity residual layer after peeling")
    out = list(reversed(xis))
    out += [mp.mpf(0), mp.pi] * ((L - eff) // 2)
    return out


def complete_and_extract_angles(pair: LaurentPair) -> QspAngles:
    """Unitary completion plus angle extraction, verified on a dense circle grid."""
    with mp.workdps(SYNTHESIS_DPS):
        feas = pair.min_remainder()
        if feas < -1e-12:
            raise SynthesisError(f"pair is infeasible: min remainder {feas:.3e}")
        c, d = _complete(pair)
        xis = _peel_angles(pair, c, d)
        xi = tuple(float(x) for x in xis)
    angles = QspAngles(pair.degree, xi, pair.grid_period,
                       target={"values": list(pair.target_values)},
                       residual=pair.residual)
    worst = _reconstruction_residual(angles, pair)
    if worst > 1e-10:
        raise SynthesisError(f"reconstruction residual {worst:.2e}")
    angles = QspAngles(angles.length, angles.xi, angles.grid_period,
                       target=angles.target, residual=worst)
    return angles


def _reconstruction_residual(angles: QspAngles, pair: LaurentPair,
                             samples: int = 1024) -> float:
    worst = 0.0
    for phi in np.linspace(0.0, 4 * np.pi, samples, endpoint=False):
        U = reconstruct_unitary(angles, phi)
        A = (U[0, 0] + U[1, 1]).real / 2
        B = (U[0, 1] + U[1, 0]).imag / 2
        worst = max(worst, abs(A - pair.a_value(phi)), abs(B - pair.b_value(phi)))
    return worst


def reconstruct_unitary(angles: QspAngles, phi: float,
                        xi0: float | None = None) -> np.ndarray:
    """Product of the conjugated X-rotations at a given rotation phase."""
    U = rot_z(xi0) if xi0 is not None else _I2.copy()
    for xi in angles.xi:
        rz = rot_z(xi)
        U = (rz @ rot_x(phi) @ rz.conj().T) @ U
    return U


def unitarity_deviation(angles: QspAngles, phi: float) -> float:
    U = reconstruct_unitary(angles, phi)
    return float(np.max(np.abs(U.conj().T @ U - _I2)))


def verify_qsp(angles: QspAngles, p: int, j: int, n: int) -> float:
    """Worst failure probability of the mod-p readout over weights 0..n.

    The residue shift j enters as a constant offset of the rotation phase:
    the circuit rotates by 4*pi*(w - j)/p instead of 4*pi*w/p.
    """
    worst = 0.0
    for w in range(n + 1):
        phi = 4 * np.pi * (w - j) / p
        U = reconstruct_unitary(angles, phi)
        target = 0 if (w % p) == (j % p) else 1
        worst = max(worst, 1.0 - abs(U[target, 0]) ** 2)
    return worst


def verify_symmetric(angles: QspAngles, profile) -> float:
    """Worst failure probability of a symmetric-profile readout on its grid."""
    q = angles.grid_period
    worst = 0.0
    for w, fw in enumerate(profile):
        U = reconstruct_unitary(angles, 4 * np.pi * w / q)
        worst = max(worst, 1.0 - abs(U[fw, 0]) ** 2)
    return worst


def synthesize_mod_p(p: int, j: int = 0) -> QspAngles:
    """End-to-end synthesis for the weight-counting functions."""
    pair = solve_mod_p_coeffs(p, j)
    angles = complete_and_extract_angles(pair)
    angles.target.update({"p": p, "j": j})
    return angles


def synthesize_symmetric(profile, n: int) -> QspAngles:
    """End-to-end synthesis for a symmetric profile with f(0) = 0."""
    pair = solve_symmetric_coeffs(profile, n)
    angles = complete_and_extract_angles(pair)
    angles.target.update({"profile": list(profile)})
    return angles
