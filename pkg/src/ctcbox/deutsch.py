"""Fixed-point states for a qubit-scale chronology-respecting interaction.

A chronology-respecting (CR) system in state rho meets a looped system
through a unitary U acting on CR (x) loop.  The loop state sigma must
reproduce itself around the loop:

    sigma = Tr_CR( U (rho (x) sigma) U^dagger )

`fixed_point` solves this by iterating the map from the maximally mixed
state and tracking both the raw iterates and their running average; the
first of the two whose residual (trace-norm distance moved by one more
map application) drops below tolerance is returned.  The raw sequence
catches maps that settle in a step or two, the averaged one catches
oscillating maps; a map can in principle defeat both within the
iteration budget, in which case the result reports non-convergence
rather than guessing.

`classical_consistency_crosscheck` connects this solver back to the
classical box analysis: when U permutes basis states and rho is
diagonal, the loop dynamics is a classical stochastic map, the fixed
point should stay diagonal, and whenever no input branch is left
without a consistent loop value the fixed distribution should equal
the conditioned uniform mixture over each branch's consistent set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

RESIDUAL_TOL = 1e-10
MAX_ITERATIONS = 100_000
MAX_DIM = 16
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
UNITARY_TOL = 1e-10
MATCH_TOL = 1e-9


def trace_norm(matrix: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.linalg.svd(matrix, compute_uv=False).sum())


def check_density_matrix(rho: np.ndarray, *, name: str = "rho") -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    if np.abs(rho - rho.conj().T).max() > HERMITIAN_TOL:
        raise ValueError(f"{name} is not Hermitian within {HERMITIAN_TOL}")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise ValueError(f"{name} must have unit trace")
    if np.linalg.eigvalsh(rho).min() < EIGENVALUE_FLOOR:
        raise ValueError(f"{name} has a negative eigenvalue")
    return rho


def check_unitary(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("unitary must be a square matrix")
    d = u.shape[0]
    if np.abs(u.conj().T @ u - np.eye(d)).max() > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary within {UNITARY_TOL}")
    return u


def _partial_trace_first(matrix: np.ndarray, d_first: int, d_second: int) -> np.ndarray:
    """Trace out the first tensor factor of a (d_first*d_second)^2 matrix."""
    t = matrix.reshape(d_first, d_second, d_first, d_second)
    return np.trace(t, axis1=0, axis2=2)


def _partial_trace_second(matrix: np.ndarray, d_first: int, d_second: int) -> np.ndarray:
    """Trace out the second tensor factor."""
    t = matrix.reshape(d_first, d_second, d_first, d_second)
    return np.trace(t, axis1=1, axis2=3)


def loop_map(u: np.ndarray, rho_cr: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """One trip around the loop: Tr_CR( U (rho_cr (x) sigma) U^dagger )."""
    d_cr = rho_cr.shape[0]
    d_loop = sigma.shape[0]
    joint = u @ np.kron(rho_cr, sigma) @ u.conj().T
    return _partial_trace_first(joint, d_cr, d_loop)


def cr_output(u: np.ndarray, rho_cr: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """State of the CR system after the interaction with the loop state."""
    d_cr = rho_cr.shape[0]
    d_loop = sigma.shape[0]
    joint = u @ np.kron(rho_cr, sigma) @ u.conj().T
    return _partial_trace_second(joint, d_cr, d_loop)


@dataclass(frozen=True)
class FixedPointResult:
    sigma: np.ndarray
    iterations: int
    residual: float
    converged: bool
    from_average: bool


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    sym = (matrix + matrix.conj().T) / 2
    tr = np.trace(sym).real
    return sym / tr if tr != 0 else sym


def fixed_point(u: np.ndarray, rho_cr: np.ndarray, d_loop: int, *,
                tol: float = RESIDUAL_TOL,
                max_iterations: int = MAX_ITERATIONS) -> FixedPointResult:
    """Solve sigma = Tr_CR(U (rho_cr (x) sigma) U^dagger) from sigma = I/d."""
    u = check_unitary(u)
    rho_cr = check_density_matrix(rho_cr, name="rho_cr")
    d_cr = rho_cr.shape[0]
    if d_loop < 1 or u.shape[0] != d_cr * d_loop:
        raise ValueError(
            f"unitary dimension {u.shape[0]} does not match CR dim {d_cr} "
            f"times loop dim {d_loop}")
    if u.shape[0] > MAX_DIM:
        raise ValueError(f"combined dimension exceeds {MAX_DIM}")

    sigma = np.eye(d_loop, dtype=complex) / d_loop
    average = sigma.copy()
    best = FixedPointResult(sigma, 0, float("inf"), False, False)
    for k in range(max_iterations + 1):
        stepped = loop_map(u, rho_cr, sigma)
        residual = trace_norm(stepped - sigma)
        if residual < best.residual:
            best = FixedPointResult(sigma, k, residual, False, False)
        if residual <= tol:
            return FixedPointResult(sigma, k, residual, True, False)
        if k > 0:
            avg_residual = trace_norm(loop_map(u, rho_cr, average) - average)
            if avg_residual <= tol:
                return FixedPointResult(average, k, avg_residual, True, True)
            if avg_residual < best.residual:
                best = FixedPointResult(average, k, avg_residual, False, True)
        sigma = _hermitize(stepped)
        average = _hermitize((average * (k + 1) + sigma) / (k + 2))
    return best


def is_basis_permutation(u: np.ndarray, *, tol: float = UNITARY_TOL) -> list[int] | None:
    """The permutation p with U|j> = |p[j]> if U is one, else None."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    perm = []
    for j in range(d):
        column = u[:, j]
        i = int(np.argmax(np.abs(column)))
        if abs(column[i] - 1) > tol:
            return None
        rest = np.abs(column) > tol
        rest[i] = False
        if rest.any():
            return None
        perm.append(i)
    if len(set(perm)) != d:
        return None
    return perm


@dataclass(frozen=True)
class ClassicalCrosscheck:
    """Agreement between the quantum fixed point and classical conditioning."""

    permutation: list[int]
    cr_distribution: list[float]
    loop_distribution: list[float]
    diagonal: bool
    invariance_residual: float
    consistent_sets: dict[int, tuple[int, ...]]
    prediction: list[float] | None
    prediction_match: bool | None
    ok: bool


def classical_consistency_crosscheck(
        u: np.ndarray, rho_cr: np.ndarray, d_loop: int, *,
        tol: float = RESIDUAL_TOL,
        match_tol: float = MATCH_TOL) -> ClassicalCrosscheck:
    """Check the solver against exact classical reasoning.

    Requires a basis-permutation unitary and a diagonal rho_cr, so the
    loop dynamics is classical: CR value u sends loop value v to the
    loop part of the permuted pair (u, v).  Checks that the fixed point
    is diagonal and its diagonal is invariant under that stochastic map.
    When every CR value in the support leaves at least one
    self-consistent loop value, also compares against conditioning:
    the mixture over u of the uniform distribution on u's consistent
    set.  When some branch has no consistent value at all (a paradox
    branch) no conditioning prediction exists, the comparison is
    skipped and ok does not penalize it.  A prediction that exists but
    differs sets ok=False; this marks the pair for inspection rather
    than proving the solver wrong, since cycle structure can make other
    invariant distributions equally legitimate fixed points.
    """
    u = check_unitary(u)
    rho_cr = check_density_matrix(rho_cr, name="rho_cr")
    d_cr = rho_cr.shape[0]
    perm = is_basis_permutation(u)
    if perm is None:
        raise ValueError("crosscheck needs a basis-permutation unitary")
    if np.abs(rho_cr - np.diag(np.diag(rho_cr))).max() > HERMITIAN_TOL:
        raise ValueError("crosscheck needs a diagonal rho_cr")

    result = fixed_point(u, rho_cr, d_loop, tol=tol)
    sigma = result.sigma
    off = sigma - np.diag(np.diag(sigma))
    diagonal = bool(np.abs(off).max() <= match_tol)
    q = np.real(np.diag(sigma))
    p = np.real(np.diag(rho_cr))

    def loop_part(cr_value: int, loop_value: int) -> int:
        return perm[cr_value * d_loop + loop_value] % d_loop

    stepped = np.zeros(d_loop)
    for cr_value in range(d_cr):
        for v in range(d_loop):
            stepped[loop_part(cr_value, v)] += p[cr_value] * q[v]
    invariance_residual = float(np.abs(stepped - q).sum())

    consistent = {cr_value: tuple(v for v in range(d_loop)
                                  if loop_part(cr_value, v) == v)
                  for cr_value in range(d_cr)}
    supported = [cr_value for cr_value in range(d_cr) if p[cr_value] > TRACE_TOL]
    prediction: list[float] | None
    if all(consistent[cr_value] for cr_value in supported):
        pred = np.zeros(d_loop)
        for cr_value in supported:
            share = p[cr_value] / len(consistent[cr_value])
            for v in consistent[cr_value]:
                pred[v] += share
        prediction = [float(x) for x in pred]
        prediction_match = bool(np.abs(pred - q).sum() <= match_tol)
    else:
        prediction = None
        prediction_match = None

    ok = (result.converged and diagonal
          and invariance_residual <= match_tol
          and prediction_match is not False)
    return ClassicalCrosscheck(
        permutation=perm,
        cr_distribution=[float(x) for x in p],
        loop_distribution=[float(x) for x in q],
        diagonal=diagonal,
        invariance_residual=invariance_residual,
        consistent_sets=consistent,
        prediction=prediction,
        prediction_match=prediction_match,
        ok=ok,
    )


def matrix_to_json(matrix: np.ndarray) -> list:
    """Row-major nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row]
            for row in np.asarray(matrix, dtype=complex)]


def matrix_from_json(data, *, name: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ValueError(f"{name} must be a nonempty list of rows")
    rows = []
    width = None
    for r, row in enumerate(data):
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise ValueError(f"{name} row {r} is not a list of the right length")
        width = len(row)
        entries = []
        for c, cell in enumerate(row):
            if (not isinstance(cell, list) or len(cell) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                               for x in cell)):
                raise ValueError(
                    f"{name}[{r}][{c}] must be a [re, im] pair of numbers")
            entries.append(complex(cell[0], cell[1]))
        rows.append(entries)
    return np.array(rows, dtype=complex)


def _qubit_density(p0: Fraction | float) -> np.ndarray:
    return np.diag([float(p0), 1 - float(p0)]).astype(complex)


def example(name: str) -> tuple[np.ndarray, np.ndarray, int]:
    """Built-in (U, rho_cr, d_loop) instances used by the CLI and tests.

    swap         exchanges CR and loop qubits; the loop must copy rho_cr.
    grandfather  flips the loop qubit unconditionally; no basis value is
                 self-consistent, the fixed point is the even mixture.
    cnot         flips the loop qubit when the CR qubit is 1; with the
                 CR qubit at |0> every loop state is consistent.
    product      non-interacting H (x) H; the loop keeps I/2 and the CR
                 qubit evolves unitarily on its own.
    """
    eye2 = np.eye(2, dtype=complex)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    swap = np.array([[1, 0, 0, 0],
                     [0, 0, 1, 0],
                     [0, 1, 0, 0],
                     [0, 0, 0, 1]], dtype=complex)
    cnot = np.array([[1, 0, 0, 0],
                     [0, 1, 0, 0],
                     [0, 0, 0, 1],
                     [0, 0, 1, 0]], dtype=complex)
    known = {
        "swap": (swap, _qubit_density(Fraction(3, 4)), 2),
        "grandfather": (np.kron(eye2, flip), _qubit_density(1), 2),
        "cnot": (cnot, _qubit_density(1), 2),
        "product": (np.kron(hadamard, hadamard), _qubit_density(1), 2),
    }
    try:
        return known[name.lower()]
    except KeyError:
        raise ValueError(f"unknown example {name!r}; "
                         f"known: {', '.join(sorted(known))}") from None


EXAMPLE_NAMES = ("swap", "grandfather", "cnot", "product")
