"""Exact-search engine: iteration/phase parameters and the amplification loop.

One iteration applies G = -(prepare)(conditional phase)(unprepare)(oracle).
With the matched phase phi and iteration count J computed from the solution
fraction M/N, measuring after J iterations finds a marked state with zero
theoretical failure rate; with estimated M~/N~ the failure rate is the one
modelled in :mod:`qummsa.analysis`.

The iteration count uses J = floor((pi/2 - beta)/(2*beta)) + 1 by default:
each iteration advances the state angle by 2*beta, so this is the smallest
count whose matched phase exists (j_rule="2beta").  The conservative variant
j_rule="beta" treats the advance as beta and roughly doubles J; both are
exact, since any J >= the minimum admits a matched phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .circuit import Circuit, run_circuit, invert_circuit
from .errors import CircuitError
from .oracles import MarkedSet, build_I0, build_multi_oracle, build_preparation
from .statevector import StateVector, apply_rank1_reflection

J_RULES = ("2beta", "beta")


@dataclass(frozen=True)
class SearchParams:
    """One Grover-Long run: estimated counts and derived (beta, phi, J)."""

    m_est: float
    n_est: float
    beta: float
    phi: float
    iterations: int


def compute_params(m_est: float, n_est: float, j_rule: str = "2beta") -> SearchParams:
    """Derive beta = arcsin(sqrt(M~/N~)), the iteration count J, and phi.

    M~ = N~ needs no amplification: J = 0 is returned and phi is unused
    (set to 0.0).
    """
    if j_rule not in J_RULES:
        raise ValueError(f"j_rule must be one of {J_RULES}, got {j_rule!r}")
    if not 0 < m_est <= n_est:
        raise ValueError(f"need 0 < M~ <= N~, got M~={m_est}, N~={n_est}")
    ratio = m_est / n_est
    beta = math.asin(math.sqrt(ratio))
    if ratio == 1.0:
        return SearchParams(m_est, n_est, beta, 0.0, 0)
    denom = 2.0 * beta if j_rule == "2beta" else beta
    # +1e-12 absorbs float spill just below exact-integer boundaries, where the
    # rule deliberately returns one more iteration than the minimum
    iterations = math.floor((math.pi / 2 - beta) / denom + 1e-12) + 1
    arg = math.sin(math.pi / (4 * iterations + 2)) / math.sin(beta)
    if arg > 1.0:
        if arg > 1.0 + 1e-12:
            raise ValueError(f"inconsistent parameters: arcsin argument {arg} > 1")
        arg = 1.0
    phi = 2.0 * math.asin(arg)
    return SearchParams(m_est, n_est, beta, phi, iterations)


def oracle_phase_step(state: StateVector, marked: MarkedSet, phi: float) -> StateVector:
    """Multiply the amplitudes of marked indices by e^{i phi}."""
    if marked.n != state.n:
        raise CircuitError(f"dimension mismatch: marked.n={marked.n}, state.n={state.n}")
    out = state.amps.copy()
    out[sorted(marked.V)] *= np.exp(1j * phi)
    return StateVector(state.n, out)


def grover_long_states(
    initial: StateVector,
    marked: MarkedSet,
    params: SearchParams,
    mode: str = "rank1",
    prep: Circuit | None = None,
) -> Iterator[StateVector]:
    """Yield the state after each of the J iterations (J = 0 yields nothing)."""
    if mode not in ("rank1", "gates"):
        raise ValueError(f"mode must be 'rank1' or 'gates', got {mode!r}")
    if marked.n != initial.n:
        raise CircuitError(f"dimension mismatch: marked.n={marked.n}, initial.n={initial.n}")

    if mode == "rank1":
        state = initial
        for _ in range(params.iterations):
            state = apply_rank1_reflection(
                oracle_phase_step(state, marked, params.phi), initial, params.phi
            )
            yield state
        return

    if prep is None:
        prep = _derive_preparation(initial)
    oracle = build_multi_oracle(marked, params.phi)
    i0 = build_I0(initial.n, params.phi)
    unprep = invert_circuit(prep)
    state = initial
    for _ in range(params.iterations):
        state = run_circuit(prep, run_circuit(i0, run_circuit(unprep, run_circuit(oracle, state))))
        state = StateVector(state.n, -state.amps)
        yield state


def run_grover_long(
    initial: StateVector,
    marked: MarkedSet,
    params: SearchParams,
    mode: str = "rank1",
    prep: Circuit | None = None,
) -> StateVector:
    """Apply G exactly J times; J = 0 returns the initial state unchanged."""
    state = initial.copy()
    for state in grover_long_states(initial, marked, params, mode, prep):
        pass
    return state


def _derive_preparation(initial: StateVector) -> Circuit:
    probs = initial.probabilities()
    occupied = np.flatnonzero(probs > 1e-18)
    amp = 1.0 / math.sqrt(len(occupied))
    if np.max(np.abs(initial.amps[occupied] - amp)) > 1e-9:
        raise CircuitError(
            "gate-level mode needs a uniform-superposition initial state "
            "or an explicit preparation circuit"
        )
    return build_preparation(occupied.tolist(), initial.n)


def success_probability(final: StateVector, marked: MarkedSet) -> float:
    """Total probability mass on the marked indices."""
    probs = final.probabilities()
    return float(sum(probs[v] for v in marked.V))


def iteration_branches(M: float, N: float, j_rule: str = "2beta") -> tuple[int, int]:
    """The two candidate iteration counts (floor-based, ceil-based).

    Under the default rule the floor branch is never smaller; both are kept so
    the max can be audited.
    """
    beta = math.asin(math.sqrt(M / N))
    denom = 2.0 * beta if j_rule == "2beta" else beta
    floor_branch = math.floor((math.pi / 2 - beta) / denom + 1e-12) + 1
    ceil_branch = math.ceil((math.pi - 6 * beta) / (4 * beta))
    return floor_branch, ceil_branch


def iteration_count_model(M: float, N: float, j_rule: str = "2beta") -> int:
    """Iteration-count cost model; approaches (pi/4) sqrt(N/M) as M/N -> 0."""
    if not 0 < M <= N:
        raise ValueError(f"need 0 < M <= N, got M={M}, N={N}")
    if M == N:
        return 0
    return max(iteration_branches(M, N, j_rule))
