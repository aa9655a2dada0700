"""Semantics-preserving rewrite passes for diagonal phase-oracle circuits.

The passes recognize "phase fragments": spans of gates that imprint e^{i phi}
on one cube of basis states (a pattern fixing some qubits, leaving the rest
free).  Three rewrites, applied as a pipeline 1 -> 3 -> 2:

  principle 1   merge same-parity single-state oracles that tile a block,
                dropping the control qubits that became free
  principle 3   merge an even-marking/odd-marking pair (or any two fragments
                whose cubes differ in exactly one fixed bit) into one gate on
                a retargeted qubit
  principle 2   strip the controls from X gates that conjugate a controlled
                phase gate with the same control set

Every pass is total: where its pattern is absent the input passes through
unchanged.  All rewrites preserve the circuit unitary exactly; the claimed
equivalence tolerance (global phase, 1e-10) is what the tests assert.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, Control, GateOp

# A fragment marks every basis state b with (b & mask) == value, phasing it by
# e^{i phi}.  conj is how an even-parity fragment wraps its phase gate in X
# gates: "ctrl" (X carries the same controls) or "bare" (plain X).
_Frag = tuple[int, int, float, str]  # (mask, value, phi, conj)


@dataclass(frozen=True)
class GateCostReport:
    """Gate-count summary under the two-qubit-equivalent metric.

    n_two_qubit_equiv counts controlled phase gates only: a phase gate with k
    controls costs 2**k two-qubit controlled phase gates (an uncontrolled one
    counts 2**0 = 1); X/H/RY gates are conjugation plumbing and cost nothing
    here.  n_multi_controlled counts gates of any kind with >= 2 controls.
    """

    n_multi_controlled: int
    n_two_qubit_equiv: int
    n_single: int


def gate_cost(circuit: Circuit) -> GateCostReport:
    multi = sum(1 for op in circuit.ops if len(op.controls) >= 2)
    two_q = sum(2 ** len(op.controls) for op in circuit.ops if op.kind == "PHASE")
    single = sum(1 for op in circuit.ops if not op.controls)
    return GateCostReport(multi, two_q, single)


# --- fragment scanning / emission -------------------------------------------


def _cube_of(target: int, target_bit: int, controls: tuple[Control, ...]) -> tuple[int, int]:
    mask = 1 << target
    value = target_bit << target
    for c in controls:
        mask |= 1 << c.qubit
        value |= c.value << c.qubit
    return mask, value


def _scan(ops: tuple[GateOp, ...]) -> list[tuple[str, object]]:
    """Lex the op list into ("frag", _Frag) and opaque ("op", GateOp) items."""
    items: list[tuple[str, object]] = []
    i = 0
    while i < len(ops):
        op = ops[i]
        if op.kind == "X" and i + 2 < len(ops):
            mid, post = ops[i + 1], ops[i + 2]
            triple = (
                mid.kind == "PHASE"
                and mid.target == op.target
                and post.kind == "X"
                and post.target == op.target
                and post.controls == op.controls
                and (op.controls == mid.controls or not op.controls)
            )
            if triple:
                conj = "ctrl" if op.controls else "bare"
                mask, value = _cube_of(op.target, 0, mid.controls)
                items.append(("frag", (mask, value, mid.param, conj)))
                i += 3
                continue
        if op.kind == "PHASE":
            mask, value = _cube_of(op.target, 1, op.controls)
            items.append(("frag", (mask, value, op.param, "bare")))
            i += 1
            continue
        items.append(("op", op))
        i += 1
    return items


def _emit(frag: _Frag, n: int) -> tuple[GateOp, ...]:
    mask, value, phi, conj = frag
    fixed = [q for q in range(n) if (mask >> q) & 1]
    if not fixed:
        raise AssertionError("cannot emit a fragment with no fixed qubit")
    target = 0 if (mask & 1) else min(fixed)
    controls = tuple(
        Control(q, (value >> q) & 1) for q in fixed if q != target
    )
    phase = GateOp("PHASE", target, controls, phi)
    if (value >> target) & 1:
        return (phase,)
    flip = GateOp("X", target, controls if conj == "ctrl" else ())
    return (flip, phase, flip)


def _rebuild(items: list[tuple[str, object]], n: int) -> Circuit:
    ops: list[GateOp] = []
    for kind, payload in items:
        if kind == "op":
            ops.append(payload)
        else:
            ops.extend(_emit(payload, n))
    return Circuit(n, tuple(ops))


def _runs(items):
    """Yield (start, end) spans of maximal consecutive fragment items."""
    i = 0
    while i < len(items):
        if items[i][0] != "frag":
            i += 1
            continue
        j = i
        while j < len(items) and items[j][0] == "frag":
            j += 1
        yield i, j
        i = j


# --- principle 1: block merge ------------------------------------------------


def _partition_cubes(minterms: set[int], bits: tuple[int, ...]) -> list[tuple[int, int]]:
    """Exact disjoint cover of a minterm set by cubes over ``bits``.

    Splits on the highest bit, except when that bit is free for the whole set
    (both halves identical), in which case it stays free.  Dyadic blocks come
    out as single maximal cubes.
    """
    if not minterms:
        return []
    if len(minterms) == 2 ** len(bits):
        return [(0, 0)]
    b = bits[-1]
    rest = bits[:-1]
    s0 = {m for m in minterms if not (m >> b) & 1}
    s1 = {m & ~(1 << b) for m in minterms if (m >> b) & 1}
    if s0 == s1:
        return _partition_cubes(s0, rest)
    out = [(mask | (1 << b), val) for mask, val in _partition_cubes(s0, rest)]
    out += [(mask | (1 << b), val | (1 << b)) for mask, val in _partition_cubes(s1, rest)]
    return out


def simplify_principle1(circuit: Circuit) -> Circuit:
    """Merge same-parity fragments that tile blocks, dropping free controls."""
    items = _scan(circuit.ops)
    ctrl_bits = tuple(range(1, circuit.n))
    full_ctrl_mask = (2**circuit.n - 1) & ~1
    for start, end in _runs(items):
        frags = [items[k][1] for k in range(start, end)]
        # group fragments by (phi, parity of q0); q0-free fragments pass through
        groups: dict[tuple[float, int], list[_Frag]] = {}
        order: list[tuple[str, object]] = []  # first-appearance order keeps the pass stable
        for f in frags:
            mask, value, phi, _ = f
            if mask & 1:
                key = (phi, value & 1)
                if key not in groups:
                    groups[key] = []
                    order.append(("group", key))
                groups[key].append(f)
            else:
                order.append(("pass", f))
        out: list[_Frag] = []
        ok = True
        for tag, entry in order:
            if tag == "pass":
                out.append(entry)
                continue
            phi, q0bit = entry
            minterms: set[int] = set()
            count = 0
            for mask, value, _, _ in groups[entry]:
                free = [q for q in ctrl_bits if not (mask >> q) & 1]
                count += 2 ** len(free)
                for k in range(2 ** len(free)):
                    m = value & full_ctrl_mask
                    for pos, q in enumerate(free):
                        if (k >> pos) & 1:
                            m |= 1 << q
                    minterms.add(m)
            if len(minterms) != count:
                ok = False  # overlapping marks: phases would stack, leave alone
                break
            conj = "bare" if q0bit else "ctrl"
            for mask, value in _partition_cubes(minterms, ctrl_bits):
                out.append((mask | 1, value | q0bit, phi, conj))
        if not ok:
            continue
        items[start:end] = [("frag", f) for f in out]
    return _rebuild(items, circuit.n)


# --- principle 3: even/odd pair fusion ----------------------------------------


def simplify_principle3(circuit: Circuit) -> Circuit:
    """Fuse fragment pairs whose cubes differ in exactly one fixed bit."""
    items = _scan(circuit.ops)
    for start, end in _runs(items):
        frags = [items[k][1] for k in range(start, end)]
        changed = True
        while changed:
            changed = False
            for i in range(len(frags)):
                for j in range(i + 1, len(frags)):
                    mi, vi, phii, _ = frags[i]
                    mj, vj, phij, _ = frags[j]
                    if phii != phij or mi != mj:
                        continue
                    diff = vi ^ vj
                    if diff and (diff & (diff - 1)) == 0 and mi & ~diff:
                        frags[i] = (mi & ~diff, vi & ~diff, phii, "bare")
                        del frags[j]
                        changed = True
                        break
                if changed:
                    break
        items[start:end] = [("frag", f) for f in frags]
    return _rebuild(items, circuit.n)


# --- principle 2: strip conjugation controls ----------------------------------


def simplify_principle2(circuit: Circuit) -> Circuit:
    """Replace controlled-X conjugation around a controlled phase by plain X."""
    ops = list(circuit.ops)
    i = 0
    while i + 2 < len(ops):
        pre, mid, post = ops[i], ops[i + 1], ops[i + 2]
        if (
            pre.kind == "X"
            and pre.controls
            and mid.kind == "PHASE"
            and mid.target == pre.target
            and mid.controls == pre.controls
            and post.kind == "X"
            and post.target == pre.target
            and post.controls == pre.controls
        ):
            bare = GateOp("X", pre.target)
            ops[i] = bare
            ops[i + 2] = bare
            i += 3
            continue
        i += 1
    return Circuit(circuit.n, tuple(ops))


def simplify_all(circuit: Circuit) -> Circuit:
    """Full pipeline: merge blocks, fuse leftovers, strip conjugation."""
    return simplify_principle2(simplify_principle3(simplify_principle1(circuit)))
