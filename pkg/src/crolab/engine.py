"""Chemical reaction optimization engine, pure-Python reference backend.

A population of molecules explores the search space through four reactions:

    on-wall collision     one molecule, one perturbed coordinate (local)
    decomposition         one molecule splits into two heavily perturbed
                          children (escape), optionally subsidized by the
                          central energy buffer
    inter-molecular       two molecules each take a local step
    synthesis             two molecules merge by per-coordinate selection

Every accepted change balances an explicit energy ledger: a molecule's
potential energy is its objective value, its kinetic energy is a tolerance
budget for accepting worse structures, and the buffer absorbs on-wall
losses.  The whole trajectory is a pure function of (params, problem,
perturbation, seed); the compiled kernel replays it bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .benchmarks import BenchmarkFunction
from .distributions import PerturbationSpec, sample
from .rng import RandomSource

REACTION_TYPES = ("on_wall", "decomposition", "intermolecular", "synthesis")


@dataclass
class Parameters:
    """Engine knobs; the three category presets mirror the standard setup."""

    pop_size: int
    step_size: float
    en_buff: float
    ini_ke: float
    coll_rate: float
    loss_rate: float
    dec_thres: int
    syn_thres: float

    def validate(self):
        if self.pop_size < 1:
            raise ValueError(f"pop_size must be >= 1, got {self.pop_size}")
        if not self.step_size > 0.0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.en_buff < 0.0 or self.ini_ke < 0.0:
            raise ValueError("en_buff and ini_ke must be nonnegative")
        if not 0.0 <= self.coll_rate <= 1.0:
            raise ValueError(f"coll_rate must be in [0, 1], got {self.coll_rate}")
        if not 0.0 <= self.loss_rate <= 1.0:
            raise ValueError(f"loss_rate must be in [0, 1], got {self.loss_rate}")
        if self.dec_thres < 0 or self.syn_thres < 0.0:
            raise ValueError("dec_thres and syn_thres must be nonnegative")
        return self


_PRESETS = {
    "I": Parameters(pop_size=10, step_size=0.1, en_buff=1e6, ini_ke=1e3,
                    coll_rate=0.2, loss_rate=0.9, dec_thres=150_000, syn_thres=0.0),
    "II": Parameters(pop_size=20, step_size=1.0, en_buff=1e5, ini_ke=1e7,
                     coll_rate=0.2, loss_rate=0.1, dec_thres=150_000, syn_thres=10.0),
    "III": Parameters(pop_size=100, step_size=0.5, en_buff=0.0, ini_ke=1e3,
                      coll_rate=0.2, loss_rate=0.1, dec_thres=500, syn_thres=10.0),
}

# per-function step-size exceptions within category II
_STEP_OVERRIDES = {"f8": 300.0, "f11": 15.0}


def preset(category: str) -> Parameters:
    """Fresh copy of the preset for a category ("I", "II" or "III")."""
    p = _PRESETS[category]
    return Parameters(p.pop_size, p.step_size, p.en_buff, p.ini_ke,
                      p.coll_rate, p.loss_rate, p.dec_thres, p.syn_thres)


def default_parameters(problem: BenchmarkFunction) -> Parameters:
    """Category preset for `problem`, with its step-size exception applied."""
    p = preset(problem.category)
    if problem.id in _STEP_OVERRIDES:
        p.step_size = _STEP_OVERRIDES[problem.id]
    return p


@dataclass
class Molecule:
    omega: list[float]
    pe: float
    ke: float
    num_hit: int = 0
    min_struct: list[float] = None
    min_pe: float = 0.0
    min_hit: int = 0

    @classmethod
    def fresh(cls, omega: list[float], pe: float, ke: float) -> "Molecule":
        return cls(omega=omega, pe=pe, ke=ke, num_hit=0,
                   min_struct=list(omega), min_pe=pe, min_hit=0)

    def note_improvement(self):
        if self.pe < self.min_pe:
            self.min_pe = self.pe
            self.min_struct = list(self.omega)
            self.min_hit = self.num_hit


@dataclass
class EngineState:
    molecules: list[Molecule]
    buffer: float
    best_value: float
    best_struct: list[float]
    fe_used: int
    rng: RandomSource
    perturbation: PerturbationSpec
    problem: BenchmarkFunction
    params: Parameters
    reaction_counts: dict = field(default_factory=lambda: {name: 0 for name in REACTION_TYPES})
    accepted_counts: dict = field(default_factory=lambda: {name: 0 for name in REACTION_TYPES})

    def evaluate(self, omega: list[float]) -> float:
        """Objective at omega; counts the evaluation and tracks best-so-far
        (rejected candidates still contribute their evaluated value)."""
        pe = self.problem.evaluate(omega, self.rng)
        self.fe_used += 1
        if pe < self.best_value:
            self.best_value = pe
            self.best_struct = list(omega)
        return pe


def initialize(params: Parameters, problem: BenchmarkFunction,
               perturbation: PerturbationSpec, seed: int) -> EngineState:
    """Population uniform in bounds, each molecule evaluated once."""
    params.validate()
    rng = RandomSource(seed)
    state = EngineState(
        molecules=[], buffer=params.en_buff,
        best_value=float("inf"), best_struct=[],
        fe_used=0, rng=rng, perturbation=perturbation,
        problem=problem, params=params,
    )
    lower, upper = problem.lower, problem.upper
    for _ in range(params.pop_size):
        omega = [rng.uniform_in(lower[d], upper[d]) for d in range(problem.dim)]
        pe = state.evaluate(omega)
        state.molecules.append(Molecule.fresh(omega, pe, params.ini_ke))
    return state


def _reflect(v: float, lo: float, hi: float) -> float:
    # one reflection about the violated bound, then clamp (huge steps only)
    if v < lo:
        v = 2.0 * lo - v
    elif v > hi:
        v = 2.0 * hi - v
    if v < lo:
        v = lo
    elif v > hi:
        v = hi
    return v


def neighbor(omega: list[float], perturbation: PerturbationSpec,
             rng: RandomSource, lower, upper) -> list[float]:
    """Copy of omega with one uniformly chosen coordinate nudged by a draw
    from the perturbation law, reflected back into bounds."""
    d = rng.index_below(len(omega))
    eps = sample(perturbation, rng)
    out = list(omega)
    out[d] = _reflect(out[d] + eps, lower[d], upper[d])
    return out


def _perturb_all(omega: list[float], perturbation: PerturbationSpec,
                 rng: RandomSource, lower, upper) -> list[float]:
    # decomposition child: each coordinate moves with probability 1/2,
    # at least one forced
    out = list(omega)
    changed = 0
    for d in range(len(out)):
        if rng.uniform() < 0.5:
            eps = sample(perturbation, rng)
            out[d] = _reflect(out[d] + eps, lower[d], upper[d])
            changed += 1
    if changed == 0:
        d = rng.index_below(len(out))
        eps = sample(perturbation, rng)
        out[d] = _reflect(out[d] + eps, lower[d], upper[d])
    return out


def on_wall(state: EngineState, i: int) -> bool:
    """Single-molecule local step; a slice of surplus energy leaks to the
    buffer on acceptance.  Returns True when accepted."""
    mol = state.molecules[i]
    w = neighbor(mol.omega, state.perturbation, state.rng,
                 state.problem.lower, state.problem.upper)
    pe_new = state.evaluate(w)
    mol.num_hit += 1
    state.reaction_counts["on_wall"] += 1
    q = mol.pe - pe_new + mol.ke
    if q >= 0.0:
        t = state.params.loss_rate + state.rng.uniform() * (1.0 - state.params.loss_rate)
        mol.omega = w
        mol.pe = pe_new
        mol.ke = q * t
        state.buffer += q * (1.0 - t)
        mol.note_improvement()
        state.accepted_counts["on_wall"] += 1
        return True
    return False


def decomposition(state: EngineState, i: int) -> bool:
    """Split molecule i into two heavily perturbed children.  The children
    share the parent's surplus energy; if that is negative the buffer may
    cover the deficit, otherwise the reaction fails."""
    mol = state.molecules[i]
    lower, upper = state.problem.lower, state.problem.upper
    w1 = _perturb_all(mol.omega, state.perturbation, state.rng, lower, upper)
    w2 = _perturb_all(mol.omega, state.perturbation, state.rng, lower, upper)
    pe1 = state.evaluate(w1)
    pe2 = state.evaluate(w2)
    state.reaction_counts["decomposition"] += 1
    temp = mol.pe + mol.ke - pe1 - pe2
    if temp >= 0.0:
        k = state.rng.uniform()
        ke1 = temp * k
        ke2 = temp * (1.0 - k)
    else:
        avail = temp + state.buffer
        if avail >= 0.0:
            m1 = state.rng.uniform()
            m2 = state.rng.uniform()
            m3 = state.rng.uniform()
            m4 = state.rng.uniform()
            ke1 = avail * m1 * m2
            ke2 = (avail - ke1) * m3 * m4
            state.buffer = avail - ke1 - ke2
        else:
            mol.num_hit += 1
            return False
    state.molecules[i] = Molecule.fresh(w1, pe1, ke1)
    state.molecules.append(Molecule.fresh(w2, pe2, ke2))
    state.accepted_counts["decomposition"] += 1
    return True


def intermolecular(state: EngineState, i: int, j: int) -> bool:
    """Two molecules take independent local steps; their combined energy
    must cover both new structures."""
    a = state.molecules[i]
    b = state.molecules[j]
    lower, upper = state.problem.lower, state.problem.upper
    w1 = neighbor(a.omega, state.perturbation, state.rng, lower, upper)
    w2 = neighbor(b.omega, state.perturbation, state.rng, lower, upper)
    pe1 = state.evaluate(w1)
    pe2 = state.evaluate(w2)
    a.num_hit += 1
    b.num_hit += 1
    state.reaction_counts["intermolecular"] += 1
    e = a.pe + b.pe + a.ke + b.ke - (pe1 + pe2)
    if e >= 0.0:
        k = state.rng.uniform()
        a.omega = w1
        a.pe = pe1
        a.ke = e * k
        b.omega = w2
        b.pe = pe2
        b.ke = e * (1.0 - k)
        a.note_improvement()
        b.note_improvement()
        state.accepted_counts["intermolecular"] += 1
        return True
    return False


def synthesis(state: EngineState, i: int, j: int) -> bool:
    """Merge molecules i and j into one child that inherits each coordinate
    from either parent with probability 1/2."""
    a = state.molecules[i]
    b = state.molecules[j]
    child = [a.omega[d] if state.rng.uniform() < 0.5 else b.omega[d]
             for d in range(len(a.omega))]
    pe_new = state.evaluate(child)
    state.reaction_counts["synthesis"] += 1
    ke_new = a.pe + b.pe + a.ke + b.ke - pe_new
    if ke_new >= 0.0:
        lo_idx, hi_idx = (i, j) if i < j else (j, i)
        state.molecules[lo_idx] = Molecule.fresh(child, pe_new, ke_new)
        state.molecules.pop(hi_idx)
        state.accepted_counts["synthesis"] += 1
        return True
    a.num_hit += 1
    b.num_hit += 1
    return False


def select_and_react(state: EngineState):
    """One iteration: choose uni- vs inter-molecular, pick molecules, and
    route to decomposition/synthesis when their trigger criteria hold."""
    r = state.rng.uniform()
    n = len(state.molecules)
    if r > state.params.coll_rate or n == 1:
        i = state.rng.index_below(n)
        mol = state.molecules[i]
        if mol.num_hit - mol.min_hit > state.params.dec_thres:
            decomposition(state, i)
        else:
            on_wall(state, i)
    else:
        i = state.rng.index_below(n)
        j = state.rng.index_below(n - 1)
        if j >= i:
            j += 1
        if (state.molecules[i].ke <= state.params.syn_thres
                and state.molecules[j].ke <= state.params.syn_thres):
            synthesis(state, i, j)
        else:
            intermolecular(state, i, j)


def total_energy(state: EngineState) -> float:
    """Sum of every molecule's pe + ke, plus the buffer."""
    s = 0.0
    for mol in state.molecules:
        s += mol.pe + mol.ke
    s += state.buffer
    return s


@dataclass
class RunResult:
    best_value: float
    best_struct: list[float]
    fe_used: int
    wall_ms: float
    max_energy_drift: Optional[float] = None
    trace: Optional[list[tuple[int, float]]] = None
    reaction_counts: Optional[dict] = None
    accepted_counts: Optional[dict] = None


def run(state: EngineState, fe_limit: int, audit: bool = False,
        trace_stride: int = 0) -> RunResult:
    """Iterate reactions until the evaluation budget is used up.

    The reaction in progress when the budget is hit completes, so the final
    count may overshoot by one evaluation.  With `audit`, the total energy
    is re-summed every iteration and the largest deviation from the initial
    total is reported.  With `trace_stride` > 0, (fe_used, best_value)
    checkpoints are recorded each time the counter crosses a stride.
    """
    if fe_limit < state.params.pop_size:
        raise ValueError(f"fe_limit {fe_limit} is below pop_size {state.params.pop_size}")
    started = time.perf_counter()
    e0 = total_energy(state) if audit else 0.0
    max_drift = 0.0
    trace: Optional[list[tuple[int, float]]] = [] if trace_stride > 0 else None
    if trace is not None:
        trace.append((state.fe_used, state.best_value))
        next_mark = (state.fe_used // trace_stride + 1) * trace_stride
    while state.fe_used < fe_limit:
        select_and_react(state)
        if audit:
            drift = abs(total_energy(state) - e0)
            if drift > max_drift:
                max_drift = drift
        if trace is not None and state.fe_used >= next_mark:
            trace.append((state.fe_used, state.best_value))
            next_mark = (state.fe_used // trace_stride + 1) * trace_stride
    if trace is not None and trace[-1][0] != state.fe_used:
        trace.append((state.fe_used, state.best_value))
    wall_ms = (time.perf_counter() - started) * 1e3
    return RunResult(
        best_value=state.best_value,
        best_struct=list(state.best_struct),
        fe_used=state.fe_used,
        wall_ms=wall_ms,
        max_energy_drift=max_drift if audit else None,
        trace=trace,
        reaction_counts=dict(state.reaction_counts),
        accepted_counts=dict(state.accepted_counts),
    )
