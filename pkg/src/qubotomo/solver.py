"""Classical QUBO minimizers.

brute_force enumerates every assignment (tiny models only) and is the
ground-truth oracle. anneal runs multi-restart Metropolis single-bit-flip
simulated annealing with incremental energy deltas; the hot loop is a
numba kernel driven by a splitmix64 stream, so identical (model, config)
always produce identical results regardless of thread count.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

_GOLDEN = 0x9E3779B97F4A7C15


@dataclass
class SolveConfig:
    restarts: int = 20
    sweeps: int = 2000
    initial_temperature: float = None   # None -> auto_temperature
    final_temperature: float = None
    seed: int = 0
    threads: int = 1
    time_budget: float = None           # seconds; checked between restarts

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        for name in ("initial_temperature", "final_temperature"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")
        if (
            self.initial_temperature is not None
            and self.final_temperature is not None
            and self.final_temperature >= self.initial_temperature
        ):
            raise ValueError("final_temperature must be below initial_temperature")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class SolveResult:
    best_bits: np.ndarray
    best_energy: float
    restart_energies: list = field(default_factory=list)
    elapsed: float = 0.0

    def to_json(self, include_elapsed=True):
        doc = {
            "energy": self.best_energy,
            "bits": "".join("1" if b else "0" for b in self.best_bits),
            "restart_energies": list(self.restart_energies),
        }
        if include_elapsed:
            doc["elapsed_ms"] = self.elapsed * 1000.0
        return json.dumps(doc)


def _coefficient_arrays(model):
    """Dense linear vector plus (i, j, c) arrays of the quadratic terms."""
    lin = np.zeros(model.num_vars)
    for v, c in model.linear.items():
        lin[v] = c
    if model.quadratic:
        keys = sorted(model.quadratic)
        qi = np.array([k[0] for k in keys], dtype=np.int64)
        qj = np.array([k[1] for k in keys], dtype=np.int64)
        qc = np.array([model.quadratic[k] for k in keys])
    else:
        qi = qj = np.empty(0, dtype=np.int64)
        qc = np.empty(0)
    return lin, qi, qj, qc


def _evaluate(model, arrays, bits):
    lin, qi, qj, qc = arrays
    b = bits.astype(np.float64)
    return model.offset + lin @ b + float(qc @ (b[qi] * b[qj]))


def auto_temperature(model):
    """(initial, final) temperatures from the coefficient magnitudes.

    initial is the largest per-variable sum of incident coefficient
    magnitudes (an upper bound on any single-flip cost); final is 1e-3
    times the smallest nonzero coefficient magnitude.
    """
    if model.num_vars == 0:
        raise ValueError("cannot derive temperatures for an empty model")
    strength = np.zeros(model.num_vars)
    smallest = np.inf
    for v, c in model.linear.items():
        strength[v] += abs(c)
        smallest = min(smallest, abs(c))
    for (i, j), c in model.quadratic.items():
        strength[i] += abs(c)
        strength[j] += abs(c)
        smallest = min(smallest, abs(c))
    if not np.isfinite(smallest):
        raise ValueError("model has no coefficients")
    return float(strength.max()), 1e-3 * smallest


def brute_force(model):
    """Exact minimum by exhaustive enumeration (num_vars <= 24).

    Assignments are scanned in lexicographic bitstring order, so ties
    resolve to the lexicographically smallest bitstring.
    """
    model.validate()
    n = model.num_vars
    if n > 24:
        raise ValueError(f"brute force is limited to 24 variables, got {n}")
    start_time = time.perf_counter()
    if n == 0:
        return SolveResult(
            best_bits=np.empty(0, dtype=np.uint8),
            best_energy=model.offset,
            restart_energies=[model.offset],
            elapsed=time.perf_counter() - start_time,
        )
    lin, qi, qj, qc = _coefficient_arrays(model)
    shifts = (n - 1 - np.arange(n)).astype(np.uint32)  # bit 0 is most significant
    best_energy = np.inf
    best_bits = None
    chunk = 1 << 18
    for lo in range(0, 1 << n, chunk):
        m = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.uint32)
        bits = ((m[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        e = bits @ lin + model.offset
        for i, j, c in zip(qi, qj, qc):
            e += c * bits[:, i] * bits[:, j]
        k = int(np.argmin(e))
        if e[k] < best_energy:
            best_energy = float(e[k])
            best_bits = bits[k].astype(np.uint8)
    return SolveResult(
        best_bits=best_bits,
        best_energy=best_energy,
        restart_energies=[best_energy],
        elapsed=time.perf_counter() - start_time,
    )


@njit(cache=True, nogil=True, inline="always")
def _splitmix_uniform(state):
    """Advance a splitmix64 state and return a uniform double in [0, 1)."""
    state = state + np.uint64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True)
def _anneal_run(lin, indptr, nbr, nbr_w, sweeps, t_initial, t_final, seed):
    """One annealing restart from the all-zero state; returns the best bits.

    h[v] is the energy change of setting v to 1 given the current state,
    so a flip costs h[v] when q[v] = 0 and -h[v] when q[v] = 1; accepted
    flips update h over the variable's adjacency list only.
    """
    n = lin.size
    q = np.zeros(n, dtype=np.uint8)
    best_q = np.zeros(n, dtype=np.uint8)
    h = lin.copy()
    running = 0.0       # energy relative to the all-zero state
    best = 0.0
    order = np.arange(n)
    state = seed
    ratio = 1.0
    if sweeps > 1:
        ratio = (t_final / t_initial) ** (1.0 / (sweeps - 1))
    temp = t_initial
    for _ in range(sweeps):
        for i in range(n - 1, 0, -1):  # Fisher-Yates proposal order
            state, u = _splitmix_uniform(state)
            j = int(u * (i + 1))
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp
        for pos in range(n):
            v = order[pos]
            delta = h[v] if q[v] == 0 else -h[v]
            accept = delta <= 0.0
            if not accept:
                state, u = _splitmix_uniform(state)
                accept = u < np.exp(-delta / temp)
            if accept:
                q[v] ^= 1
                running += delta
                sign = 1.0 if q[v] == 1 else -1.0
                for ptr in range(indptr[v], indptr[v + 1]):
                    h[nbr[ptr]] += sign * nbr_w[ptr]
                if running < best:
                    best = running
                    best_q[:] = q
        temp *= ratio
    return best_q


def _adjacency(model):
    """Symmetric CSR neighbor lists of the quadratic couplings."""
    n = model.num_vars
    counts = np.zeros(n + 1, dtype=np.int64)
    for i, j in model.quadratic:
        counts[i + 1] += 1
        counts[j + 1] += 1
    indptr = np.cumsum(counts)
    nbr = np.zeros(indptr[-1], dtype=np.int64)
    nbr_w = np.zeros(indptr[-1])
    cursor = indptr[:-1].copy()
    for (i, j), c in sorted(model.quadratic.items()):
        nbr[cursor[i]] = j
        nbr_w[cursor[i]] = c
        cursor[i] += 1
        nbr[cursor[j]] = i
        nbr_w[cursor[j]] = c
        cursor[j] += 1
    return indptr, nbr, nbr_w


def _restart_seed(seed, restart):
    return np.uint64((seed + _GOLDEN * (restart + 1)) % (1 << 64))


def anneal(model, config=None):
    """Multi-restart simulated annealing; returns the best-ever assignment.

    Restart r derives its random stream from (config.seed, r), so adding
    restarts never changes earlier ones and the reported best is the
    first restart attaining the minimum energy. Each restart's best bits
    are re-scored exactly before comparison.
    """
    model.validate()
    if config is None:
        config = SolveConfig()
    start_time = time.perf_counter()
    n = model.num_vars
    arrays = _coefficient_arrays(model)
    if n == 0 or (not model.linear and not model.quadratic):
        bits = np.zeros(n, dtype=np.uint8)
        return SolveResult(
            best_bits=bits,
            best_energy=model.offset,
            restart_energies=[model.offset] * config.restarts,
            elapsed=time.perf_counter() - start_time,
        )
    t_initial, t_final = config.initial_temperature, config.final_temperature
    if t_initial is None or t_final is None:
        auto_i, auto_f = auto_temperature(model)
        t_initial = auto_i if t_initial is None else t_initial
        t_final = auto_f if t_final is None else t_final
    if t_final >= t_initial:
        raise ValueError("final temperature must stay below the initial one")
    lin = arrays[0]
    indptr, nbr, nbr_w = _adjacency(model)

    def run(restart):
        bits = _anneal_run(
            lin, indptr, nbr, nbr_w,
            config.sweeps, t_initial, t_final,
            _restart_seed(config.seed, restart),
        )
        return bits, _evaluate(model, arrays, bits)

    results = []
    if config.threads > 1 and config.time_budget is None:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, range(config.restarts)))
    else:
        for restart in range(config.restarts):
            if (
                config.time_budget is not None
                and results
                and time.perf_counter() - start_time > config.time_budget
            ):
                break
            results.append(run(restart))

    energies = [e for _, e in results]
    winner = int(np.argmin(energies))  # first restart at the minimum wins
    return SolveResult(
        best_bits=results[winner][0],
        best_energy=energies[winner],
        restart_energies=energies,
        elapsed=time.perf_counter() - start_time,
    )
