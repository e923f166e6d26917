"""SAT backends: an external DIMACS process, and a small built-in DPLL.

The external integration is solver-agnostic: the problem is written as
DIMACS, the process output is parsed per the conventional ``s``/``v`` line
protocol (exit codes 10/20 are honored where emitted), and every
satisfiable answer is re-verified against the clause set before being
surfaced.  The built-in DPLL keeps the unit tests hermetic; it is meant
for problems up to a few thousand variables, not for the protocol-sized
encodings.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Optional

from .encode import CnfProblem

SOLVER_ENV_VAR = "TAMTL_SOLVER"
_KNOWN_SOLVERS = ("varisat", "minisat", "kissat", "cadical", "glucose",
                  "cryptominisat5", "picosat", "lingeling")


@dataclass(frozen=True)
class SolverConfig:
    executable: str
    args: tuple[str, ...] = ()
    timeout_s: float = 600.0
    workdir: Optional[str] = None

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "unknown"
    assignment: Optional[dict[int, bool]] = None
    reason: Optional[str] = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    @property
    def is_unsat(self) -> bool:
        return self.status == "unsat"


def sat(assignment: dict[int, bool]) -> SolveResult:
    return SolveResult("sat", assignment=assignment)


def unsat() -> SolveResult:
    return SolveResult("unsat")


def unknown(reason: str) -> SolveResult:
    return SolveResult("unknown", reason=reason)


def verify_model(problem: CnfProblem, assignment: dict[int, bool]) -> bool:
    """Every clause must contain a true literal."""
    for clause in problem.clauses:
        for lit in clause:
            value = assignment.get(abs(lit), False)
            if (lit > 0) == value:
                break
        else:
            return False
    return True


def _complete(problem: CnfProblem, partial: dict[int, bool]) -> dict[int, bool]:
    return {v: partial.get(v, False) for v in range(1, problem.num_vars + 1)}


# ---------------------------------------------------------------------------
# external process backend


def solve(problem: CnfProblem, cfg: SolverConfig) -> SolveResult:
    """Run an external solver over DIMACS and parse its verdict."""
    if shutil.which(cfg.executable) is None and not os.path.isfile(cfg.executable):
        return unknown(f"solver executable not found: {cfg.executable}")
    workdir = cfg.workdir or tempfile.gettempdir()
    minisat_style = "minisat" in os.path.basename(cfg.executable)
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        cnf_path = os.path.join(tmp, "problem.cnf")
        with open(cnf_path, "w") as handle:
            handle.write(problem.to_dimacs())
        cmd = [cfg.executable, *cfg.args, cnf_path]
        out_path = None
        if minisat_style:
            out_path = os.path.join(tmp, "result.txt")
            cmd.append(out_path)
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True,
                                  timeout=cfg.timeout_s)
        except subprocess.TimeoutExpired:
            return unknown(f"solver timed out after {cfg.timeout_s}s")
        except OSError as exc:
            return unknown(f"could not run solver: {exc}")
        text = proc.stdout + "\n" + proc.stderr
        if out_path and os.path.exists(out_path):
            with open(out_path) as handle:
                text += "\n" + handle.read()
        return _interpret(problem, text, proc.returncode)


def _interpret(problem: CnfProblem, text: str, returncode: int) -> SolveResult:
    status = None
    values: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("s "):
            line = line[2:].strip()
        if line in ("SATISFIABLE", "SAT"):
            status = "sat"
            continue
        if line in ("UNSATISFIABLE", "UNSAT"):
            status = "unsat"
            continue
        if line.startswith("v "):
            line = line[2:]
        if status == "sat" or line and line.lstrip("-").split(" ")[0].isdigit():
            try:
                values.extend(int(tok) for tok in line.split())
            except ValueError:
                continue
    if status is None:
        if returncode == 10:
            status = "sat"
        elif returncode == 20:
            status = "unsat"
        else:
            return unknown(f"unrecognized solver output (exit {returncode})")
    if status == "unsat":
        return unsat()
    partial = {abs(v): v > 0 for v in values if v != 0}
    assignment = _complete(problem, partial)
    if not verify_model(problem, assignment):
        return unknown("solver reported SAT but the model fails verification")
    return sat(assignment)


# ---------------------------------------------------------------------------
# built-in DPLL


class DpllSolver:
    """Recursive-style DPLL with unit propagation over watched literals.

    Suitable for hermetic tests (up to roughly 5k variables); returns
    unknown on timeout.
    """

    name = "dpll"

    def __init__(self, timeout_s: float = 120.0):
        self.timeout_s = timeout_s

    def solve(self, problem: CnfProblem, timeout_s: Optional[float] = None) -> SolveResult:
        deadline = time.monotonic() + (timeout_s or self.timeout_s)
        n = problem.num_vars
        import sys
        if sys.getrecursionlimit() < 3 * n + 1000:
            sys.setrecursionlimit(3 * n + 1000)
        clauses = [list(c) for c in problem.clauses]
        watches: dict[int, list[int]] = {}
        assign: dict[int, bool] = {}
        trail: list[int] = []

        for ci, clause in enumerate(clauses):
            if not clause:
                return unsat()
            for lit in clause[:2]:
                watches.setdefault(lit, []).append(ci)

        occurrences: dict[int, int] = {}
        for clause in clauses:
            for lit in clause:
                occurrences[abs(lit)] = occurrences.get(abs(lit), 0) + 1
        order = sorted(range(1, n + 1), key=lambda v: -occurrences.get(v, 0))

        def value(lit: int) -> Optional[bool]:
            v = assign.get(abs(lit))
            if v is None:
                return None
            return v if lit > 0 else not v

        def propagate(queue: list[int]) -> bool:
            while queue:
                lit = queue.pop()
                falsified = -lit
                for ci in list(watches.get(falsified, ())):
                    clause = clauses[ci]
                    if falsified not in clause[:2]:
                        continue
                    other = clause[0] if clause[1] == falsified else clause[1] \
                        if len(clause) > 1 else clause[0]
                    if len(clause) == 1:
                        if value(clause[0]) is False:
                            return False
                        continue
                    if value(other) is True:
                        continue
                    moved = False
                    for j in range(2, len(clause)):
                        if value(clause[j]) is not False:
                            # swap in a fresh watch
                            idx = 0 if clause[0] == falsified else 1
                            clause[idx], clause[j] = clause[j], clause[idx]
                            watches.setdefault(clause[idx], []).append(ci)
                            watches[falsified].remove(ci)
                            moved = True
                            break
                    if moved:
                        continue
                    ov = value(other)
                    if ov is False:
                        return False
                    if ov is None:
                        assign[abs(other)] = other > 0
                        trail.append(other)
                        queue.append(other)
            return True

        def search() -> Optional[bool]:
            if time.monotonic() > deadline:
                return None
            var = next((v for v in order if v not in assign), 0)
            if var == 0:
                return True
            for phase in (True, False):
                mark = len(trail)
                assign[var] = phase
                trail.append(var if phase else -var)
                if propagate([var if phase else -var]):
                    result = search()
                    if result is not False:
                        return result
                while len(trail) > mark:
                    assign.pop(abs(trail.pop()), None)
            return False

        # top-level units
        units = [c[0] for c in clauses if len(c) == 1]
        for lit in units:
            v = value(lit)
            if v is False:
                return unsat()
            if v is None:
                assign[abs(lit)] = lit > 0
                trail.append(lit)
        if not propagate(list(trail)):
            return unsat()
        outcome = search()
        if outcome is None:
            return unknown("built-in DPLL timed out")
        if outcome is False:
            return unsat()
        model = _complete(problem, assign)
        if not verify_model(problem, model):
            return unknown("built-in DPLL produced a bad model")
        return sat(model)


class ExternalSolver:
    """Backend wrapper for a DIMACS-speaking executable."""

    def __init__(self, cfg: SolverConfig):
        self.cfg = cfg
        self.name = os.path.basename(cfg.executable)

    def solve(self, problem: CnfProblem, timeout_s: Optional[float] = None) -> SolveResult:
        cfg = self.cfg
        if timeout_s is not None:
            cfg = SolverConfig(cfg.executable, cfg.args, timeout_s, cfg.workdir)
        return solve(problem, cfg)


def find_solver_executable() -> Optional[str]:
    """Locate a known SAT solver on PATH or in the usual cargo bin dirs."""
    extra_dirs = []
    cargo_home = os.environ.get("CARGO_HOME")
    if cargo_home:
        extra_dirs.append(os.path.join(cargo_home, "bin"))
    extra_dirs.append(os.path.expanduser("~/.cargo/bin"))
    for name in _KNOWN_SOLVERS:
        path = shutil.which(name)
        if path:
            return path
        for d in extra_dirs:
            candidate = os.path.join(d, name)
            if os.path.isfile(candidate) and os.access(candidate, os.X_OK):
                return candidate
    return None


def default_backend(timeout_s: float = 600.0):
    """Resolve the solver backend: the environment override wins, then any
    known executable, then the built-in DPLL."""
    override = os.environ.get(SOLVER_ENV_VAR)
    if override:
        if override == "dpll":
            return DpllSolver(timeout_s)
        return ExternalSolver(SolverConfig(override, timeout_s=timeout_s))
    path = find_solver_executable()
    if path:
        return ExternalSolver(SolverConfig(path, timeout_s=timeout_s))
    return DpllSolver(timeout_s)
