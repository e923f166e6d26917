"""Partial verification of timed automata with dense-time MTL properties.

The toolkit takes a mixed model (a timed automaton plus metric temporal
logic axioms and properties over dense time), builds its discrete-time
under- and over-approximations, checks both with a bounded SAT-based
satisfiability engine, and reports Verified, Falsified (with a
counterexample trace), or Inconclusive.
"""

from .intervals import DenseInterval, DiscreteInterval, INF
from .formulas import (AuxDefinition, Formula, expand_derived, flatten,
                       granularity_ok, is_flat, is_state_formula)
from .semantics import LassoTrace, Signature, eval_at, eval_global
from .discretize import (ApproxKind, GranularityError, approx, normalize,
                         over_approx, under_approx, vacuity_warnings)
from .automata import (ClockAtLeast, ClockLess, Edge, GuardAnd, GuardOr,
                       InstanceBinding, TimedAutomaton, bind_instance,
                       dense_axioms, over_axioms, under_axioms, validate,
                       xi_arrow, xi_dense)
from .modelfile import (ModelFile, ParseError, parse_discrete_formula,
                        parse_formula, parse_model, pretty)

__version__ = "0.1.0"
