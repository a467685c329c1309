"""Vector multibang optimal control: penalties, Bloch and elasticity solvers."""

from ._multibang import (
    BlochProblem,
    Penalty,
    assemble,
    conjugate_oracle,
    forward_solve,
    hessian_apply,
    objective,
    parse_config,
    prox_oracle,
    reduced_gradient,
    run,
    solve_bloch,
    solve_elasticity,
)

__all__ = [
    "BlochProblem",
    "Penalty",
    "assemble",
    "conjugate_oracle",
    "forward_solve",
    "hessian_apply",
    "objective",
    "parse_config",
    "prox_oracle",
    "reduced_gradient",
    "run",
    "solve_bloch",
    "solve_elasticity",
]
