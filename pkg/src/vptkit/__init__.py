"""Variational perturbation theory for divergent weak-coupling series.

Modules
-------
series, tps, roots
    Re-expansion engine, truncated power series and polynomial roots.
models_exact
    Exactly solvable benchmarks (zero-dimensional integral, large-N model).
zerodim, oscillator
    Variational approximants of the zero-dimensional model and the quartic oscillator.
dynamics
    Eigenvalue flow of the truncated oscillator Hamiltonian in the complex coupling plane.
field_apps
    Applications: critical exponents, condensation temperature shift,
    hydrogen in a magnetic field, membrane between walls.
cli
    Experiment runner writing CSV and JSON reports.
"""

__version__ = "0.1.0"
