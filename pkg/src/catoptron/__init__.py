"""Optimal control toward whole families of (entangled) cat states.

Library layout:

- :mod:`catoptron.spaces` -- truncated Fock / qubit(x)oscillator linear algebra
- :mod:`catoptron.models` -- Kerr and Jaynes-Cummings models, Lindblad dissipator
- :mod:`catoptron.dynamics` -- forward state/density propagation, backward costates
- :mod:`catoptron.functionals` -- final-time cost terms with analytic costates
- :mod:`catoptron.krotov` -- the monotonic pulse-update engine with line search
- :mod:`catoptron.analysis` -- Wigner, spectra, Gabor, cat-set infidelities
- :mod:`catoptron.experiments` -- config-driven experiment harness
- :mod:`catoptron.cli` -- `catoptron <command> --config <file>`
"""

__version__ = "0.1.0"

from . import analysis, dynamics, errors, functionals, krotov, models, spaces  # noqa: F401
