"""Dirichlet-character sieve machinery with arithmetic applications.

Subpackage map
--------------
``arith``       integer utilities: sieves, factorization, multiplicative
                functions, and the project PRNG.
``characters``  Dirichlet characters as exponent vectors on a CRT generator
                basis; exact phases, conductors, induction.
``lfunc``       Dirichlet L-functions: Hurwitz-zeta evaluation, ramified /
                unramified factorizations, zero counting and location.
``sievekit``    pseudo-characters, Selberg weights, mollifiers, and the
                detector identity they feed.
``largesieve``  mean-value (large-sieve) harnesses over character families,
                well-spaced zero selections, and the derived constants chain.
``fields``      cyclic number fields of odd prime degree, enumerated by
                conductor through their character classes.
``chebotarev``  split-prime statistics for those fields against effective
                error envelopes.
``torsion``     class-group ell-torsion bounds from split-prime counts,
                checked against ingested class-group tables.
``config``      run configuration: typed keys, parsing, range checks.
``reporting``   deterministic CSV/JSON/figure writers (atomic replace).
``cli``         the ``charsieve`` command-line front end.
"""

from charsieve.errors import (
    CharsieveError,
    ConfigError,
    ContourError,
    ContractError,
    DomainError,
    IngestionError,
    PoleError,
    PrecisionError,
)

__version__ = "0.1.0"

__all__ = [
    "CharsieveError",
    "ConfigError",
    "ContourError",
    "ContractError",
    "DomainError",
    "IngestionError",
    "PoleError",
    "PrecisionError",
    "__version__",
]
