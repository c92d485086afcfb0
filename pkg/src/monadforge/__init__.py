"""monadforge: exact checking of powerdomain/valuation monad composition laws.

The library instantiates three monad-composition schemes on finite posets --
demonic (Smyth sets / min-type previsions), angelic (Hoare sets / max-type
previsions), and erratic (lenses / forks) -- together with the retraction
pairs that mediate them and the weak distributive law between nondeterministic
and probabilistic choice.  Everything is computed in exact rational
arithmetic, and the law suites in ``monadforge.lawsuite`` machine-check every
equation of the theory on seeded families of finitely presented instances.
"""

from .rational import ExtRat, Rational, rat

__all__ = ["ExtRat", "Rational", "rat"]

__version__ = "0.1.0"
