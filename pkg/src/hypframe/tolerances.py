"""Central tolerance configuration.

Every "equals zero" decision in the engine goes through a named
tolerance so a run can be re-decided with different thresholds.
Magnitude-aware tests scale the threshold by (1 + local magnitudes).
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    causal: float = 1e-12     # causal type of a vector, scaled by max(1, |x|^2)
    frame: float = 1e-9       # frame pairing residuals after integration
    zero: float = 1e-10       # a^2+b^2 and A^2-M^2 degeneracy cutoffs
    sing: float = 1e-8        # singularity / classification zero tests, magnitude scaled
    dual: float = 1e-8        # isotropy residual threshold
    rank_rtol: float = 1e-6   # front rank test: sigma_min > rank_rtol * sigma_max

    def with_overrides(self, overrides):
        """Return a copy with the named fields replaced.

        Unknown names raise InvalidInputError so CLI --tol typos surface.
        """
        from .errors import InvalidInputError

        for name in overrides:
            if name not in self.__dataclass_fields__:
                raise InvalidInputError(f"unknown tolerance {name!r}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT = Tolerances()


def is_zero(value, scale=0.0, tol=DEFAULT.sing):
    """Magnitude-aware zero test: |value| <= tol * (1 + scale)."""
    return abs(value) <= tol * (1.0 + abs(scale))
