"""Exact characteristic-p calculus for rank-1 foliations.

The package is organised in layers: :mod:`pfoliation.algebra` provides the
exact coefficient arithmetic (prime fields, sparse polynomials, rational
functions, hypersurface quotients), :mod:`pfoliation.derivation` the vector
field calculus (p-th powers, p-closedness, saturation), and on top of those
:mod:`pfoliation.cover`, :mod:`pfoliation.birational`,
:mod:`pfoliation.quotient` and :mod:`pfoliation.cone` implement cyclic
covers with their singularities, blow-up discrepancies, rings of constants
with the ramification bookkeeping, and the intersection-lattice cone
arithmetic.  :mod:`pfoliation.cli` exposes it all as a command-line tool.
"""

from .algebra import (
    FieldSpec,
    HypersurfaceRing,
    Membership,
    Poly,
    PolyRing,
    RationalFn,
    principal_membership,
)
from .birational import (
    ChartMap,
    DivisorLedger,
    OneForm,
    Tower,
    TwoForm,
    canonical_discrepancy,
    foliation_discrepancy,
    pullback_derivation,
    pullback_form,
    tower_ledger,
    weighted_blowup_chart,
)
from .cone import (
    BpfShellReport,
    ConeReport,
    Lattice,
    boundary_rays_rank2,
    kf_square,
    numeric_bpf_shell,
    polyhedrality_check,
    pushforward_inseparable,
)
from .cover import (
    CoverDatum,
    CriticalPoint,
    HessianClassification,
    build_cover,
    critical_points,
    hessian_normal_form_check,
    induced_foliation,
    singular_points_of_cover,
)
from .derivation import (
    Derivation,
    FoliationChart,
    PClosedResult,
    canonical_certificate,
    is_invariant,
    is_p_closed,
    saturate,
)
from .parsing import ParseError
from .quotient import (
    ConstantsBasis,
    RamificationCase,
    inseparable_degree,
    ring_of_constants,
    verify_ramification,
)

__version__ = "0.1.0"
