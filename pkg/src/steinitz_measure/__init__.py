"""Steinitz-number invariants of countable locally standard measure algebras.

Exact arithmetic on Steinitz (supernatural) numbers, finite measure
algebras and their direct limits, spectrum descriptors with canonical
invariants, and a back-and-forth builder for scalar equivalences.
"""

from .steinitz import (
    INF,
    ScaledSteinitz,
    SteinitzNumber,
    class_representative,
    finitely_divides,
    nat_divides,
    rationally_connected,
    scaled_leq,
    st_div_by_nat,
    st_lcm,
    st_leq,
    st_mul,
)
from .measure import (
    AlgElement,
    AtomMap,
    FiniteMeasureAlgebra,
    corner_algebra,
    distance,
    extend_automorphism,
    mapping_automorphism,
    measure_of,
    scalar_equivalent,
    tensor_algebra,
)
from .spectra import (
    Fin,
    SClosed,
    SInf,
    SOpen,
    canonicalize,
    member,
    saturated_check,
    spectra_equal,
)
from .chains import (
    ChainElement,
    ChainPresentation,
    SymbolicChain,
    back_and_forth,
    construct_model,
    find_dominating,
    realize,
    symbolic_spectrum,
    validate_chain,
)

__version__ = "0.1.0"
