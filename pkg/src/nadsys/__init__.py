"""Exact non-autonomous PL interval dynamics: hit sets, Furstenberg families, classification."""

from .plmap import (
    DomainError,
    Interval,
    IntervalSet,
    PLMap,
    as_rational,
    compose,
    constant,
    evaluate,
    hausdorff_distance,
    identity,
    image,
    is_feeble_open,
    is_invariant,
    preimage,
    sup_distance,
)
from .ndsys import (
    CertificateKind,
    Cycle,
    EventuallyConstant,
    Explicit,
    HitSetReport,
    MapSequence,
    NodeCapExceeded,
    TailCertificate,
    certify_tail,
    compose_prefix,
    constant_system,
    hit_set,
    orbit_images,
    resolve,
    shift_system,
)

from .family import (
    Decision,
    Family,
    CustomFamily,
    FamilyVerdict,
    member,
    upper_density,
)
from .classify import (
    ClassificationReport,
    OpenSetGrid,
    Verdict,
    classify_ergodic,
    classify_mixing,
    classify_transitive,
    product_hit_set,
)
from .dsl import DSLError, SystemSpec, format_spec, parse
from .runner import run, to_csv, to_json

__version__ = "0.1.0"
