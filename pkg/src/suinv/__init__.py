"""SU(d) generators, collective invariants and noiseless subsystems."""

from ._backend import available_backends, get_backend, set_backend
from .dfs import (
    DfsBlock,
    DfsDecomposition,
    LogicalOperators,
    compatibility_check,
    decompose,
    exchange_gate,
    exchange_phase_table,
    logical_paulis,
)
from .errors import (
    DegeneracyError,
    InconsistencyError,
    InsufficientParticlesError,
    InvalidDimensionError,
    InvalidOrderError,
    ParticleIndexError,
)
from .invariants import (
    InvariantOperator,
    casimir_c2,
    casimir_c3,
    casimir_cn,
    collective_j2,
    collective_j3,
    completeness_probe,
    invariant_i2,
    invariant_i3,
    invariant_i4,
    verify_j3_decomposition,
)
from .multiparticle import (
    CollectiveErrorSet,
    ManyBodyOperator,
    collective_set,
    collective_unitary,
    commutator,
    commutes_with_all,
    embed,
)
from .su_basis import (
    GeneratorBasis,
    IdentityReport,
    StructureTensors,
    build_basis,
    compute_structure_tensors,
    verify_identities,
)

__version__ = "0.1.0"
