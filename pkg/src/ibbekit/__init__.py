"""Group access control from identity-based broadcast encryption.

Layers, bottom to top:

- :mod:`ibbekit.pairing_core` -- pairing groups, scalars, serialization
- :mod:`ibbekit.ibbe` -- the broadcast scheme (public-key and
  master-secret operation, incremental membership updates)
- :mod:`ibbekit.group_manager` -- fixed-size partitions sharing one
  group key, sealing, envelope wrapping, repartitioning
- :mod:`ibbekit.he_baseline` -- per-member hybrid-encryption comparison
- :mod:`ibbekit.metadata_store` -- versioned blob store with long polling
- :mod:`ibbekit.trace` / :mod:`ibbekit.replay` -- churn traces and the
  benchmark engine behind the ``ibbekit`` CLI
"""

from .errors import (
    CapacityExceededError,
    DegenerateIdentityError,
    IbbekitError,
    InvalidInputError,
    NotAMemberError,
    StaleMetadataError,
    TraceParseError,
    TrustBoundaryError,
)
from .ibbe import (
    CIPHERTEXT_BYTES,
    BroadcastCiphertext,
    MasterSecretKey,
    PublicKey,
    UserSecretKey,
    add_user_msk,
    add_user_pk,
    decrypt,
    encrypt_msk,
    encrypt_pk,
    extract,
    rekey,
    remove_user_msk,
    setup,
    verify_user_key,
)
from .group_manager import (
    GROUP_KEY_BYTES,
    DEFAULT_POLICY,
    GroupMetadata,
    Partition,
    RepartitionPolicy,
    Sealer,
    add_user,
    client_decrypt,
    client_fetch_partition,
    create_group,
    load_group,
    maybe_repartition,
    push_group,
    remove_user,
)
from .metadata_store import DirectoryStore, MemoryStore
from .pairing_core import (
    CURVE_LABEL,
    G1_BYTES,
    G2_BYTES,
    GT_BYTES,
    ORDER,
    SCALAR_BYTES,
    SECURITY_LABEL,
    G1Elem,
    G2Elem,
    GTElem,
    Scalar,
    as_identity,
    hash_to_scalar,
    pairing,
)
from .replay import ReplayConfig, ReplayReport, replay
from .trace import (
    TraceEvent,
    gen_synthetic_trace,
    ingest_vcs_trace,
    read_trace,
    validate_trace,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "BroadcastCiphertext", "CapacityExceededError", "CIPHERTEXT_BYTES",
    "CURVE_LABEL", "DEFAULT_POLICY", "DegenerateIdentityError",
    "DirectoryStore", "G1Elem", "G1_BYTES", "G2Elem", "G2_BYTES",
    "GROUP_KEY_BYTES", "GTElem", "GT_BYTES", "GroupMetadata", "IbbekitError",
    "InvalidInputError", "MasterSecretKey", "MemoryStore", "NotAMemberError",
    "ORDER", "Partition", "PublicKey", "RepartitionPolicy", "ReplayConfig",
    "ReplayReport", "SCALAR_BYTES", "SECURITY_LABEL", "Scalar", "Sealer",
    "StaleMetadataError", "TraceEvent", "TraceParseError",
    "TrustBoundaryError", "UserSecretKey", "add_user", "add_user_msk", "add_user_pk",
    "as_identity", "client_decrypt", "client_fetch_partition", "create_group",
    "decrypt", "encrypt_msk", "encrypt_pk", "extract", "gen_synthetic_trace",
    "hash_to_scalar", "ingest_vcs_trace", "load_group", "maybe_repartition",
    "pairing", "push_group", "read_trace", "rekey", "remove_user",
    "remove_user_msk", "replay", "setup", "validate_trace",
    "verify_user_key", "write_trace",
]
