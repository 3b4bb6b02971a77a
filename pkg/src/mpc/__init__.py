from .ring import (
    RING_BITS,
    RING_MODULUS,
    RING_DTYPE,
    RING_ELEMENT_BYTES,
    DEFAULT_FRAC_BITS,
    FixedPointCodec,
    as_ring,
    to_signed,
    random_ring,
    ring_to_bytes,
    ring_from_bytes,
    trunc_local,
)
from .dealer import (
    BeaverTriple,
    TripleStore,
    dealer_generate,
    provision_triples,
    triples_required,
    verify_triple_stores,
    read_triple_store,
    write_triple_store,
)
from .shares import (
    Share,
    SharedMatrix,
    shr,
    recv_shr,
    input_share,
    rec,
    add,
    sub,
    neg,
    mul_public,
    add_public,
    zeros_share,
    mul,
)

__all__ = [
    "RING_BITS", "RING_MODULUS", "RING_DTYPE", "RING_ELEMENT_BYTES", "DEFAULT_FRAC_BITS",
    "FixedPointCodec", "as_ring", "to_signed", "random_ring", "ring_to_bytes", "ring_from_bytes",
    "trunc_local",
    "BeaverTriple", "TripleStore", "dealer_generate", "provision_triples", "triples_required",
    "verify_triple_stores", "read_triple_store", "write_triple_store",
    "Share", "SharedMatrix", "shr", "recv_shr", "input_share", "rec", "add", "sub", "neg",
    "mul_public", "add_public", "zeros_share", "mul",
]
