from .sparse import (
    SparseMatrix,
    DiagonalMatrix,
    BinTable,
    build_d_e,
    to_loc_val,
    from_loc_val,
    column_order,
    build_bins,
    bin_product,
    matmul_oracle,
)

__all__ = [
    "SparseMatrix",
    "DiagonalMatrix",
    "BinTable",
    "build_d_e",
    "to_loc_val",
    "from_loc_val",
    "column_order",
    "build_bins",
    "bin_product",
    "matmul_oracle",
]
