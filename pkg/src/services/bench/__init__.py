from .harness import (
    CSV_COLUMNS,
    K_GRID,
    SAMPLE_RATES,
    BenchKeys,
    BenchRow,
    k_grid,
    model_comparison,
    protocol_grid,
    render_csv,
    render_table,
    run_case,
    sparse_r_squared,
    sparsity_fixture,
    sparsity_grid,
)

__all__ = [
    "CSV_COLUMNS",
    "K_GRID",
    "SAMPLE_RATES",
    "BenchKeys",
    "BenchRow",
    "k_grid",
    "model_comparison",
    "protocol_grid",
    "render_csv",
    "render_table",
    "run_case",
    "sparse_r_squared",
    "sparsity_fixture",
    "sparsity_grid",
]
