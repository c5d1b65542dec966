from ._core import (
    BudgetExceeded,
    CssCode,
    InvalidSyndrome,
    Lattice,
    LayerCodeError,
    ParseError,
    bounds,
    build_layer_code,
    decode,
    deserialize_lattice,
    energy_barrier,
    load_css,
    logical_failure_mask,
    memory_time,
    parse_css,
    rate,
    syndrome,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
