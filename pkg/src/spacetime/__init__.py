"""Space-time algebra workbench."""
from .lattice import INF, MAX_TIME, OpKind, Order, Time, binary, delay, order
from .network import Builder, Network, evaluate
from .syntax import format_expr, parse_expr

__version__ = "0.1.0"
__all__ = ["INF", "MAX_TIME", "OpKind", "Order", "Time", "binary", "delay", "order",
           "Builder", "Network", "evaluate", "format_expr", "parse_expr"]
