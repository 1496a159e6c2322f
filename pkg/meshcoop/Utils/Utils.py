import logging

_logger = logging.getLogger("meshcoop")

# Absolute tolerance on reduced costs and row activities inside the solvers.
FEASIBILITY_TOLERANCE = 1e-9

# Relative tolerance for duality gaps and every game-level comparison.
GAME_TOLERANCE = 1e-6

should_log = True

def log(content, level: int = logging.INFO):
    if not should_log:
        return
    _logger.log(level, content)

def warn(content):
    log(content, logging.WARNING)

def debug(content):
    log(content, logging.DEBUG)

def configure_logging(verbose: bool = False):
    """Attaches a stderr handler to the ``meshcoop`` logger.

    Args:
        verbose (``bool``, optional): Whether debug messages should be shown. Defaults to False.
    """
    if not _logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(message)s"))
        _logger.addHandler(handler)

    _logger.setLevel(logging.DEBUG if verbose else logging.WARNING)

def tolerance_for(reference: float, tolerance: float = GAME_TOLERANCE) -> float:
    """Returns the absolute-relative hybrid tolerance ``tolerance * max(1, |reference|)``."""
    return tolerance * max(1.0, abs(reference))

def approx_equal(a: float, b: float, tolerance: float = GAME_TOLERANCE) -> bool:
    return abs(a - b) <= tolerance_for(max(abs(a), abs(b)), tolerance)

def approx_geq(a: float, b: float, tolerance: float = GAME_TOLERANCE) -> bool:
    return a >= b - tolerance_for(max(abs(a), abs(b)), tolerance)

def submasks(mask: int):
    """Yields every non-empty submask of ``mask``, largest first."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask

def members_of(mask: int) -> list[int]:
    """Returns the provider ids (1-based) encoded in a bitmask."""
    members = []
    index = 1

    while mask:
        if mask & 1:
            members.append(index)
        mask >>= 1
        index += 1

    return members

def mask_of(members) -> int:
    mask = 0
    for member in members:
        mask |= 1 << (member - 1)
    return mask

def format_payoff(value: float | None) -> str:
    if value is None:
        return "-"
    return f"{value:.4f}"
