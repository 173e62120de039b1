from numerics.precision import PrecisionPair
from orthogonalization.bcgs_pip import BCGSPIP
from orthogonalization.bcgs_pip_plus import BCGSPIPPlus
from orthogonalization.bcgs_pipi_plus import BCGSPIPIPlus

UNIFORM_ALGORITHMS = {
    "BCGS_PIP": BCGSPIP,
    "BCGS_PIP+": BCGSPIPPlus,
    "BCGS_PIPI+": BCGSPIPIPlus,
}

MIXED_ALGORITHMS = {
    "BCGS_PIP_MP": BCGSPIP,
    "BCGS_PIP+_MP": BCGSPIPPlus,
    "BCGS_PIPI+_MP": BCGSPIPIPlus,
}

ALGORITHMS = {**UNIFORM_ALGORITHMS, **MIXED_ALGORITHMS}

DEFAULT_MP_PAIR = ("double", "double_double")


def is_mixed(algorithm):
    return algorithm in MIXED_ALGORITHMS


def expected_sync_points(algorithm, p):
    """
    Closed-form synchronization count of an algorithm on p block vectors.

    Parameters:
    - algorithm: str
        Registered algorithm name.
    - p: int
        Number of block vectors.

    Returns:
    - int: p for PIP, 2p for PIP+, 2p - 1 for PIPI+ (MP variants alike)
    """
    solver = ALGORITHMS.get(algorithm)
    if solver is BCGSPIP:
        return p
    if solver is BCGSPIPPlus:
        return 2 * p
    if solver is BCGSPIPIPlus:
        return 2 * p - 1
    raise ValueError(f"Unknown algorithm '{algorithm}'")


def resolve_pair(algorithm, precision="double", mp_pair=None):
    """
    Precision pair an algorithm runs with.

    Uniform algorithms use the degenerate pair (precision, precision); MP ones
    use mp_pair, falling back to (double, double_double).
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"Unknown algorithm '{algorithm}'")
    if is_mixed(algorithm):
        low, high = mp_pair if mp_pair is not None else DEFAULT_MP_PAIR
        return PrecisionPair(low, high)
    return PrecisionPair.uniform(precision)


def run_algorithm(algorithm, X, io="house_qr", precision="double", mp_pair=None, cholesky_variant="nonstop"):
    """
    Runs one registered orthogonalization on a block matrix.

    Parameters:
    - algorithm: str
    - X: BlockMatrix
    - io: str or IntraorthId
    - precision: str
        Working precision of the uniform algorithms.
    - mp_pair: tuple of two precision names or None
        Low/high pair of the MP algorithms.
    - cholesky_variant: str
        "nonstop" or "lapack".

    Returns:
    - QRFactors, RunStats, PrecisionPair
    """
    pair = resolve_pair(algorithm, precision, mp_pair)
    solver = ALGORITHMS[algorithm](io, pair, cholesky_variant)
    factors, stats = solver.orthogonalize(X)
    return factors, stats, pair
