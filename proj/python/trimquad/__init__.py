"""Mass matrices and L2 projection on trimmed B-spline spaces."""

from ._trimquad import (
    Basis1D,
    ConfigurationError,
    ConstructionError,
    NotSpdError,
    TrimmedDomain,
    case,
    circle_case,
    classify,
    convergence_study,
    corner_case,
    cut_quadrature,
    dwq_rules,
    gauss_legendre,
    insert_knot,
    line_case,
    make_discontinuous,
    mass_matrix,
    mass_table,
    project,
    subdivision_matrix,
    time_formation,
    wq_rules,
)

STRATEGIES = ("reference", "wq", "hybrid", "dwq")


def mass_matrix_csr(domain, degree, elements, strategy="hybrid"):
    """The mass matrix as a scipy.sparse CSR matrix plus the retained flat indices."""
    from scipy.sparse import csr_matrix

    m = mass_matrix(domain, degree, elements, strategy)
    n = len(m["functions"])
    return csr_matrix((m["data"], m["indices"], m["indptr"]), shape=(n, n)), m["functions"]
