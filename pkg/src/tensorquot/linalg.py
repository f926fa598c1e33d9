"""Exact dense linear algebra over scalars and over polynomial rings."""
from tensorquot.errors import DivisionByZero
from tensorquot.polyalg import MPoly, exact_divide
from tensorquot.scalar import scalar_div


def row_reduce(rows, ncols):
    """Reduced row echelon form over a field of scalars.

    Returns (rref_rows, pivot_columns).  Input rows are copied.
    """
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = scalar_div(1, m[r][c])
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                row_r = m[r]
                m[i] = [x - f * y for x, y in zip(m[i], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows, ncols=None):
    if not rows:
        return 0
    if ncols is None:
        ncols = len(rows[0])
    return len(row_reduce(rows, ncols)[1])


def solve(columns, rhs):
    """Solve sum_j x_j * columns[j] = rhs for x; None when inconsistent.

    ``columns`` and ``rhs`` are equal-length vectors of scalars (column
    vectors given as lists).  The solution is unique when the columns are
    independent, which is the only case callers rely on.
    """
    nrows = len(rhs)
    ncols = len(columns)
    aug = [[columns[j][i] for j in range(ncols)] + [rhs[i]] for i in range(nrows)]
    red, piv = row_reduce(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [0] * ncols
    for i, c in enumerate(piv):
        x[c] = red[i][ncols]
    return x


def scalar_det(mat):
    n = len(mat)
    m = [list(r) for r in mat]
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det = det * m[c][c]
        inv = scalar_div(1, m[c][c])
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def scalar_inverse(mat):
    n = len(mat)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(mat)]
    red, piv = row_reduce(aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise DivisionByZero("singular matrix")
    return [row[n:] for row in red]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = 0
            for t in range(k):
                if a[i][t] and b[t][j]:
                    s = s + a[i][t] * b[t][j]
            row.append(s)
        out.append(row)
    return out


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


# -- polynomial matrices ----------------------------------------------------

def poly_det(mat, nvars):
    """Determinant of a square MPoly matrix (fraction-free Bareiss)."""
    n = len(mat)
    if n == 0:
        return MPoly.one(nvars)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]
    m = [list(r) for r in mat]
    sign = 1
    prev = MPoly.one(nvars)
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return MPoly.zero(nvars)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_divide(v, prev) if prev != 1 else v
        prev = m[k][k]
    d = m[n - 1][n - 1]
    return -d if sign < 0 else d


def poly_adjugate(mat, nvars):
    """Adjugate matrix: adj(M) M = M adj(M) = det(M) I."""
    n = len(mat)
    if n == 1:
        return [[MPoly.one(nvars)]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(mat) if k != i]
            c = poly_det(minor, nvars)
            adj[j][i] = -c if (i + j) % 2 else c
    return adj
