"""Independent brute-force reference for sneak-path indicators.

Deliberately written as plain Python loops over the three defining
conditions, with no shared code or vectorization tricks, so it can serve
as the oracle the production implementation is judged against.
"""


def brute_force_sp_cells(x, sf_pairs):
    """Mark cell (m, n) iff it stores 0 and a broken-selector cell (i, j)
    stores 1 with x[m][j] = 1 and x[i][n] = 1 (a 3-cell alternating path
    (m,n)->(m,j)->(i,j)->(i,n) in parallel with the read)."""
    size = len(x)
    marked = [[0] * size for _ in range(size)]
    for m in range(size):
        for n in range(size):
            if x[m][n] != 0:
                continue
            for (i, j) in sf_pairs:
                if x[i][j] == 1 and x[m][j] == 1 and x[i][n] == 1:
                    marked[m][n] = 1
                    break
    return marked
