"""Pure numpy versions of the compiled kernels."""

import string

import numpy as np


def triple_traces(gens):
    g = np.asarray(gens, dtype=np.complex128)
    return np.einsum("aij,bjk,cki->abc", g, g, g, optimize=True)


def site_operator(stacks, term_idx, term_val, sites, d, n_particles):
    k = len(sites)
    idx = np.asarray(term_idx, dtype=np.intp).reshape(-1, k)
    val = np.asarray(term_val, dtype=np.complex128)
    letters = string.ascii_letters
    row_l, col_l = letters[:k], letters[k:2 * k]
    operands = [val]
    subs = ["t"]
    for s in range(k):
        operands.append(np.asarray(stacks[s], dtype=np.complex128)[idx[:, s]])
        subs.append("t" + row_l[s] + col_l[s])
    local = np.einsum(",".join(subs) + "->" + row_l + col_l, *operands, optimize=True)
    local = local.reshape(d ** k, d ** k)

    rest = [q for q in range(n_particles) if q not in sites]
    full = np.kron(local, np.eye(d ** len(rest), dtype=np.complex128))
    full = full.reshape([d] * (2 * n_particles))
    order = list(sites) + rest
    axes = [order.index(q) for q in range(n_particles)]
    full = full.transpose(axes + [n_particles + a for a in axes])
    return np.ascontiguousarray(full.reshape(d ** n_particles, d ** n_particles))
