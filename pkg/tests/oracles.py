"""Independent reference implementations used as test oracles.

Everything here is deliberately naive (explicit loops, no shared code with
the package) so that agreement with the implementation is meaningful.
"""

from __future__ import annotations

import math
import re

import numpy as np


def two_layer_relu_forward(W1, b1, W2, b2, z):
    """Straight-line kernel forward pass for a single vector."""
    hidden = []
    for i in range(W1.shape[0]):
        acc = b1[i]
        for j in range(W1.shape[1]):
            acc += W1[i, j] * z[j]
        hidden.append(acc if acc > 0 else 0.0)
    out = []
    for i in range(W2.shape[0]):
        acc = b2[i]
        for j in range(W2.shape[1]):
            acc += W2[i, j] * hidden[j]
        out.append(acc if acc > 0 else 0.0)
    return np.array(out)


def matvec_transpose(D, t):
    """Naive D.T @ t with explicit loops."""
    m, d = D.shape
    out = np.zeros(d)
    for j in range(d):
        for i in range(m):
            out[j] += D[i, j] * t[i]
    return out


def dict_loss_terms_oracle(D, W1, b1, W2, b2, batch):
    """(reconstruction, sparsity) batch means via straight-line computation.

    The reconstruction value is shared by loss terms 1 and 2; the sparsity
    term is the L1 deviation of each code from the batch-mean code.
    """
    codes = [two_layer_relu_forward(W1, b1, W2, b2, z) for z in batch]
    recon_total = 0.0
    for z, t in zip(batch, codes):
        z_hat = matvec_transpose(D, t)
        recon_total += math.sqrt(sum((zi - hi) ** 2 for zi, hi in zip(z, z_hat)))
    mean_code = sum(codes) / len(codes)
    sparsity_total = 0.0
    for t in codes:
        sparsity_total += sum(abs(ti - mi) for ti, mi in zip(t, mean_code))
    n = len(batch)
    return recon_total / n, sparsity_total / n


def fd_layer_gradients(layer, batch, l1_weight, step=1e-6):
    """Central finite differences of the stop-gradient-masked loss.

    The dictionary sees only the reconstruction term; kernel parameters see
    the reconstruction plus the weighted sparsity term (the stop gradients
    block the other pairings exactly).
    """
    arrays = {name: np.array(getattr(layer, name), dtype=np.float64) for name in
              ("D", "W1", "b1", "W2", "b2")}

    def masked_loss(name):
        recon, sparsity = dict_loss_terms_oracle(
            arrays["D"], arrays["W1"], arrays["b1"], arrays["W2"], arrays["b2"], batch
        )
        if name == "D":
            return recon
        return recon + l1_weight * sparsity

    grads = {}
    for name, arr in arrays.items():
        grad = np.zeros_like(arr)
        flat = arr.reshape(-1)
        grad_flat = grad.reshape(-1)
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + step
            upper = masked_loss(name)
            flat[idx] = original - step
            lower = masked_loss(name)
            flat[idx] = original
            grad_flat[idx] = (upper - lower) / (2 * step)
        grads[name] = grad
    return grads


def adam_scalar_reference(initial, grads, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Hand-stepped Adam on one scalar parameter; returns the value after each step."""
    p, m, v = float(initial), 0.0, 0.0
    history = []
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        p = p - lr * m_hat / (math.sqrt(v_hat) + eps)
        history.append(p)
    return history


def floyd_warshall(n_nodes, edges):
    """All-pairs shortest paths; edges is {(u, v): w} or iterable of (u, v, w)."""
    dist = np.full((n_nodes, n_nodes), np.inf)
    np.fill_diagonal(dist, 0.0)
    items = edges.items() if hasattr(edges, "items") else ((u, v, w) for u, v, w in edges)
    for entry in items:
        if len(entry) == 2:
            (u, v), w = entry
        else:
            u, v, w = entry
        dist[u, v] = min(dist[u, v], w)
    for k in range(n_nodes):
        for i in range(n_nodes):
            for j in range(n_nodes):
                through = dist[i, k] + dist[k, j]
                if through < dist[i, j]:
                    dist[i, j] = through
    return dist


_ORACLE_TOKEN = re.compile(r"[0-9a-z]+")


def rouge_n_bruteforce(candidate: str, reference: str, n: int):
    """Clipped n-gram precision/recall/F1 by nested scanning, no Counter."""
    cand_tokens = _ORACLE_TOKEN.findall(candidate.lower())
    ref_tokens = _ORACLE_TOKEN.findall(reference.lower())
    cand_grams = [tuple(cand_tokens[i : i + n]) for i in range(len(cand_tokens) - n + 1)]
    ref_grams = [tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1)]
    matches = 0
    seen = []
    for gram in cand_grams:
        if gram in seen:
            continue
        seen.append(gram)
        in_cand = sum(1 for g in cand_grams if g == gram)
        in_ref = sum(1 for g in ref_grams if g == gram)
        matches += min(in_cand, in_ref)
    precision = matches / len(cand_grams) if cand_grams else 0.0
    recall = matches / len(ref_grams) if ref_grams else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def lcs_bruteforce(a, b):
    """Quadratic DP LCS length over token lists, written independently."""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[len(a)][len(b)]


def ward_merge_tree_oracle(points):
    """Full Ward agglomeration, recomputing cluster variances from scratch.

    Merge cost is the increase in total within-cluster sum of squared
    deviations; ties prefer the smallest (left_id, right_id). Singletons take
    ids 0..n-1, each merge creates id n+step.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)

    def sse(indices):
        cluster = points[indices]
        center = cluster.mean(axis=0)
        return float(((cluster - center) ** 2).sum())

    active = {i: [i] for i in range(n)}
    tree = []
    next_id = n
    while len(active) > 1:
        best = None
        for a in sorted(active):
            for b in sorted(active):
                if a >= b:
                    continue
                cost = sse(active[a] + active[b]) - sse(active[a]) - sse(active[b])
                if best is None or (cost, a, b) < best:
                    best = (cost, a, b)
        cost, a, b = best
        tree.append((a, b, cost))
        active[next_id] = active.pop(a) + active.pop(b)
        next_id += 1
    return tree
