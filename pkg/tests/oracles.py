"""Reference implementations written independently of the package code."""

import math
from fractions import Fraction
from itertools import product

import numpy as np


def loglik(params, Z, y, ridge):
    """Penalized Bernoulli log-likelihood for many parameter vectors at once.

    ``params`` is (m, k+1) with the intercept last.
    """
    params = np.atleast_2d(params)
    eta = params[:, :-1] @ Z.T + params[:, -1:]
    ll = (y * eta - np.logaddexp(0.0, eta)).sum(axis=1)
    return ll - 0.5 * ridge * (params[:, :-1] ** 2).sum(axis=1)


def standardize(X):
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd[sd < 1e-9] = 1.0
    return (X - mu) / sd


def grid_argmax(Z, y, ridge, half=16.0, points=31, keep=5, tol=1e-6):
    """Zooming dense grid search for the penalized log-likelihood maximizer."""
    k = Z.shape[1] + 1
    center = np.zeros(k)
    while True:
        axis = np.linspace(-half, half, points)
        step = axis[1] - axis[0]
        grid = center + np.array(list(product(axis, repeat=k)))
        center = grid[np.argmax(loglik(grid, Z, y, ridge))]
        if step < tol:
            return center
        half = keep * step


def fd_gradient(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def oner_scan(probs, labels):
    """Every candidate cutoff scored by counting, best by (accuracy, TPR, -cutoff)."""
    vals = sorted(set(probs))
    cands = [0.0, 1.0] + [(a + b) / 2 for a, b in zip(vals, vals[1:])]
    best = None
    for c in cands:
        tp = sum(1 for p, l in zip(probs, labels) if p > c and l == 1)
        tn = sum(1 for p, l in zip(probs, labels) if p <= c and l == 0)
        key = (tp + tn, tp, -c)
        if best is None or key > best[0]:
            best = (key, c)
    return best[1]


def pair_auc(scores, labels):
    """Mann-Whitney statistic by explicit pair counting, exact."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    wins = Fraction(0)
    for p in pos:
        for n in neg:
            wins += 1 if p > n else Fraction(1, 2) if p == n else 0
    return wins / (len(pos) * len(neg))


def gaussian_nb_posterior(X, y, x):
    """P(y=1 | x) from per-class sample means/variances, computed in plain floats."""
    def loglike(c):
        rows = [r for r, l in zip(X, y) if l == c]
        total = math.log(len(rows) / len(X))
        for j in range(len(x)):
            col = [r[j] for r in rows]
            mu = sum(col) / len(col)
            var = sum((v - mu) ** 2 for v in col) / len(col)
            total += -0.5 * math.log(2 * math.pi * var) - (x[j] - mu) ** 2 / (2 * var)
        return total

    l0, l1 = loglike(0), loglike(1)
    return 1 / (1 + math.exp(l0 - l1))
