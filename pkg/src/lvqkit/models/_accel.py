"""Compiled per-step update cores and epoch drivers for the vectorial variants.

These mirror the reference step operations in :mod:`lvqkit.models` exactly
(same update order, same winner tie rule: lowest prototype index) and exist
only because the training loops are far too hot for interpreted per-sample
steps.  ``tests/test_accel.py`` pins the agreement between both paths.

All functions mutate their array arguments in place.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_EPS_FLOOR = 1e-12
# coordinates of runaway prototypes are pinned here; far beyond any data
# scale yet safely squarable in float64
_COORD_LIMIT = 1e100


@njit(cache=True)
def _sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


@njit(cache=True)
def _euclid_dists(protos, x, out):
    m, d = protos.shape
    for j in range(m):
        s = 0.0
        for k in range(d):
            diff = x[k] - protos[j, k]
            s += diff * diff
        out[j] = s


@njit(cache=True)
def _relevance_dists(protos, lam, x, out):
    m, d = protos.shape
    for j in range(m):
        s = 0.0
        for k in range(d):
            diff = x[k] - protos[j, k]
            s += lam[k] * diff * diff
        out[j] = s


@njit(cache=True)
def _select_pair(dists, plabels, y):
    """Nearest same-class and nearest other-class prototype (lowest index wins ties)."""
    jp = -1
    jm = -1
    dp = np.inf
    dm = np.inf
    for j in range(dists.shape[0]):
        if plabels[j] == y:
            if dists[j] < dp:
                dp = dists[j]
                jp = j
        else:
            if dists[j] < dm:
                dm = dists[j]
                jm = j
    return jp, dp, jm, dm


@njit(cache=True)
def _renorm_relevance(lam):
    total = 0.0
    for k in range(lam.shape[0]):
        if lam[k] < 0.0:
            lam[k] = 0.0
        total += lam[k]
    if total <= 0.0:
        raise ValueError("relevance vector collapsed to zero")
    for k in range(lam.shape[0]):
        lam[k] /= total


@njit(cache=True)
def _renorm_omega(omega):
    total = 0.0
    d = omega.shape[0]
    for l in range(d):
        for k in range(d):
            total += omega[l, k] * omega[l, k]
    if total <= 0.0:
        raise ValueError("omega collapsed to zero")
    scale = 1.0 / math.sqrt(total)
    for l in range(d):
        for k in range(d):
            omega[l, k] *= scale


@njit(cache=True)
def lvq1_core(protos, plabels, x, y, eps):
    dists = np.empty(protos.shape[0])
    _euclid_dists(protos, x, dists)
    j = 0
    best = dists[0]
    for i in range(1, dists.shape[0]):
        if dists[i] < best:
            best = dists[i]
            j = i
    sign = 1.0 if plabels[j] == y else -1.0
    for k in range(protos.shape[1]):
        protos[j, k] += sign * eps * (x[k] - protos[j, k])


@njit(cache=True)
def lvq21_core(protos, plabels, x, y, eps, s_window):
    dists = np.empty(protos.shape[0])
    _euclid_dists(protos, x, dists)
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    if dp == 0.0 or dm == 0.0:
        ratio = 1.0 if dp == dm else 0.0
    else:
        ratio = dm / dp if dm < dp else dp / dm
    if ratio > s_window:
        for k in range(protos.shape[1]):
            protos[jp, k] += eps * (x[k] - protos[jp, k])
            protos[jm, k] -= eps * (x[k] - protos[jm, k])


@njit(cache=True)
def glvq_core(protos, plabels, x, y, eps):
    dists = np.empty(protos.shape[0])
    _euclid_dists(protos, x, dists)
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    cp = 2.0 * eps * phi_p * (2.0 * dm / (denom * denom))
    cm = 2.0 * eps * phi_p * (2.0 * dp / (denom * denom))
    for k in range(protos.shape[1]):
        protos[jp, k] += cp * (x[k] - protos[jp, k])
        protos[jm, k] -= cm * (x[k] - protos[jm, k])


@njit(cache=True)
def sng_core(protos, plabels, x, y, eps, neigh):
    m = protos.shape[0]
    dists = np.empty(m)
    _euclid_dists(protos, x, dists)
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    # every same-class prototype moves, weighted by its distance rank
    for j in range(m):
        if plabels[j] != y:
            continue
        rank = 0
        for l in range(m):
            if plabels[l] != y or l == j:
                continue
            if dists[l] < dists[j] or (dists[l] == dists[j] and l < j):
                rank += 1
        dj = dists[j]
        denom = dj + dm
        if denom <= 0.0:
            raise ValueError("zero distance to both winners")
        mu = (dj - dm) / denom
        s = _sigmoid(mu)
        coef = 2.0 * eps * s * (1.0 - s) * (2.0 * dm / (denom * denom)) * math.exp(-rank / neigh)
        for k in range(protos.shape[1]):
            protos[j, k] += coef * (x[k] - protos[j, k])
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    cm = 2.0 * eps * s * (1.0 - s) * (2.0 * dp / (denom * denom))
    for k in range(protos.shape[1]):
        protos[jm, k] -= cm * (x[k] - protos[jm, k])


@njit(cache=True)
def h2m_blend_core(protos, plabels, x, y, eps, beta):
    """Harmonic-to-minimum training step.

    beta = 1 is the initialization-insensitive phase: every same-class
    prototype is attracted with its normalized harmonic weight
    (1/d_j^2) / sum_l (1/d_l^2).  beta = 0 is the plain minimum-distance
    margin step; the trainer anneals beta from 1 to 0.
    """
    m = protos.shape[0]
    dists = np.empty(m)
    _euclid_dists(protos, x, dists)
    jp = -1
    jm = -1
    dp = np.inf
    dm = np.inf
    wsum = 0.0
    for j in range(m):
        if dists[j] < _EPS_FLOOR:
            dists[j] = _EPS_FLOOR
        if plabels[j] == y:
            wsum += 1.0 / (dists[j] * dists[j])
            if dists[j] < dp:
                dp = dists[j]
                jp = j
        else:
            if dists[j] < dm:
                dm = dists[j]
                jm = j
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    if beta > 0.0:
        for j in range(m):
            if plabels[j] == y:
                coef = beta * eps * (1.0 / (dists[j] * dists[j])) / wsum
                for k in range(protos.shape[1]):
                    protos[j, k] += coef * (x[k] - protos[j, k])
    if beta < 1.0:
        denom = dp + dm
        mu = (dp - dm) / denom
        s = _sigmoid(mu)
        phi_p = s * (1.0 - s)
        cp = (1.0 - beta) * 2.0 * eps * phi_p * (2.0 * dm / (denom * denom))
        cm = (1.0 - beta) * 2.0 * eps * phi_p * (2.0 * dp / (denom * denom))
        for k in range(protos.shape[1]):
            protos[jp, k] += cp * (x[k] - protos[jp, k])
            protos[jm, k] -= cm * (x[k] - protos[jm, k])


@njit(cache=True)
def h2mlvq_core(protos, plabels, x, y, eps):
    m = protos.shape[0]
    dists = np.empty(m)
    _euclid_dists(protos, x, dists)
    n_same = 0
    n_other = 0
    sum_same = 0.0
    sum_other = 0.0
    for j in range(m):
        if dists[j] < _EPS_FLOOR:
            dists[j] = _EPS_FLOOR
        if plabels[j] == y:
            n_same += 1
            sum_same += 1.0 / dists[j]
        else:
            n_other += 1
            sum_other += 1.0 / dists[j]
    if n_same == 0 or n_other == 0:
        raise ValueError("need a same-class and an other-class prototype")
    hp = n_same / sum_same
    hm = n_other / sum_other
    denom = hp + hm
    mu = (hp - hm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    mup = 2.0 * hm / (denom * denom)
    mum = 2.0 * hp / (denom * denom)
    for j in range(m):
        ratio = 0.0
        if plabels[j] == y:
            ratio = (hp / dists[j]) ** 2 / n_same
            coef = 2.0 * eps * phi_p * mup * ratio
            for k in range(protos.shape[1]):
                protos[j, k] += coef * (x[k] - protos[j, k])
        else:
            ratio = (hm / dists[j]) ** 2 / n_other
            coef = 2.0 * eps * phi_p * mum * ratio
            for k in range(protos.shape[1]):
                protos[j, k] -= coef * (x[k] - protos[j, k])


@njit(cache=True)
def grlvq_core(protos, plabels, lam, x, y, eps_w, eps_l):
    d = protos.shape[1]
    dists = np.empty(protos.shape[0])
    _relevance_dists(protos, lam, x, dists)
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    mup = 2.0 * dm / (denom * denom)
    mum = 2.0 * dp / (denom * denom)
    up = np.empty(d)
    um = np.empty(d)
    for k in range(d):
        up[k] = x[k] - protos[jp, k]
        um[k] = x[k] - protos[jm, k]
    cp = 2.0 * eps_w * phi_p * mup
    cm = 2.0 * eps_w * phi_p * mum
    for k in range(d):
        protos[jp, k] += cp * lam[k] * up[k]
        protos[jm, k] -= cm * lam[k] * um[k]
    if eps_l != 0.0:
        for k in range(d):
            lam[k] -= eps_l * phi_p * (mup * up[k] * up[k] - mum * um[k] * um[k])
        _renorm_relevance(lam)


@njit(cache=True)
def gmlvq_core(protos, plabels, omega, x, y, eps_w, eps_o_diag, eps_o_off):
    m, d = protos.shape
    u_all = x - protos
    proj_all = u_all @ omega.T
    dists = np.empty(m)
    for j in range(m):
        s = 0.0
        for l in range(d):
            s += proj_all[j, l] * proj_all[j, l]
        dists[j] = s
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    mup = 2.0 * dm / (denom * denom)
    mum = 2.0 * dp / (denom * denom)
    up = np.ascontiguousarray(u_all[jp])
    um = np.ascontiguousarray(u_all[jm])
    proj_p = np.ascontiguousarray(proj_all[jp])
    proj_m = np.ascontiguousarray(proj_all[jm])
    lam_up = proj_p @ omega
    lam_um = proj_m @ omega
    cp = 2.0 * eps_w * phi_p * mup
    cm = 2.0 * eps_w * phi_p * mum
    for k in range(d):
        protos[jp, k] += cp * lam_up[k]
        protos[jm, k] -= cm * lam_um[k]
    if eps_o_diag != 0.0 or eps_o_off != 0.0:
        # branch-free rank-2 update at the off-diagonal rate, then fix the
        # diagonal by the rate difference
        gp = 2.0 * phi_p * mup
        gm = 2.0 * phi_p * mum
        for l in range(d):
            a = eps_o_off * gp * proj_p[l]
            b = eps_o_off * gm * proj_m[l]
            for k in range(d):
                omega[l, k] -= a * up[k] - b * um[k]
        extra = eps_o_diag - eps_o_off
        if extra != 0.0:
            for l in range(d):
                omega[l, l] -= extra * (gp * proj_p[l] * up[l] - gm * proj_m[l] * um[l])
        _renorm_omega(omega)


@njit(cache=True)
def lgrlvq_core(protos, plabels, lams, x, y, eps_w, eps_l):
    m, d = protos.shape
    dists = np.empty(m)
    for j in range(m):
        s = 0.0
        for k in range(d):
            diff = x[k] - protos[j, k]
            s += lams[j, k] * diff * diff
        dists[j] = s
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    mup = 2.0 * dm / (denom * denom)
    mum = 2.0 * dp / (denom * denom)
    up = np.empty(d)
    um = np.empty(d)
    for k in range(d):
        up[k] = x[k] - protos[jp, k]
        um[k] = x[k] - protos[jm, k]
    cp = 2.0 * eps_w * phi_p * mup
    cm = 2.0 * eps_w * phi_p * mum
    for k in range(d):
        protos[jp, k] += cp * lams[jp, k] * up[k]
        protos[jm, k] -= cm * lams[jm, k] * um[k]
    if eps_l != 0.0:
        for k in range(d):
            lams[jp, k] -= eps_l * phi_p * mup * up[k] * up[k]
            lams[jm, k] += eps_l * phi_p * mum * um[k] * um[k]
        _renorm_relevance(lams[jp])
        _renorm_relevance(lams[jm])


@njit(cache=True)
def lgmlvq_core(protos, plabels, omegas, x, y, eps_w, eps_o_diag, eps_o_off):
    m, d = protos.shape
    u_all = x - protos
    dists = np.empty(m)
    for j in range(m):
        pj = omegas[j] @ np.ascontiguousarray(u_all[j])
        s = 0.0
        for l in range(d):
            s += pj[l] * pj[l]
        dists[j] = s
    jp, dp, jm, dm = _select_pair(dists, plabels, y)
    if jp < 0 or jm < 0:
        raise ValueError("need a same-class and an other-class prototype")
    denom = dp + dm
    if denom <= 0.0:
        raise ValueError("zero distance to both winners")
    mu = (dp - dm) / denom
    s = _sigmoid(mu)
    phi_p = s * (1.0 - s)
    mup = 2.0 * dm / (denom * denom)
    mum = 2.0 * dp / (denom * denom)
    up = np.ascontiguousarray(u_all[jp])
    um = np.ascontiguousarray(u_all[jm])
    proj_p = omegas[jp] @ up
    proj_m = omegas[jm] @ um
    lam_up = proj_p @ omegas[jp]
    lam_um = proj_m @ omegas[jm]
    cp = 2.0 * eps_w * phi_p * mup
    cm = 2.0 * eps_w * phi_p * mum
    for k in range(d):
        protos[jp, k] += cp * lam_up[k]
        protos[jm, k] -= cm * lam_um[k]
    if eps_o_diag != 0.0 or eps_o_off != 0.0:
        for l in range(d):
            for k in range(d):
                rate = eps_o_diag if l == k else eps_o_off
                omegas[jp, l, k] -= rate * 2.0 * phi_p * mup * up[k] * proj_p[l]
                omegas[jm, l, k] += rate * 2.0 * phi_p * mum * um[k] * proj_m[l]
        _renorm_omega(omegas[jp])
        _renorm_omega(omegas[jm])


@njit(cache=True)
def _sanitize_dists(dists, plabels, y):
    """Map non-finite distances (diverged prototypes) to +inf.

    Returns False when the sample's class has no finite prototype left, in
    which case the log-ratio carries no gradient and the step is skipped.
    """
    finite_same = False
    for j in range(dists.shape[0]):
        if not np.isfinite(dists[j]):
            dists[j] = np.inf
        elif plabels[j] == y:
            finite_same = True
    return finite_same


@njit(cache=True)
def _posteriors(dists, plabels, priors, y, sigma):
    """Softmax assignment probabilities over all prototypes and class-restricted."""
    m = dists.shape[0]
    f = np.empty(m)
    inv = 1.0 / (2.0 * sigma * sigma)
    for j in range(m):
        f[j] = -dists[j] * inv
    max_all = -np.inf
    max_y = -np.inf
    for j in range(m):
        if f[j] > max_all:
            max_all = f[j]
        if plabels[j] == y and f[j] > max_y:
            max_y = f[j]
    if max_y == -np.inf:
        raise ValueError("no prototype for the sample class")
    p_all = np.empty(m)
    p_y = np.zeros(m)
    s_all = 0.0
    s_y = 0.0
    for j in range(m):
        e = priors[j] * math.exp(f[j] - max_all)
        p_all[j] = e
        s_all += e
        if plabels[j] == y:
            ey = priors[j] * math.exp(f[j] - max_y)
            p_y[j] = ey
            s_y += ey
    for j in range(m):
        p_all[j] /= s_all
        if plabels[j] == y:
            p_y[j] /= s_y
    return p_y, p_all


@njit(cache=True)
def rslvq_core(protos, plabels, priors, x, y, eps, sigma):
    m, d = protos.shape
    dists = np.empty(m)
    _euclid_dists(protos, x, dists)
    if not _sanitize_dists(dists, plabels, y):
        return
    p_y, p_all = _posteriors(dists, plabels, priors, y, sigma)
    coef = eps / (sigma * sigma)
    for j in range(m):
        if plabels[j] == y:
            c = coef * (p_y[j] - p_all[j])
        else:
            c = -coef * p_all[j]
        for k in range(d):
            v = protos[j, k] + c * (x[k] - protos[j, k])
            if v > _COORD_LIMIT:
                v = _COORD_LIMIT
            elif v < -_COORD_LIMIT:
                v = -_COORD_LIMIT
            protos[j, k] = v


@njit(cache=True)
def mrslvq_core(protos, plabels, priors, omega, x, y, eps, eps_o, sigma):
    m, d = protos.shape
    u = np.empty((m, d))
    for j in range(m):
        for k in range(d):
            u[j, k] = x[k] - protos[j, k]
    proj = u @ omega.T
    dists = np.empty(m)
    for j in range(m):
        s = 0.0
        for l in range(d):
            s += proj[j, l] * proj[j, l]
        dists[j] = s
    if not _sanitize_dists(dists, plabels, y):
        return
    p_y, p_all = _posteriors(dists, plabels, priors, y, sigma)
    coef = eps / (sigma * sigma)
    gates = np.empty(m)
    for j in range(m):
        if plabels[j] == y:
            gates[j] = p_y[j] - p_all[j]
        else:
            gates[j] = -p_all[j]
    for j in range(m):
        c = coef * gates[j]
        lam_u = proj[j] @ omega
        for k in range(d):
            v = protos[j, k] + c * lam_u[k]
            if v > _COORD_LIMIT:
                v = _COORD_LIMIT
            elif v < -_COORD_LIMIT:
                v = -_COORD_LIMIT
            protos[j, k] = v
    if eps_o != 0.0:
        oc = eps_o / (sigma * sigma)
        for l in range(d):
            for k in range(d):
                acc = 0.0
                for j in range(m):
                    acc += gates[j] * proj[j, l] * u[j, k]
                omega[l, k] -= oc * acc
        _renorm_omega(omega)


@njit(cache=True)
def epoch_lvq1(protos, plabels, X, labels, order, eps):
    for t in range(order.shape[0]):
        i = order[t]
        lvq1_core(protos, plabels, X[i], labels[i], eps)


@njit(cache=True)
def epoch_lvq21(protos, plabels, X, labels, order, eps, s_window):
    for t in range(order.shape[0]):
        i = order[t]
        lvq21_core(protos, plabels, X[i], labels[i], eps, s_window)


@njit(cache=True)
def epoch_glvq(protos, plabels, X, labels, order, eps):
    for t in range(order.shape[0]):
        i = order[t]
        glvq_core(protos, plabels, X[i], labels[i], eps)


@njit(cache=True)
def epoch_sng(protos, plabels, X, labels, order, eps, neigh):
    for t in range(order.shape[0]):
        i = order[t]
        sng_core(protos, plabels, X[i], labels[i], eps, neigh)


@njit(cache=True)
def epoch_h2mlvq(protos, plabels, X, labels, order, eps, beta):
    for t in range(order.shape[0]):
        i = order[t]
        h2m_blend_core(protos, plabels, X[i], labels[i], eps, beta)


@njit(cache=True)
def epoch_grlvq(protos, plabels, lam, X, labels, order, eps_w, eps_l):
    for t in range(order.shape[0]):
        i = order[t]
        grlvq_core(protos, plabels, lam, X[i], labels[i], eps_w, eps_l)


@njit(cache=True)
def epoch_gmlvq(protos, plabels, omega, X, labels, order, eps_w, eps_o_diag, eps_o_off):
    for t in range(order.shape[0]):
        i = order[t]
        gmlvq_core(protos, plabels, omega, X[i], labels[i], eps_w, eps_o_diag, eps_o_off)


@njit(cache=True)
def epoch_lgrlvq(protos, plabels, lams, X, labels, order, eps_w, eps_l):
    for t in range(order.shape[0]):
        i = order[t]
        lgrlvq_core(protos, plabels, lams, X[i], labels[i], eps_w, eps_l)


@njit(cache=True)
def epoch_lgmlvq(protos, plabels, omegas, X, labels, order, eps_w, eps_o_diag, eps_o_off):
    for t in range(order.shape[0]):
        i = order[t]
        lgmlvq_core(protos, plabels, omegas, X[i], labels[i], eps_w, eps_o_diag, eps_o_off)


@njit(cache=True)
def _kernel_row_update(coeffs, kg, q, gram, diag_i, i, j, c):
    """Row update g_j += c (e_i - g_j) with its incremental distance caches."""
    kg_old_i = kg[j, i]
    keep = 1.0 - c
    for s in range(coeffs.shape[1]):
        coeffs[j, s] *= keep
        kg[j, s] += c * (gram[i, s] - kg[j, s])
    coeffs[j, i] += c
    q[j] = keep * keep * q[j] + 2.0 * c * keep * kg_old_i + c * c * diag_i


@njit(cache=True)
def epoch_kglvq(coeffs, plabels, kg, q, gram, diag_k, labels, order, eps):
    m = coeffs.shape[0]
    dists = np.empty(m)
    for t in range(order.shape[0]):
        i = order[t]
        y = labels[i]
        for j in range(m):
            dists[j] = diag_k[i] - 2.0 * kg[j, i] + q[j]
        jp, dp, jm, dm = _select_pair(dists, plabels, y)
        if jp < 0 or jm < 0:
            raise ValueError("need a same-class and an other-class prototype")
        denom = dp + dm
        if denom <= 0.0:
            raise ValueError("zero distance to both winners")
        mu = (dp - dm) / denom
        s = _sigmoid(mu)
        phi_p = s * (1.0 - s)
        a = eps * phi_p * (2.0 * dm / (denom * denom))
        b = eps * phi_p * (2.0 * dp / (denom * denom))
        _kernel_row_update(coeffs, kg, q, gram, diag_k[i], i, jp, a)
        _kernel_row_update(coeffs, kg, q, gram, diag_k[i], i, jm, -b)


@njit(cache=True)
def epoch_krslvq(coeffs, plabels, kg, q, gram, diag_k, priors, labels, order, eps, sigma):
    m = coeffs.shape[0]
    dists = np.empty(m)
    coef = eps / (sigma * sigma)
    for t in range(order.shape[0]):
        i = order[t]
        y = labels[i]
        for j in range(m):
            dists[j] = diag_k[i] - 2.0 * kg[j, i] + q[j]
        if not _sanitize_dists(dists, plabels, y):
            continue
        p_y, p_all = _posteriors(dists, plabels, priors, y, sigma)
        for j in range(m):
            if plabels[j] == y:
                c = coef * (p_y[j] - p_all[j])
            else:
                c = -coef * p_all[j]
            _kernel_row_update(coeffs, kg, q, gram, diag_k[i], i, j, c)


@njit(cache=True)
def epoch_rslvq(protos, plabels, priors, X, labels, order, eps, sigma):
    for t in range(order.shape[0]):
        i = order[t]
        rslvq_core(protos, plabels, priors, X[i], labels[i], eps, sigma)


@njit(cache=True)
def epoch_mrslvq(protos, plabels, priors, omega, X, labels, order, eps, eps_o, sigma):
    for t in range(order.shape[0]):
        i = order[t]
        mrslvq_core(protos, plabels, priors, omega, X[i], labels[i], eps, eps_o, sigma)
