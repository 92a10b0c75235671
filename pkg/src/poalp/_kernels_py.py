"""Pure-Python profile-enumeration kernels, used when the extension is not built.

Profiles are enumerated in ``itertools.product`` order (last player fastest).
``masks[i, k, r]`` is 1 when action ``k`` of player ``i`` contains resource ``r``;
``wpad``/``fpad`` are the zero-padded basis and mechanism, indexed by load.
"""

from itertools import product

import numpy as np


def n_profiles(n_actions):
    return int(np.prod(n_actions, dtype=np.int64))


def _profiles(n_actions):
    return product(*(range(int(k)) for k in n_actions))


def evaluate_profiles(values, masks, n_actions, wpad, fpad, eps):
    n = masks.shape[0]
    P = n_profiles(n_actions)
    welfare = np.empty(P)
    nash = np.empty(P, dtype=bool)
    usum = np.empty(P)
    masks = masks.astype(np.int64)
    for p, act in enumerate(_profiles(n_actions)):
        chosen = masks[np.arange(n), act]
        loads = chosen.sum(axis=0)
        welfare[p] = float(values @ wpad[loads]) if loads.any() else 0.0
        ok = True
        total = 0.0
        for i in range(n):
            u_cur = float((chosen[i] * values) @ fpad[loads])
            total += u_cur
            if not ok:
                continue
            alt_loads = loads - chosen[i] + 1
            for k in range(int(n_actions[i])):
                if k != act[i] and float((masks[i, k] * values) @ fpad[alt_loads]) > u_cur + eps:
                    ok = False
                    break
        nash[p] = ok
        usum[p] = total
    return welfare, nash, usum


def deviation_table(values, masks, n_actions, wpad, fpad):
    n, kmax, _ = masks.shape
    P = n_profiles(n_actions)
    welfare = np.empty(P)
    udev = np.full((P, n, kmax), -np.inf)
    masks = masks.astype(np.int64)
    for p, act in enumerate(_profiles(n_actions)):
        chosen = masks[np.arange(n), act]
        loads = chosen.sum(axis=0)
        welfare[p] = float(values @ wpad[loads]) if loads.any() else 0.0
        for i in range(n):
            alt = fpad[loads - chosen[i] + 1] * values
            k = int(n_actions[i])
            udev[p, i, :k] = masks[i, :k] @ alt
    return welfare, udev
