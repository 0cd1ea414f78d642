"""Numba kernels for the flip engine, bandit arithmetic, and the search loop.

Everything here operates on flat numpy arrays so the inner loop compiles to
machine code; the public wrappers live in state.py, bandit.py and search.py.
Clause ids are global: hard clauses come first (0..nh-1), then soft ones.
Literal codes index occurrence lists: +v -> 2v, -v -> 2v+1.

State scalars sit in ``meta`` (int64): [cost, |goodvars|, |falsified hard|,
|falsified soft|].  Run scalars sit in ``run_meta`` (int64): [best cost,
best-is-feasible flag, previous H (-1 = none yet), hard optima count, soft
optima count, cost at previous feasible optimum, flips executed].
"""

import numpy as np
from numba import njit

# meta slots
COST = 0
GV_SIZE = 1
FH_SIZE = 2
FS_SIZE = 3

# run_meta slots
RM_BEST_COST = 0
RM_BEST_FEAS = 1
RM_H_PREV = 2
RM_NH = 3
RM_NS = 4
RM_COST_PREV = 5
RM_STEPS = 6

# run_chunk return codes
CH_BUDGET = 0
CH_IMPROVED = 1
CH_OPTIMUM = 2

_JIT = dict(cache=True, nogil=True)


# ---------------------------------------------------------------------------
# splitmix64 PRNG; state is a 1-element uint64 array

@njit(**_JIT)
def rng_next(st):
    st[0] += np.uint64(0x9E3779B97F4A7C15)
    z = st[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(**_JIT)
def rng_below(st, m):
    # modulo bias is negligible for the set sizes involved here
    return np.int64(rng_next(st) % np.uint64(m))


# ---------------------------------------------------------------------------
# indexed sets: arr holds members, pos[x - off] is x's slot or -1

@njit(**_JIT)
def _set_add(arr, pos, meta, slot, x, off):
    if pos[x - off] < 0:
        s = meta[slot]
        arr[s] = x
        pos[x - off] = s
        meta[slot] = s + 1


@njit(**_JIT)
def _set_remove(arr, pos, meta, slot, x, off):
    p = pos[x - off]
    if p >= 0:
        s = meta[slot] - 1
        last = arr[s]
        arr[p] = last
        pos[last - off] = p
        pos[x - off] = -1
        meta[slot] = s


@njit(**_JIT)
def _score_bump(score, gv_arr, gv_pos, meta, v, delta):
    s = score[v] + delta
    score[v] = s
    if s > 0:
        _set_add(gv_arr, gv_pos, meta, GV_SIZE, v, 0)
    else:
        _set_remove(gv_arr, gv_pos, meta, GV_SIZE, v, 0)


# ---------------------------------------------------------------------------
# flip engine

@njit(**_JIT)
def build_state(
    assign, lit_flat, cl_start, nh, weight, dyn_w, sat_cnt, crit,
    score, gv_arr, gv_pos, fh_arr, fh_pos, fs_arr, fs_pos, meta,
):
    m = cl_start.shape[0] - 1
    score[:] = 0
    gv_pos[:] = -1
    fh_pos[:] = -1
    fs_pos[:] = -1
    meta[COST] = 0
    meta[GV_SIZE] = 0
    meta[FH_SIZE] = 0
    meta[FS_SIZE] = 0
    for c in range(m):
        cnt = 0
        true_var = 0
        for j in range(cl_start[c], cl_start[c + 1]):
            lit = lit_flat[j]
            v = abs(lit)
            if (lit > 0) == (assign[v] == 1):
                cnt += 1
                true_var = v
        sat_cnt[c] = cnt
        crit[c] = true_var if cnt == 1 else 0
        if cnt == 0:
            w = dyn_w[c]
            for j in range(cl_start[c], cl_start[c + 1]):
                score[abs(lit_flat[j])] += w
            if c < nh:
                _set_add(fh_arr, fh_pos, meta, FH_SIZE, c, 0)
            else:
                _set_add(fs_arr, fs_pos, meta, FS_SIZE, c, nh)
                meta[COST] += weight[c]
        elif cnt == 1:
            score[true_var] -= dyn_w[c]
    for v in range(1, assign.shape[0]):
        if score[v] > 0:
            _set_add(gv_arr, gv_pos, meta, GV_SIZE, v, 0)


@njit(**_JIT)
def flip(
    v, assign, lit_flat, cl_start, nh, weight, dyn_w, sat_cnt, crit,
    occ_flat, occ_start, score, gv_arr, gv_pos, fh_arr, fh_pos,
    fs_arr, fs_pos, meta,
):
    old = assign[v]
    assign[v] = 1 - old
    was_true = 2 * v if old == 1 else 2 * v + 1
    was_false = 2 * v + 1 if old == 1 else 2 * v

    # clauses losing a satisfying literal
    for k in range(occ_start[was_true], occ_start[was_true + 1]):
        c = occ_flat[k]
        s = sat_cnt[c]
        if s == 1:
            sat_cnt[c] = 0
            w = dyn_w[c]
            for j in range(cl_start[c], cl_start[c + 1]):
                _score_bump(score, gv_arr, gv_pos, meta, abs(lit_flat[j]), w)
            _score_bump(score, gv_arr, gv_pos, meta, v, w)
            if c < nh:
                _set_add(fh_arr, fh_pos, meta, FH_SIZE, c, 0)
            else:
                _set_add(fs_arr, fs_pos, meta, FS_SIZE, c, nh)
                meta[COST] += weight[c]
        elif s == 2:
            sat_cnt[c] = 1
            for j in range(cl_start[c], cl_start[c + 1]):
                lit = lit_flat[j]
                u = abs(lit)
                if (lit > 0) == (assign[u] == 1):
                    crit[c] = u
                    _score_bump(score, gv_arr, gv_pos, meta, u, -dyn_w[c])
                    break
        else:
            sat_cnt[c] = s - 1

    # clauses gaining a satisfying literal
    for k in range(occ_start[was_false], occ_start[was_false + 1]):
        c = occ_flat[k]
        s = sat_cnt[c]
        if s == 0:
            sat_cnt[c] = 1
            crit[c] = v
            w = dyn_w[c]
            for j in range(cl_start[c], cl_start[c + 1]):
                _score_bump(score, gv_arr, gv_pos, meta, abs(lit_flat[j]), -w)
            _score_bump(score, gv_arr, gv_pos, meta, v, -w)
            if c < nh:
                _set_remove(fh_arr, fh_pos, meta, FH_SIZE, c, 0)
            else:
                _set_remove(fs_arr, fs_pos, meta, FS_SIZE, c, nh)
                meta[COST] -= weight[c]
        elif s == 1:
            sat_cnt[c] = 2
            _score_bump(score, gv_arr, gv_pos, meta, crit[c], dyn_w[c])
        else:
            sat_cnt[c] = s + 1


@njit(**_JIT)
def bump_weights(
    hard_inc, soft_inc, cap, lit_flat, cl_start, dyn_w,
    score, gv_arr, gv_pos, fh_arr, fs_arr, meta,
):
    # falsified clauses have sat_cnt 0, so every member var gains make-score
    if meta[FH_SIZE] > 0:
        for i in range(meta[FH_SIZE]):
            c = fh_arr[i]
            dyn_w[c] += hard_inc
            for j in range(cl_start[c], cl_start[c + 1]):
                _score_bump(score, gv_arr, gv_pos, meta, abs(lit_flat[j]), hard_inc)
    else:
        for i in range(meta[FS_SIZE]):
            c = fs_arr[i]
            if dyn_w[c] < cap[c]:
                dyn_w[c] += soft_inc
                for j in range(cl_start[c], cl_start[c + 1]):
                    _score_bump(score, gv_arr, gv_pos, meta, abs(lit_flat[j]), soft_inc)


# ---------------------------------------------------------------------------
# variable selection

@njit(**_JIT)
def bms_pick(rng_st, k, gv_arr, gv_size, score):
    if gv_size == 1:
        return np.int64(gv_arr[0])
    best_v = np.int64(gv_arr[rng_below(rng_st, gv_size)])
    best_s = score[best_v]
    for _ in range(k - 1):
        v = np.int64(gv_arr[rng_below(rng_st, gv_size)])
        if score[v] > best_s:
            best_s = score[v]
            best_v = v
    return best_v


@njit(**_JIT)
def best_var_in_clause(c, lit_flat, cl_start, score):
    best_v = np.int64(abs(lit_flat[cl_start[c]]))
    best_s = score[best_v]
    for j in range(cl_start[c] + 1, cl_start[c + 1]):
        u = np.int64(abs(lit_flat[j]))
        s = score[u]
        if s > best_s or (s == best_s and u < best_v):
            best_s = s
            best_v = u
    return best_v


# ---------------------------------------------------------------------------
# bandit arithmetic

@njit(**_JIT)
def ucb(V, t, arm, n_optima, lam):
    return V[arm] + lam * np.sqrt(np.log(n_optima) / (t[arm] + 1.0))


@njit(**_JIT)
def pick_hard_arm(c, cl_start, V, t, n_optima, lam):
    best_p = np.int64(cl_start[c])
    best_u = -np.inf
    for p in range(cl_start[c], cl_start[c + 1]):
        u = ucb(V, t, p, n_optima, lam)
        if u > best_u:
            best_u = u
            best_p = np.int64(p)
    return best_p


@njit(**_JIT)
def pick_soft_arm(rng_st, fs_arr, fs_size, nh, arm_num, V, t, n_optima, lam, scan_all):
    best_c = np.int64(-1)
    best_u = -np.inf
    if scan_all:
        for i in range(fs_size):
            c = np.int64(fs_arr[i])
            u = ucb(V, t, c - nh, n_optima, lam)
            if u > best_u:
                best_u = u
                best_c = c
    else:
        for _ in range(arm_num):
            c = np.int64(fs_arr[rng_below(rng_st, fs_size)])
            u = ucb(V, t, c - nh, n_optima, lam)
            if u > best_u:
                best_u = u
                best_c = c
    return best_c


@njit(**_JIT)
def record_pull(t, hist, hmeta, arm):
    t[arm] += 1
    d = hist.shape[0]
    hist[hmeta[0]] = arm
    hmeta[0] = (hmeta[0] + 1) % d
    if hmeta[1] < d:
        hmeta[1] += 1


@njit(**_JIT)
def apply_delayed(V, hist, hmeta, r, gamma):
    # newest pull gets r, each step back one factor of gamma more discount
    d = hist.shape[0]
    g = 1.0
    for j in range(hmeta[1]):
        V[hist[(hmeta[0] - 1 - j + d) % d]] += g * r
        g *= gamma


@njit(**_JIT)
def run_chunk(
    budget,
    # compiled instance
    lit_flat, cl_start, nh, weight, occ_flat, occ_start, cap,
    # search state
    assign, dyn_w, sat_cnt, crit, score, gv_arr, gv_pos,
    fh_arr, fh_pos, fs_arr, fs_pos, meta,
    # bandits
    Vh, th, hist_h, hmeta_h, Vs, ts, hist_s, hmeta_s,
    # run scalars, rng, best assignment snapshot
    run_meta, rng_st, best_assign,
    # parameters
    k, arm_num, lam, gamma, hard_inc, soft_inc,
    mixed_training, scan_all, reward_plus1,
):
    steps = 0
    while True:
        if meta[FH_SIZE] == 0:
            cost = meta[COST]
            if run_meta[RM_BEST_FEAS] == 0 or cost < run_meta[RM_BEST_COST]:
                run_meta[RM_BEST_COST] = cost
                run_meta[RM_BEST_FEAS] = 1
                best_assign[:] = assign[:]
                if cost == 0:
                    return CH_OPTIMUM, steps
                return CH_IMPROVED, steps
        if steps >= budget:
            return CH_BUDGET, steps

        if meta[GV_SIZE] > 0:
            v = bms_pick(rng_st, k, gv_arr, meta[GV_SIZE], score)
        else:
            bump_weights(
                hard_inc, soft_inc, cap, lit_flat, cl_start, dyn_w,
                score, gv_arr, gv_pos, fh_arr, fs_arr, meta,
            )
            if meta[FH_SIZE] > 0:
                H = meta[FH_SIZE]
                c = np.int64(fh_arr[rng_below(rng_st, H)])
                if run_meta[RM_BEST_FEAS] == 0 or mixed_training == 1:
                    hp = run_meta[RM_H_PREV]
                    if hp >= 0:
                        if reward_plus1 == 1:
                            r = (hp - H) / (hp + 1.0)
                        else:
                            r = (hp - H) / np.float64(hp)
                        apply_delayed(Vh, hist_h, hmeta_h, r, gamma)
                    run_meta[RM_NH] += 1
                    run_meta[RM_H_PREV] = H
                    arm = pick_hard_arm(c, cl_start, Vh, th, run_meta[RM_NH], lam)
                    record_pull(th, hist_h, hmeta_h, arm)
                    v = np.int64(abs(lit_flat[arm]))
                else:
                    v = best_var_in_clause(c, lit_flat, cl_start, score)
            else:
                cost = meta[COST]
                if hmeta_s[1] > 0:
                    r = (run_meta[RM_COST_PREV] - cost) / (
                        run_meta[RM_COST_PREV] - run_meta[RM_BEST_COST] + 1.0
                    )
                    apply_delayed(Vs, hist_s, hmeta_s, r, gamma)
                run_meta[RM_NS] += 1
                run_meta[RM_COST_PREV] = cost
                c = pick_soft_arm(
                    rng_st, fs_arr, meta[FS_SIZE], nh, arm_num,
                    Vs, ts, run_meta[RM_NS], lam, scan_all,
                )
                record_pull(ts, hist_s, hmeta_s, c - nh)
                v = best_var_in_clause(c, lit_flat, cl_start, score)

        flip(
            v, assign, lit_flat, cl_start, nh, weight, dyn_w, sat_cnt, crit,
            occ_flat, occ_start, score, gv_arr, gv_pos, fh_arr, fh_pos,
            fs_arr, fs_pos, meta,
        )
        steps += 1
        run_meta[RM_STEPS] += 1


@njit(**_JIT)
def apply_flip_sequence(
    vars_seq, assign, lit_flat, cl_start, nh, weight, dyn_w, sat_cnt, crit,
    occ_flat, occ_start, score, gv_arr, gv_pos, fh_arr, fh_pos,
    fs_arr, fs_pos, meta,
):
    # test driver: replay a flip sequence through the incremental engine
    for i in range(vars_seq.shape[0]):
        flip(
            vars_seq[i], assign, lit_flat, cl_start, nh, weight, dyn_w,
            sat_cnt, crit, occ_flat, occ_start, score, gv_arr, gv_pos,
            fh_arr, fh_pos, fs_arr, fs_pos, meta,
        )
