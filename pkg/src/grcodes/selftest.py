"""Named end-to-end checks reproducing every worked example in scope.

Each check returns a CheckResult; the CLI ``selftest`` subcommand and the
acceptance test module both run this registry, so there is exactly one
definition of what the package promises.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import adversarial as adv
from . import bounds, degreeopt, graphrepair, graphs
from .codes import GpmCode, PmCode, derive_ip_matrices
from .gabidulin import GabidulinCode
from .gf import binary_field, tower_field
from .stacking import StackedCode, TauBoundStackedCode, build_stack

DEFAULT_SEED = 20250810


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    limit_seconds: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lim = f"/{self.limit_seconds:.0f}s" if self.limit_seconds else ""
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.2f}s{lim})"


def _check(name, limit=None):
    def wrap(fn):
        def run(seed=DEFAULT_SEED) -> CheckResult:
            t0 = time.time()
            try:
                ok, detail = fn(seed)
            except Exception as exc:  # surface, never crash the suite
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            dt = time.time() - t0
            if ok and limit is not None and dt > limit:
                ok, detail = False, f"{detail}; runtime {dt:.2f}s exceeds {limit}s"
            return CheckResult(name, ok, detail, dt, limit)

        run.check_name = name
        return run

    return wrap


@_check("fig3-pm-repair", limit=1.0)
def check_fig3(seed):
    g = graphs.fig3_graph()
    code = PmCode(7, 4)
    helpers = list(range(1, 7))
    tree = graphrepair.RepairTree(g, 0, helpers)
    af = graphrepair.lambda_af_uniform(tree, 3, 6, 4).total
    ip = graphrepair.lambda_ip_uniform(tree, 3, 6, 4).total
    if (af, ip) != (9, 8):
        return False, f"expected AF 9 / IP 8, got {af} / {ip}"
    rng = np.random.default_rng(seed)
    for i in range(100):
        file = code.field.random_elements(rng, (code.message_dim,))
        cw = code.encode(file)
        for scheme, want in (("af-u", 9), ("ip-u", 8)):
            _, meas, form = graphrepair.simulate_repair(g, code, 0, helpers, scheme, codeword=cw)
            if meas.total != want or meas.per_edge != form.per_edge:
                return False, f"file {i} scheme {scheme}: measured {meas.total}"
    return True, "AF 9, IP 8; 100 files repaired exactly under both schemes"


@_check("fig4-gpm-repair", limit=5.0)
def check_fig4(seed):
    g = graphs.fig4_graph()
    code = GpmCode(7, 5, 3)
    helpers = list(range(1, 7))
    tree = graphrepair.RepairTree(g, 0, helpers)
    af = graphrepair.lambda_af_uniform(tree, 6, 6, 5).total
    ip = graphrepair.lambda_ip_uniform(tree, 6, 6, 5).total
    if (af, ip) != (30, 24):
        return False, f"expected AF 30 / IP 24, got {af} / {ip}"
    rng = np.random.default_rng(seed)
    for i in range(100):
        file = code.field.random_elements(rng, (code.message_dim,))
        cw = code.encode(file)
        _, meas, form = graphrepair.simulate_repair(g, code, 0, helpers, "ip-u", codeword=cw)
        if meas.total != 24 or meas.per_edge != form.per_edge:
            return False, f"file {i}: measured {meas.total}"
    return True, "AF 30, IP 24; node 0 repaired exactly on 100 files"


@_check("fig5-adversarial", limit=30.0)
def check_fig5(seed):
    g = graphs.fig5_graph()
    base = adv.af_with_extra_helpers_baseline(g, 0, 7, 1, 5).total
    tree9 = graphrepair.RepairTree(g, 0, range(1, 10))
    ip = graphrepair.lambda_ip_uniform(tree9, 25, 9, 5).total
    if (base, ip) != (95, 85):
        return False, f"expected 95 vs 85, got {base} vs {ip}"
    code = adv.fig5_realizable_concat()
    helpers = [1, 2, 3, 4, 5, 6, 8, 9]
    rng = np.random.default_rng(seed)
    for trial in range(100):
        file = code.field.random_elements(rng, (code.file_size,))
        cw = code.encode(file)
        bad = int(helpers[rng.integers(0, len(helpers))])
        res = adv.adversarial_repair(
            code, cw, 0, g, helpers, adv.AdversaryModel(1, (bad,)), rng=rng
        )
        if not res.success:
            return False, f"trial {trial}: repair failed (corrupted {bad})"
        if res.error_rank > res.rank_bound:
            return False, f"trial {trial}: error rank {res.error_rank} > {res.rank_bound}"
    return True, "accounting 95 vs 85; 100/100 adversarial repairs, rank within bound"


@_check("stacking-optimality")
def check_stacking(seed):
    rng = np.random.default_rng(seed)
    for i in range(200):
        k = int(rng.integers(1, 6))
        dk1 = int(rng.integers(1, 9))
        d = k + dk1 - 1
        n = d + 1 + int(rng.integers(0, 3))
        B = sorted(int(b) for b in rng.integers(1, 7, size=d))
        spec = build_stack(n, k, d, B, realize=False)
        if spec.l != bounds.delta_r(B, dk1):
            return False, f"instance {i}: l={spec.l} != Delta_{dk1}({B})"
    small = [(6, 3, 4, (1, 2, 2, 2)), (7, 2, 3, (1, 2, 2))]
    for n, k, d, B in small:
        st = StackedCode(build_stack(n, k, d, list(B)))
        file = st.field.random_elements(rng, (st.message_dim,))
        cw = st.encode(file)
        for f in range(n):
            others = [v for v in range(n) if v != f]
            for D in combinations(others, d):
                taus = [st.default_tau(D)]
                rev = {h: d + 1 - j for h, j in taus[0].items()}
                taus.append(rev)
                for tau in taus:
                    got, downloads = st.repair(cw, f, list(D), tau)
                    if not np.array_equal(got, cw[f]):
                        return False, f"repair failed at f={f}, D={D}"
                    if sorted(downloads.values()) != list(st.spec.B):
                        return False, f"download profile mismatch at f={f}, D={D}"
    return True, "200 node-size identities exact; exhaustive small repairs with two taus"


@_check("lp-structural-oracle")
def check_lp(seed):
    rng = np.random.default_rng(seed)
    for i in range(20):
        n = int(rng.integers(3, 6))
        k = int(rng.integers(1, n - 1))
        l = int(rng.integers(1, 7))
        costs = tuple(int(c) for c in rng.integers(1, 8, size=n - 1))
        inst = degreeopt.LpInstance(n, k, l, costs)
        plan = degreeopt.solve_lp_structural(inst)
        oracle = degreeopt.lp_bruteforce_oracle(inst, 12)
        if plan.objective != oracle:
            return False, f"instance {i} ({inst}): structural {plan.objective} != oracle {oracle}"
    return True, "20 random instances: structural optimum == grid oracle exactly"


@_check("petersen-threshold")
def check_petersen(seed):
    g = graphs.petersen_graph()
    for k in (3, 4, 5):
        for f in range(10):
            curve = degreeopt.af_cost_curve(g, f, k)
            vals = [curve[d] for d in range(k, 10)]
            if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
                return False, f"k={k}, f={f}: curve not nonincreasing: {vals}"
            d_star, _, _ = degreeopt.optimal_degree_af(g, f, k)
            if d_star != 9:
                return False, f"k={k}, f={f}: d*={d_star}"
    curve2 = degreeopt.af_cost_curve(g, 0, 2)
    mono2 = all(curve2[d] >= curve2[d + 1] for d in range(2, 9))
    thr, kmin = degreeopt.threshold_k(3, 2)
    if (thr, kmin) != (Fraction(5, 2), 3):
        return False, f"threshold {thr}, k_min {kmin}"
    return True, f"d*=9 for k in 3..5 with nonincreasing curves; k=2 monotone={mono2} (reported only)"


@_check("ip-saturation")
def check_saturation(seed):
    rng = np.random.default_rng(seed)
    pm = PmCode(6, 3)
    D = [1, 2, 3, 4]
    file = pm.field.random_elements(rng, (pm.message_dim,))
    cw = pm.encode(file)
    syms = {h: pm.repair_map(h, 0, cw[h]) for h in D}
    dk1 = pm.d - pm.k + 1
    for A in combinations(D, dk1):
        share = pm.ip_combine(syms, 0, D, subset=list(A))
        rest = pm.ip_combine(syms, 0, D, subset=[h for h in D if h not in A])
        if share.shape[0] != pm.l or not np.array_equal(pm.field.add(share, rest), cw[0]):
            return False, f"pm subset {A} share incomplete"
    for A in combinations(D, dk1 - 1):
        af_count = sum(pm.beta(h, 0) for h in A)
        if not af_count < pm.l:
            return False, f"pm subset {A}: AF count {af_count} not < l={pm.l}"
    gpm = GpmCode(7, 5, 3)
    D = list(range(1, 7))
    file = gpm.field.random_elements(rng, (gpm.message_dim,))
    cw = gpm.encode(file)
    syms = {h: gpm.repair_map(h, 0, cw[h]) for h in D}
    dk1 = gpm.d - gpm.k + 1
    for A in combinations(D, dk1):
        share = gpm.ip_combine(syms, 0, D, subset=list(A))
        rest = gpm.ip_combine(syms, 0, D, subset=[h for h in D if h not in A])
        if share.shape[0] != gpm.l or not np.array_equal(gpm.field.add(share, rest), cw[0]):
            return False, f"gpm subset {A} share incomplete"
        if sum(gpm.beta(h, 0) for h in A) < gpm.l:
            return False, f"gpm subset {A}: AF already below l, saturation vacuous"
    for A in combinations(D, dk1 - 1):
        if not sum(gpm.beta(h, 0) for h in A) < gpm.l:
            return False, f"gpm subset {A}: AF count not < l"
    st = StackedCode(build_stack(6, 3, 4, [1, 2, 2, 2]))
    D = [1, 2, 4, 5]
    tau = st.default_tau(D)
    file = st.field.random_elements(rng, (st.message_dim,))
    cw = st.encode(file)
    dk1 = st.d - st.k + 1
    for A in combinations(D, dk1):
        share = st.ip_share(cw, 0, list(A), D, tau)
        full = st.ip_repair(cw, 0, list(A), D, tau)
        if share.shape[0] != st.l or not np.array_equal(full, cw[0]):
            return False, f"stack subset {A} failed"
    small_counts = [
        sum(st.download_count(h, tau) for h in A) for A in combinations(D, dk1 - 1)
    ]
    if bounds.delta_r(st.spec.B, dk1 - 1) >= st.l or min(small_counts) >= st.l:
        return False, "no (d-k)-subset transmits below l; saturation check is vacuous"
    return True, "every (d-k+1)-subset compresses to exactly l and completes repair"


@_check("gabidulin-tiny-oracle", limit=10.0)
def check_gab_tiny(seed):
    T = tower_field(binary_field(1), 3)
    gab = GabidulinCode(T, 3, 1)
    cases = 0
    for msg_int in range(8):
        msg = T.from_int(msg_int).reshape(1, 3)
        cw = gab.encode(msg)
        for e_int in range(512):
            e = np.stack([T.from_int((e_int >> (3 * i)) & 7) for i in range(3)])
            if T.rank_q(e) > 1:
                continue
            cases += 1
            y = T.add(cw, e)
            dec = gab.decode(y)
            if not np.array_equal(dec, msg):
                return False, f"decode missed msg {msg_int}, error {e_int}"
            bf, dist, unique = gab.brute_force_decode(y)
            if not unique or not np.array_equal(bf, msg):
                return False, f"nearest-codeword mismatch at msg {msg_int}, error {e_int}"
    return True, f"{cases} (codeword, rank<=1 error) cases: decoder == unique nearest codeword"


@_check("ip-universality")
def check_universality(seed):
    rng = np.random.default_rng(seed)
    pm = PmCode(7, 4)
    D = tuple(range(1, 7))
    ips = derive_ip_matrices(pm, 0, D)
    lift = pm.lagrange_lift(0, list(D))
    for h in D:
        if not np.array_equal(ips.matrices[h].a[:, 0], lift[h]):
            return False, f"pm helper {h}: derived U != closed-form column"
    for i in range(100):
        file = pm.field.random_elements(rng, (pm.message_dim,))
        cw = pm.encode(file)
        syms = {h: pm.repair_map(h, 0, cw[h]) for h in D}
        if not np.array_equal(ips.combine(syms), cw[0]):
            return False, f"pm file {i}: sum U S != node"
    gpm = GpmCode(7, 5, 3)
    ips_g = derive_ip_matrices(gpm, 0, D)
    for i in range(100):
        file = gpm.field.random_elements(rng, (gpm.message_dim,))
        cw = gpm.encode(file)
        syms = {h: gpm.repair_map(h, 0, cw[h]) for h in D}
        if not np.array_equal(ips_g.combine(syms), cw[0]):
            return False, f"gpm file {i}: sum U S != node"
        if not np.array_equal(gpm.ip_combine(syms, 0, D), cw[0]):
            return False, f"gpm file {i}: tensor-coefficient route != node"
    st = StackedCode(build_stack(6, 3, 4, [1, 2, 2, 2]))
    Ds = (1, 2, 4, 5)
    view = TauBoundStackedCode(st, 0, st.default_tau(Ds))
    ips_s = derive_ip_matrices(view, 0, Ds)
    for i in range(100):
        file = st.field.random_elements(rng, (st.message_dim,))
        cw = st.encode(file)
        syms = {h: view.repair_map(h, 0, cw[h]) for h in Ds}
        if not np.array_equal(ips_s.combine(syms), cw[0]):
            return False, f"stack file {i}: sum U S != node"
    return True, "derived U exact on PM (== closed form), GPM and stacked, 100 files each"


@_check("random-graph-trend", limit=120.0)
def check_random_graph(seed):
    res = degreeopt.mc_random_graph_experiment([50, 100, 200], 200, seed)
    freqs = [res[n]["frequency"] for n in (50, 100, 200)]
    if not (freqs[0] <= freqs[1] <= freqs[2]):
        return False, f"frequencies not nondecreasing: {freqs}"
    if freqs[2] < 0.9:
        return False, f"frequency at n=200 is {freqs[2]} < 0.9"
    return True, f"frequencies {freqs} nondecreasing, final >= 0.9"


@_check("nonuniform-savings")
def check_nonuniform(seed):
    g = graphs.regular_tree_ball(3, 3)
    tree = graphrepair.RepairTree(g, 0, range(1, g.n))
    k, d, l = 4, 21, 36
    af_u = graphrepair.lambda_af_uniform(tree, l, d, k).total
    sizes = tree.layer_sizes
    a = tree.t
    dk1 = d - k + 1
    for delta_last in (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)):
        plan = graphrepair.NonuniformPlan.tilt_last_layer(tree, l, d, k, delta_last)
        af_nu = graphrepair.lambda_af_nonuniform(tree, plan).total
        # independent closed form from the layer sizes
        closed = (
            Fraction(sizes[a - 1]) * delta_last / (dk1 - sizes[a - 1])
        ) * (sum((a - i) * sizes[i - 1] for i in range(1, a)) - a * (k - 1))
        if af_u - af_nu != closed or not af_nu < af_u:
            return False, f"delta={delta_last}: gap {af_u - af_nu} != closed {closed}"
    plan0 = graphrepair.NonuniformPlan.drop_last_layer(tree, l, d, k)
    reduced_d = d - sizes[-1]
    beta_red = Fraction(l, reduced_d - k + 1)
    want = beta_red * sum(i * sizes[i - 1] for i in range(1, a))
    got = graphrepair.lambda_af_nonuniform(tree, plan0).total
    if got != want:
        return False, f"dropped-layer total {got} != reduced-degree uniform {want}"
    return True, "tilted plans: exact closed-form gap; zero-tail plan == reduced-degree uniform"


ALL_CHECKS = [
    check_fig3,
    check_fig4,
    check_fig5,
    check_stacking,
    check_lp,
    check_petersen,
    check_saturation,
    check_gab_tiny,
    check_universality,
    check_random_graph,
    check_nonuniform,
]


def run_all(seed: int = DEFAULT_SEED, names=None):
    results = []
    for check in ALL_CHECKS:
        if names and check.check_name not in names:
            continue
        results.append(check(seed))
    return results
