"""Acceptance suite: one group of tests per criterion.

Each test carries ``@pytest.mark.criterion(n, title)``; conftest prints one
PASS/FAIL line per criterion at the end of the run, with any recorded details.
"""

import itertools
import os
import random
import time
import warnings
from fractions import Fraction

import pytest

from stabbench.circuit import from_ops, layered_view, parse_circuit
from stabbench.codes import load_suite, make_code, validate_code
from stabbench.codes.model import brute_force_distance
from stabbench.faults import FaultLocation, FaultPauli, enumerate_fault_locations, ft_score, iter_results, propagate_fault
from stabbench.gates import GateKind
from stabbench.harness import HarnessConfig, build_instances, recompute_scores, run_benchmark
from stabbench.harness.records import load_record, save_record
from stabbench.pauli import PauliString, multiply, parse_pauli
from stabbench.scoring import InstanceResult, Task, aggregate, b2_improvement
from stabbench.tableau import GenStatus, Membership, Tableau, check_stabilizers, run, simulate

from corpus import label, ops_to_circuit, random_gadget_circuit, random_hermitian_pauli, random_unitary_ops
from oracles import run_dense
import synthetic

DECLARED_K = 16_340


@pytest.fixture(scope="module")
def suite():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return load_suite()


def detail(request, text):
    request.node.user_properties.append(("detail", text))


# -- 1. oracle equivalence ------------------------------------------------------------
def _dense_status(sv, p: PauliString) -> GenStatus:
    e = sv.expectation(label(p), p.phase)
    assert abs(e.imag) < 1e-9
    if abs(e.real - 1) < 1e-9:
        return GenStatus.PASS
    if abs(e.real + 1) < 1e-9:
        return GenStatus.SIGN_FAIL
    assert abs(e.real) < 1e-9
    return GenStatus.FAIL


def _query_sets(rng, t: Tableau, n: int):
    """Commuting generator sets: scrambled true stabilizers with stray signs,
    another state's stabilizers, and lone random Paulis."""
    stabs = t.stabilizers()
    mixed = list(stabs)
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            mixed[i] = multiply(mixed[i], mixed[j])
    mixed = [g.negated() if rng.random() < 0.25 else g for g in mixed]
    yield rng.sample(mixed, rng.randint(1, n))
    other = simulate(ops_to_circuit(random_unitary_ops(rng, n, 20) + [("I", (n - 1,))]), n).stabilizers()
    yield rng.sample(other, rng.randint(1, n))
    for _ in range(3):
        yield [random_hermitian_pauli(rng, n)]


@pytest.mark.criterion(1, "check_stabilizers agrees with a dense state-vector oracle")
def test_c1_oracle_equivalence(request):
    rng = random.Random(20240611)
    start = time.perf_counter()
    circuits = queried = mismatches = 0
    for _ in range(240):
        n = rng.randint(1, 10)
        ops = random_unitary_ops(rng, n, rng.randint(0, 40)) + [("I", (n - 1,))]
        c = ops_to_circuit(ops)
        sv = run_dense(ops, n)
        t = simulate(c, n)
        for gens in _query_sets(rng, t, n):
            rep = check_stabilizers(c, gens)
            for g, status in zip(gens, rep.statuses):
                queried += 1
                mismatches += status is not _dense_status(sv, g)
        circuits += 1
    elapsed = time.perf_counter() - start
    detail(request, f"{circuits} circuits (n <= 10, <= 40 gates), {queried} queried Paulis, "
                    f"{mismatches} mismatches, {elapsed:.1f} s")
    assert circuits >= 200
    assert mismatches == 0
    assert elapsed < 60


# -- 2. fault propagation ground truth ---------------------------------------------------
@pytest.mark.criterion(2, "fault propagation: CNOT spread, flag gadget, exhaustive re-simulation")
def test_c2_x_before_cnot_spreads():
    r = propagate_fault(parse_circuit("CX 0 1"), FaultLocation(0, 0, FaultPauli.X), {0, 1})
    assert r.error == parse_pauli("XX")
    assert r.data_weight == 2


@pytest.mark.criterion(2, "fault propagation: CNOT spread, flag gadget, exhaustive re-simulation")
def test_c2_flag_gadget_outputs_one():
    # data 0,1; flag 2 watches the CX spreading qubit 0
    gadget = parse_circuit("CX 0 2\nCX 0 1\nCX 0 2\nM 2")
    mid = FaultLocation(0, 1, FaultPauli.X)
    r = propagate_fault(gadget, mid, {0, 1})
    assert r.flag_flips == [1]
    assert r.flagged
    # fault-free run measures 0, so the faulty one outputs 1
    clean = simulate(gadget)
    assert clean.measurements == [0]
    assert [a ^ b for a, b in zip(clean.measurements, r.flag_flips)] == [1]


def _resimulate(c, f, n):
    layers = layered_view(c)
    t = Tableau(n)
    for layer in layers[: f.layer]:
        run(t, layer)
    t.apply_pauli(PauliString.single(n, f.qubit, f.pauli.value))
    for layer in layers[f.layer :]:
        run(t, layer)
    return t


@pytest.mark.criterion(2, "fault propagation: CNOT spread, flag gadget, exhaustive re-simulation")
def test_c2_exhaustive_resimulation(request):
    rng = random.Random(8)
    locations = mismatches = 0
    for _ in range(20):
        n_data = rng.randint(1, 6)
        n_flags = rng.randint(0, 8 - n_data)
        c = random_gadget_circuit(rng, n_data, n_flags, rng.randint(5, 30))
        n = c.num_qubits
        assert n <= 8
        clean = simulate(c, n)
        program = [(op.instruction, op.qubits) for op in c.ops() if op.kind is GateKind.M]
        layer_order = [
            program.index((op.instruction, op.qubits))
            for layer in layered_view(c)
            for op in layer
            if op.kind is GateKind.M
        ]
        assert len(enumerate_fault_locations(c, n)) == 3 * n * (len(layered_view(c)) + 1)
        for f, r in iter_results(c, range(n_data), n):
            faulty = _resimulate(c, f, n)
            expect = clean.copy()
            expect.apply_pauli(r.error)
            same_state = all(faulty.stabilizes(s) is Membership.PLUS_ONE for s in expect.stabilizers())
            got = dict(zip(layer_order, faulty.measurements))
            flips = [got[i] ^ clean.measurements[i] for i in range(len(got))]
            mismatches += (not same_state) or flips != r.flag_flips
            locations += 1
    detail(request, f"20 circuits, {locations} fault locations re-simulated, {mismatches} mismatches")
    assert mismatches == 0


# -- 3. code suite fidelity --------------------------------------------------------------
@pytest.mark.criterion(3, "code suite: validation, distances, stabilizer ranges, K")
def test_c3_base_codes_validate(suite):
    base = suite.base_codes()
    assert len(base) == 24
    for code in base:
        rep = validate_code(code)
        assert rep.ok, (code.id, rep.failures)


@pytest.mark.criterion(3, "code suite: validation, distances, stabilizer ranges, K")
def test_c3_brute_force_distances(suite, request):
    by_id = suite.by_id()
    for cid, d in (("detector4", 2), ("perfect5", 3), ("steane", 3), ("shor9", 3)):
        assert by_id[cid].distance == d
    checked = []
    for code in suite.base_codes():
        if code.n <= 16:
            found = brute_force_distance(code, code.n)
            assert found == code.distance, (code.id, found, code.distance)
            checked.append(f"{code.id}={found}")
    detail(request, f"{len(checked)} base codes with n <= 16 confirmed: {', '.join(checked)}")
    assert len(checked) == 14


@pytest.mark.criterion(3, "code suite: validation, distances, stabilizer ranges, K")
def test_c3_ranges_and_total(suite, request):
    from stabbench.codes import suite_stats

    st = suite_stats(suite)
    base = [c.k_i for c in suite.base_codes()]
    every = [c.k_i for c in suite.codes]
    assert 2 <= min(base) and max(base) <= 90
    assert 2 <= min(every) and max(every) <= 194
    assert st["range_checks"]["base"]["within"] and st["range_checks"]["all"]["within"]
    assert st["declared_total_generators"] == DECLARED_K
    assert st["total_generators"] == sum(every)
    assert st["k_deviation"] == st["total_generators"] - DECLARED_K
    detail(request, f"base k in [{min(base)}, {max(base)}], all k in [{min(every)}, {max(every)}]; "
                    f"K = {st['total_generators']} vs declared {DECLARED_K} (deviation {st['k_deviation']:+d}, reported)")


# -- 4. scoring algebra ------------------------------------------------------------------
def _random_results(rng, codes, task):
    out = []
    for cid in codes:
        ok = rng.random() < 0.5
        q = Fraction(rng.randint(0, 12), 12) if ok else Fraction(0)
        out.append(InstanceResult(cid, task, ok, q))
    return out


@pytest.mark.criterion(4, "scoring algebra: bounds, permutation, additivity, B2 order, empty T")
def test_c4_random_result_sets(request):
    rng = random.Random(44)
    sets = 0
    for _ in range(10_000):
        m = rng.randint(1, 12)
        ks = {f"c{i}": 2 * rng.randint(1, 97) for i in range(m)}
        task = rng.choice(list(Task))
        res = _random_results(rng, list(ks), task)
        rep = aggregate(res, ks)
        ts = rep.tasks[task]
        assert ts.s_qual <= ts.s_cap <= rep.k_max == sum(ks.values())
        assert ts.s_cap == sum(ks[r.code_id] for r in res if r.success)
        assert ts.s_qual == sum((ks[r.code_id] * r.quality for r in res if r.success), Fraction(0))
        shuffled = res[:]
        rng.shuffle(shuffled)
        again = aggregate(shuffled, ks).tasks[task]
        assert (again.s_cap, again.s_qual) == (ts.s_cap, ts.s_qual)
        cut = rng.randint(0, m)
        left = aggregate(res[:cut], ks).tasks.get(task)
        right = aggregate(res[cut:], ks).tasks.get(task)
        parts = [p for p in (left, right) if p is not None]
        assert sum(p.s_cap for p in parts) == ts.s_cap
        assert sum((p.s_qual for p in parts), Fraction(0)) == ts.s_qual
        sets += 1
    detail(request, f"{sets} random result sets")


@pytest.mark.criterion(4, "scoring algebra: bounds, permutation, additivity, B2 order, empty T")
def test_c4_lexicographic_grid(request):
    grid = list(itertools.product(range(21), repeat=2))
    pairs = 0
    for cand in grid:
        for base in grid:
            expected = cand[0] < base[0] or (cand[0] == base[0] and cand[1] < base[1])
            assert b2_improvement(cand, base) is expected
            pairs += 1
        assert not b2_improvement(cand, cand)
    detail(request, f"{pairs} cost-tuple pairs up to (20, 20); equality never improves")


@pytest.mark.criterion(4, "scoring algebra: bounds, permutation, additivity, B2 order, empty T")
def test_c4_empty_dangerous_set_scores_one():
    # only single-qubit gates: no fault can exceed weight t = 1
    c = parse_circuit("H 0\nH 1\nH 2\nS 1")
    code = make_code("x", "named", [parse_pauli("X__"), parse_pauli("_Y_"), parse_pauli("__X")], 3)
    rep = ft_score(c, code)
    assert rep.dangerous_count == 0 and rep.ft_score == 1


# -- 5. end-to-end reference run ---------------------------------------------------------
@pytest.mark.criterion(5, "reference agent solves every B1 instance; null agent scores all-Z codes only")
def test_c5_reference_full_suite(suite, tmp_path, request):
    start = time.perf_counter()
    cfg = HarnessConfig(Task.B1, workers=8)
    rec = run_benchmark(build_instances(suite.codes, Task.B1), cfg, tmp_path / "b1.json")
    elapsed = time.perf_counter() - start
    ts = recompute_scores(load_record(tmp_path / "b1.json"))[Task.B1]
    base_ids = {c.id for c in suite.base_codes()}
    per = ts.per_code
    base_ok = sum(per[c]["success"] for c in base_ids)
    prod_ok = sum(v["success"] for cid, v in per.items() if cid not in base_ids)
    detail(request, f"reference: base {base_ok}/24, products {prod_ok}/{len(suite.products())}, "
                    f"S_cap = {ts.s_cap} = K = {suite.total_generators}; 8 workers on "
                    f"{os.cpu_count()} CPU(s), {elapsed:.1f} s")
    assert base_ok == 24 and prod_ok == len(suite.products())
    assert ts.s_cap == suite.total_generators
    assert rec["status"] == "complete"
    assert elapsed < 600


@pytest.mark.criterion(5, "reference agent solves every B1 instance; null agent scores all-Z codes only")
def test_c5_null_agent(suite, request):
    zcode = make_code("rep3", "named", [parse_pauli("ZZ_"), parse_pauli("_ZZ")], 1)
    codes = list(suite.codes) + [zcode]
    rec = run_benchmark(build_instances(codes, Task.B1), HarnessConfig(Task.B1, agent="null"))
    ts = recompute_scores(rec)[Task.B1]
    expected = sum(c.k_i for c in codes if c.all_z)
    shipped_all_z = sum(c.all_z for c in suite.codes)
    detail(request, f"null agent: S_cap = {ts.s_cap}, sum of k over all-Z codes = {expected} "
                    f"({shipped_all_z} all-Z codes in the shipped suite, plus one added)")
    assert ts.s_cap == expected


# -- 6. FT enumeration performance -------------------------------------------------------
def _big_circuit():
    rng = random.Random(1)
    n = 200
    ops = []
    for _ in range(60):
        qs = list(range(n))
        rng.shuffle(qs)
        for i in range(0, n, 2):
            a, b = qs[i], qs[i + 1]
            if rng.random() < 0.5:
                ops.append((GateKind.CX, (a, b)))
            else:
                ops.append((rng.choice([GateKind.H, GateKind.S]), (a,)))
                ops.append((GateKind.H, (b,)))
    c = from_ops(ops)
    code = make_code("random200", "named", simulate(c).stabilizers(), 3)
    return c, code


@pytest.fixture(scope="module")
def big():
    return _big_circuit()


@pytest.mark.criterion(6, "ft_score on 200 qubits x depth 60: < 60 s single-threaded, near-linear scaling")
def test_c6_single_thread_time(big, request):
    c, code = big
    assert len(layered_view(c)) == 60
    start = time.perf_counter()
    rep = ft_score(c, code)
    elapsed = time.perf_counter() - start
    detail(request, f"{rep.total_locations} locations scored single-threaded in {elapsed:.2f} s")
    assert rep.total_locations == 36_600
    assert elapsed < 60


@pytest.mark.criterion(6, "ft_score on 200 qubits x depth 60: < 60 s single-threaded, near-linear scaling")
def test_c6_worker_scaling(big, request):
    c, code = big

    def best_of(workers, reps=3):
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            rep = ft_score(c, code, workers=workers)
            times.append(time.perf_counter() - t0)
        return min(times), rep

    t1, r1 = best_of(1)
    rows = []
    efficiencies = []
    for w in (2, 4):
        tw, rw = best_of(w)
        assert (rw.dangerous_count, rw.flagged_dangerous) == (r1.dangerous_count, r1.flagged_dangerous)
        speedup = t1 / tw
        efficiencies.append(speedup / w)
        rows.append(f"{w} workers: {tw:.2f} s, speedup {speedup:.2f}x ({100 * speedup / w:.0f}% efficiency)")
    detail(request, f"1 worker: {t1:.2f} s; " + "; ".join(rows) + f"; machine has {os.cpu_count()} CPU(s)")
    # near-linear: at least 70% parallel efficiency at every worker count
    assert all(e >= 0.7 for e in efficiencies)


# -- 7. score recomputation from synthetic target rows -----------------------------------
def _roundtrip(rec, tmp_path, name):
    path = tmp_path / f"{name}.json"
    save_record(path, rec)
    return recompute_scores(load_record(path))


@pytest.mark.criterion(7, "run records recompute target score rows bit-exactly")
def test_c7_b1_rows(tmp_path, request):
    ks = synthetic.synthetic_ks()
    assert len(ks) == 192 and sum(ks) == DECLARED_K
    for j, (name, rate, s_cap) in enumerate(synthetic.B1_ROWS):
        run_ = synthetic.b1_run(ks, rate, s_cap, seed=j)
        ts = _roundtrip(synthetic.to_record(run_, name), tmp_path, f"b1_{j}")[Task.B1]
        assert ts.k_max == DECLARED_K
        assert ts.s_cap == run_.expected_s_cap == s_cap
        assert ts.s_qual == run_.expected_s_qual
        assert ts.successes == run_.expected_successes
        assert f"{100 * ts.successes / ts.attempted:.1f}" == rate
    detail(request, f"{len(synthetic.B1_ROWS)} B1 rows reproduced (e.g. 79.7% / 10,772 of 16,340)")


@pytest.mark.criterion(7, "run records recompute target score rows bit-exactly")
def test_c7_b2_row(tmp_path, request):
    ks = synthetic.synthetic_ks()
    name, rate, s_cap, s_qual, mean_g2q = synthetic.B2_ROW
    run_ = synthetic.b2_run(ks)
    rec = synthetic.to_record(run_, name)
    ts = _roundtrip(rec, tmp_path, "b2")[Task.B2]
    assert ts.s_cap == run_.expected_s_cap == s_cap
    assert ts.s_qual == run_.expected_s_qual == s_qual
    assert f"{100 * ts.successes / ts.attempted:.1f}" == rate
    assert ts.mean_g2q_reduction == run_.extra["mean_g2q"] == mean_g2q
    detail(request, f"B2 row: {rate}% success, S_cap {ts.s_cap}, S_qual {ts.s_qual}, "
                    f"mean G2Q reduction {float(ts.mean_g2q_reduction):.1%}")


@pytest.mark.criterion(7, "run records recompute target score rows bit-exactly")
def test_c7_b3_row(tmp_path, request):
    ks = synthetic.synthetic_ks()
    name, mean_ft, n_pos, s_cap, s_qual = synthetic.B3_ROW
    run_ = synthetic.b3_run(ks)
    ts = _roundtrip(synthetic.to_record(run_, name), tmp_path, "b3")[Task.B3]
    assert ts.s_cap == run_.expected_s_cap == s_cap
    assert ts.s_qual == run_.expected_s_qual == s_qual
    assert ts.ft_positive == n_pos
    assert ts.mean_ft_positive == mean_ft
    detail(request, f"B3 row: {ts.ft_positive} circuits with FT > 0 (mean {float(mean_ft):.3f}), "
                    f"S_cap {ts.s_cap}, S_qual {ts.s_qual}")


@pytest.mark.criterion(7, "run records recompute target score rows bit-exactly")
def test_c7_stored_flags_are_not_trusted(tmp_path):
    ks = synthetic.synthetic_ks()
    run_ = synthetic.b2_run(ks)
    rec = synthetic.to_record(run_, "tampered")
    for inst in rec["instances"]:
        inst["attempts"][0]["response"].update(success=True, quality="1/1")
    ts = _roundtrip(rec, tmp_path, "tampered")[Task.B2]
    assert ts.s_cap == run_.expected_s_cap and ts.s_qual == run_.expected_s_qual
