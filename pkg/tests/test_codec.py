import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srlnc.analysis import full_rank_value
from srlnc.codec import (
    CodedPacket,
    DecoderState,
    SimConfig,
    SourceGeneration,
    TrialStreams,
    _draw_vectors,
    decoder_insert,
    encode,
    encode_rows,
    recover_sources,
    run_trials,
    trial_rng,
)
from srlnc.errors import DimensionError, NotFullRankError
from srlnc.field import SparseDist, gf
from srlnc.linalg import FqMatrix, rank

F2 = gf(2)


def _gen(spec, n, L, seed=0):
    return SourceGeneration.random(spec, n, L, np.random.default_rng(seed))


def test_generation_shape_checked():
    with pytest.raises(DimensionError):
        SourceGeneration(2, 3, ((1, 0, 1),))


def test_encode_all_zero_at_p0_one():
    gen = _gen(gf(5), 3, 4)
    pkt = encode(gen, SparseDist(1, gf(5)), np.random.default_rng(0))
    assert pkt.coding_vector == (0, 0, 0) and pkt.payload == (0, 0, 0, 0)


def test_encode_single_source_dense_binary():
    gen = _gen(F2, 1, 8)
    pkt = encode(gen, SparseDist(0, F2), np.random.default_rng(0))
    assert pkt.coding_vector == (1,) and pkt.payload == gen.packets[0]


@pytest.mark.parametrize("q", [2, 3, 16, 256])
def test_payload_is_combination(q):
    spec = gf(q)
    gen = _gen(spec, 4, 6, seed=q)
    rng = np.random.default_rng(q)
    for _ in range(20):
        pkt = encode(gen, SparseDist(Fraction(1, 3), spec), rng)
        want = [0] * gen.L
        for c, src in zip(pkt.coding_vector, gen.packets):
            want = [spec.add(a, spec.mul(c, b)) for a, b in zip(want, src)]
        assert list(pkt.payload) == want


def test_insert_zero_vector():
    state = DecoderState(F2, 3, 2)
    state, innovative = decoder_insert(state, CodedPacket((0, 0, 0), (0, 0)))
    assert not innovative and state.rank == 0 and state.received_count == 1


def test_insert_unit_vectors_recovers():
    spec = gf(7)
    gen = _gen(spec, 3, 5)
    state = DecoderState(spec, 3, 5)
    for pkt in encode_rows(gen, np.eye(3, dtype=np.int64)[::-1], spec):
        assert state.insert(pkt)
    assert state.rank == 3
    assert recover_sources(state) == gen.packets


def test_insert_dimension_mismatch():
    state = DecoderState(F2, 3, 2)
    with pytest.raises(DimensionError):
        state.insert(CodedPacket((1, 0), (0, 0)))
    with pytest.raises(DimensionError):
        state.insert(CodedPacket((1, 0, 0), (0,)))


def test_recover_needs_full_rank():
    spec = gf(3)
    gen = _gen(spec, 3, 2)
    state = DecoderState(spec, 3, 2)
    for pkt in encode_rows(gen, np.array([[1, 0, 0], [0, 1, 0]]), spec):
        state.insert(pkt)
    with pytest.raises(NotFullRankError):
        recover_sources(state)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 256]), st.integers(1, 5), st.integers(0, 6),
       st.sampled_from([0, Fraction(1, 4), Fraction(1, 2), Fraction(9, 10)]), st.integers(0, 2**32))
def test_innovative_flags_match_batch_rank(q, n, L, p0, seed):
    spec = gf(q)
    rng = np.random.default_rng(seed)
    gen = SourceGeneration.random(spec, n, L, rng)
    state = DecoderState(spec, n, L)
    coeffs = SparseDist(p0, spec).sample_array(rng, (2 * n + 2, n))
    seen = []
    for pkt in encode_rows(gen, coeffs, spec):
        before = rank(FqMatrix.from_rows(spec, seen, cols=n)) if seen else 0
        seen.append(pkt.coding_vector)
        after = rank(FqMatrix.from_rows(spec, seen, cols=n))
        assert state.insert(pkt) == (after > before)
        assert state.rank == after == len(state.reduced_rows) == len(state.pivot_cols)
        assert state.rank <= min(state.received_count, n)
    if state.rank == n:
        assert recover_sources(state) == gen.packets


def test_reduced_rows_are_rref():
    spec = gf(5)
    rng = np.random.default_rng(4)
    gen = _gen(spec, 4, 3)
    state = DecoderState(spec, 4, 3)
    for pkt in encode_rows(gen, rng.integers(0, 5, size=(3, 4)), spec):
        state.insert(pkt)
    for k, (pc, row) in enumerate(zip(state.pivot_cols, state.reduced_rows)):
        assert row[pc] == 1 and all(r[pc] == 0 for j, r in enumerate(state.reduced_rows) if j != k)


def test_trial_rng_substreams():
    a = trial_rng(7, 3).integers(0, 1 << 30, size=5)
    b = trial_rng(7, 3).integers(0, 1 << 30, size=5)
    c = trial_rng(7, 4).integers(0, 1 << 30, size=5)
    assert (a == b).all() and not (a == c).all()


def test_reused_streams_match_fresh_ones():
    streams = TrialStreams(2**63 + 5)
    for t in (4, 0, 4, 10**9):
        got = streams.at(t)
        want = trial_rng(2**63 + 5, t)
        assert (got.random(9) == want.random(9)).all()
        assert (got.integers(0, 256, size=17) == want.integers(0, 256, size=17)).all()


def test_seed_determinism_and_workers():
    cfg = SimConfig(q=2, n=3, m=4, p0="7/10", trials=3000, seed=11, audit_every=50)
    r1 = run_trials(cfg)
    r2 = run_trials(cfg)
    r3 = run_trials(cfg, workers=3)
    assert r1.to_json() == r2.to_json() == r3.to_json()
    assert r1.audits == 60


def test_fixed_m_near_exact_value():
    cfg = SimConfig(q=2, n=3, m=4, p0="7/10", trials=20_000, seed=1)
    rep = run_trials(cfg)
    exact = float(full_rank_value(4, 3, F2, Fraction(7, 10)))
    assert rep.successes <= rep.trials and rep.empirical_success_rate == rep.successes / rep.trials
    assert abs(rep.empirical_success_rate - exact) <= 4 * math.sqrt(exact * (1 - exact) / cfg.trials)


def test_stream_total_erasure():
    rep = run_trials(SimConfig(mode="stream", N=10, eps=1, trials=200))
    assert rep.successes == 0 and rep.empirical_success_rate == 0
    assert rep.transmissions_mean is None


def test_stream_no_erasure_records_transmissions():
    rep = run_trials(SimConfig(q=16, n=3, mode="stream", N=30, eps=0, p0=Fraction(1, 16), trials=500))
    assert rep.successes == 500
    assert 3 <= rep.transmissions_mean <= 30
    assert set(rep.transmissions_quantiles) == {"0.5", "0.9", "0.99"}


def test_excluding_zero_vectors():
    cfg = dict(q=2, n=3, m=4, p0="3/4", trials=20_000, seed=5)
    with_zero = run_trials(SimConfig(**cfg))
    without = run_trials(SimConfig(include_zero_vectors=False, **cfg))
    assert without.empirical_success_rate >= with_zero.empirical_success_rate
    rows = _draw_vectors(SparseDist(Fraction(3, 4), F2), trial_rng(0, 0), 5000, 3, False)
    assert rows.any(axis=1).all()


def test_gf256_codec():
    rep = run_trials(SimConfig(q=256, n=5, m=5, p0=Fraction(1, 256), L=16, trials=300, audit_every=1))
    assert rep.audits == 300
    assert rep.empirical_success_rate > 0.9


@pytest.mark.parametrize("bad", [
    dict(mode="other"), dict(m=2, n=3), dict(p0=2), dict(eps=-1), dict(q=6),
    dict(mode="stream", N=None), dict(include_zero_vectors=False, p0=1), dict(seed=-1),
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        SimConfig(**bad)


def test_config_json_round_trip(tmp_path):
    cfg = SimConfig(q=3, n=2, m=5, p0="0.35", trials=10, seed=2**63)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert SimConfig.load(path) == cfg
    assert cfg.p0 == Fraction(7, 20)
    with pytest.raises(ValueError):
        SimConfig.from_dict({"q": 2, "bogus": 1})


def test_report_csv_row():
    rep = run_trials(SimConfig(trials=100))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "q,n,mode,m_or_N,eps,p0,trials,seed,success_rate,stderr"
    assert lines[1].startswith("2,4,fixed-m,6,0,1/2,100,0,")
