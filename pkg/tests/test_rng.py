import numpy as np
import pytest
from hypothesis import given, strategies as st

from posediff.rng import RngStream, stream_id


def test_same_key_same_draws():
    a = RngStream(seed=42, sid=stream_id("x", 3))
    b = RngStream(seed=42, sid=stream_id("x", 3))
    assert np.array_equal(a.standard_normal((100,)), b.standard_normal((100,)))


def test_different_stream_ids_differ():
    a = RngStream(seed=42, sid=stream_id("x", 0))
    b = RngStream(seed=42, sid=stream_id("x", 1))
    assert not np.array_equal(a.standard_normal((100,)),
                              b.standard_normal((100,)))


def test_distinct_streams_uncorrelated():
    n = 10_000
    a = RngStream(seed=7, sid=stream_id("corr", 0)).standard_normal((n,))
    b = RngStream(seed=7, sid=stream_id("corr", 1)).standard_normal((n,))
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 0.05


def test_draw_order_independent_of_chunking():
    whole = RngStream(seed=1, sid=5).standard_normal((64,))
    s = RngStream(seed=1, sid=5)
    parts = np.concatenate([s.standard_normal((16,)) for _ in range(4)])
    assert np.array_equal(whole, parts)


def test_stream_id_type_tagged():
    # the integer 1 and the string "1" must not collide
    assert stream_id(1) != stream_id("1")
    assert stream_id("a", 1) != stream_id("a1")


def test_stream_id_rejects_ambiguous_types():
    with pytest.raises(TypeError):
        stream_id(1.5)
    with pytest.raises(TypeError):
        stream_id(True)


@given(st.lists(st.one_of(st.integers(), st.text(max_size=8)), min_size=1,
                max_size=4))
def test_stream_id_in_range(parts):
    sid = stream_id(*parts)
    assert 0 <= sid < 2 ** 64


def test_spawn_differs_from_parent():
    parent = RngStream(seed=3, sid=stream_id("p"))
    child = parent.spawn("c")
    assert child.sid != parent.sid
    a = RngStream(seed=3, sid=parent.sid).standard_normal((32,))
    b = RngStream(seed=3, sid=child.sid).standard_normal((32,))
    assert not np.array_equal(a, b)


def test_spawn_deterministic():
    a = RngStream(seed=3, sid=stream_id("p")).spawn("c", 2)
    b = RngStream(seed=3, sid=stream_id("p")).spawn("c", 2)
    assert a.sid == b.sid


def test_integers_half_open():
    s = RngStream(seed=0, sid=1)
    draws = s.integers(0, 5, (10_000,))
    assert draws.min() >= 0 and draws.max() <= 4
    # every value in the half-open range appears
    assert set(np.unique(draws)) == {0, 1, 2, 3, 4}


def test_permutation_is_permutation():
    s = RngStream(seed=9, sid=2)
    p = s.permutation(50)
    assert sorted(p.tolist()) == list(range(50))


def test_unit_vectors_unit_norm():
    s = RngStream(seed=4, sid=stream_id("uv"))
    v = s.unit_vectors((100,))
    assert v.shape == (100, 3)
    np.testing.assert_allclose(np.linalg.norm(v, axis=-1), 1.0, atol=1e-12)


def test_unit_vectors_scalar_shape():
    s = RngStream(seed=4, sid=stream_id("uv"))
    v = s.unit_vectors(())
    assert v.shape == (3,)
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_unit_vectors_cover_directions():
    # mean of many unit vectors should be near zero in every axis
    s = RngStream(seed=11, sid=1)
    v = s.unit_vectors((20_000,))
    assert np.abs(v.mean(axis=0)).max() < 0.02
