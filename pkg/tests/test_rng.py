import numpy as np

from gaussapprox.rng import hash64, philox_stream, standard_normals


def test_hash64_is_deterministic_and_sensitive():
    assert hash64(1, "tag", 2) == hash64(1, "tag", 2)
    assert hash64(1, "tag", 2) != hash64(1, "tag", 3)
    assert hash64(1, "ab") != hash64(1, "a", "b")
    assert 0 <= hash64(2**200, "big") < 2**64


def test_streams_with_same_seed_agree():
    a = philox_stream(99).integers(0, 2**32, size=16)
    b = philox_stream(99).integers(0, 2**32, size=16)
    assert np.array_equal(a, b)


def test_standard_normals_reproducible_and_shaped():
    z1 = standard_normals(7, (3, 5))
    z2 = standard_normals(7, (3, 5))
    assert z1.shape == (3, 5)
    assert np.array_equal(z1, z2)
    assert not np.array_equal(z1, standard_normals(8, (3, 5)))
    # odd count exercises the Box-Muller pair truncation
    assert standard_normals(7, 7).shape == (7,)


def test_standard_normals_moments():
    z = standard_normals(123, 400_000)
    assert abs(z.mean()) < 4 / np.sqrt(z.size)
    assert abs(z.std() - 1.0) < 4 / np.sqrt(z.size)
    assert abs(np.mean(z**3)) < 4 * np.sqrt(15 / z.size)
    assert abs(np.mean(z**4) - 3.0) < 4 * np.sqrt(96 / z.size)
