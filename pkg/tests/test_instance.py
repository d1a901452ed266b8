"""
Seeded instances and named streams

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

"""

import numpy as np
import pytest

from libopsim.instance import stream, gen_instance, INSTANCE_KINDS
from libopsim.linalg import op_norm, spectral_radius


def test_streams_are_reproducible_and_independent():
    assert stream(7, "a").integers(2 ** 32) == stream(7, "a").integers(2 ** 32)
    assert stream(7, "a").integers(2 ** 32) != stream(7, "b").integers(2 ** 32)
    assert stream(7, "a").integers(2 ** 32) != stream(8, "a").integers(2 ** 32)


@pytest.mark.parametrize("kind", INSTANCE_KINDS)
def test_instances_are_deterministic(kind):
    assert np.array_equal(gen_instance(kind, 5, 0.9, 3), gen_instance(kind, 5, 0.9, 3))


def test_gaussian_spectral_radius():
    assert spectral_radius(gen_instance("gaussian", 8, 0.9, 1)) == pytest.approx(0.9, rel=1e-8)


def test_zero_cap_gives_nilpotent_instances():
    for kind in ("gaussian", "upper"):
        t = gen_instance(kind, 5, 0.0, 2)
        assert np.all(np.tril(t) == 0)
        assert not np.any(np.linalg.matrix_power(t, 5))


def test_normal_instance():
    t = gen_instance("normal", 6, 0.7, 4)
    assert np.allclose(t @ t.conj().T, t.conj().T @ t, atol=1e-12)
    assert spectral_radius(t) == pytest.approx(0.7, rel=1e-10)


def test_contraction_and_upper_norms():
    assert op_norm(gen_instance("contraction", 4, 0.6, 0)) == pytest.approx(0.6)
    assert op_norm(gen_instance("upper", 4, 0.6, 0)) == pytest.approx(0.6)


def test_instance_arguments():
    with pytest.raises(ValueError):
        gen_instance("hermitian", 3, 0.5, 0)
    with pytest.raises(ValueError):
        gen_instance("gaussian", 0, 0.5, 0)
    with pytest.raises(ValueError):
        gen_instance("gaussian", 3, -1.0, 0)
